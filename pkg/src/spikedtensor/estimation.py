"""Empirical estimators: tensor power iteration, unfolding SVD, deflation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .tensors import (
    _check_vectors,
    contract_all_but_one,
    contract_full,
    random_unit_vector,
    rank_one_tensor,
)


@dataclass(frozen=True)
class SingularTuple:
    """Candidate critical point of the best rank-one problem."""

    value: float                       # lambda >= 0
    vectors: tuple[np.ndarray, ...]
    residuals: np.ndarray              # per-mode ||T(.., :, ..) - lambda v_i||
    iterations: int
    converged: bool

    @property
    def order(self) -> int:
        return len(self.vectors)


@dataclass(frozen=True)
class RandomInit:
    seed: int


@dataclass(frozen=True)
class PlantedInit:
    components: tuple = ()


@dataclass(frozen=True)
class WarmInit:
    vectors: tuple = ()


def critical_point_residuals(t: np.ndarray, lam: float, vs) -> np.ndarray:
    """||T(v_1,..,:,..,v_d) - lam v_i|| for every free slot i."""
    vs = _check_vectors(t, vs)
    out = np.empty(t.ndim)
    for i in range(t.ndim):
        out[i] = np.linalg.norm(contract_all_but_one(t, vs, i) - lam * vs[i])
    return out


def _initial_vectors(t: np.ndarray, init, attempt: int) -> list[np.ndarray]:
    if isinstance(init, RandomInit):
        # distinct per mode and per restart attempt
        base = init.seed + 7919 * attempt
        return [random_unit_vector(n, base + i) for i, n in enumerate(t.shape)]
    if isinstance(init, PlantedInit):
        return _check_vectors(t, list(init.components))
    if isinstance(init, WarmInit):
        return _check_vectors(t, list(init.vectors))
    raise ValueError(f"unknown init strategy {init!r}")


def power_iteration(t: np.ndarray, init=RandomInit(0), tol: float = 1e-10,
                    max_sweeps: int = 1000, max_restarts: int = 5) -> SingularTuple:
    """Cyclic power method for the dominant rank-one approximation.

    Each sweep renormalises every mode against the contraction of the others;
    the singular value is re-read after the full cycle.  A zero contraction
    triggers a fresh random restart (up to `max_restarts`); non-convergence
    returns the last iterate flagged converged=False.
    """
    t = np.asarray(t, dtype=np.float64)
    if t.ndim < 2:
        raise ValueError("order must be >= 2")
    if not np.any(t):
        raise ValueError("zero tensor has no dominant rank-one direction")
    attempt = 0
    vs = _initial_vectors(t, init, attempt)
    while True:
        lam, vecs, sweeps, status = kernels.power_sweeps(t, vs, tol, max_sweeps)
        if status != 2:
            break
        attempt += 1
        if attempt > max_restarts:
            return SingularTuple(value=float(lam), vectors=tuple(vecs),
                                 residuals=critical_point_residuals(t, lam, vecs),
                                 iterations=sweeps, converged=False)
        seed = init.seed if isinstance(init, RandomInit) else 0
        vs = _initial_vectors(t, RandomInit(seed + 1), attempt)
    lam = contract_full(t, vecs)
    if lam < 0:  # flip one direction so the value is reported nonnegative
        vecs[0] = -vecs[0]
        lam = -lam
    return SingularTuple(value=float(lam), vectors=tuple(vecs),
                         residuals=critical_point_residuals(t, lam, vecs),
                         iterations=sweeps, converged=(status == 0))


def annealed_power_iteration(tensor_builder, beta_grid, tol: float = 1e-10,
                             max_sweeps: int = 1000, first_init=None) -> list[SingularTuple]:
    """Warm-started sweep down a decreasing SNR grid with shared noise.

    `tensor_builder(beta)` must return the observation at that SNR with the
    same noise realisation for every beta, so consecutive solutions are
    continuations of one another.  The first grid point starts from
    `first_init` (random by default).
    """
    beta_grid = [float(b) for b in beta_grid]
    if len(beta_grid) == 0:
        raise ValueError("empty SNR grid")
    if any(b2 >= b1 for b1, b2 in zip(beta_grid, beta_grid[1:])):
        raise ValueError("SNR grid must be strictly decreasing")
    init = first_init if first_init is not None else RandomInit(0)
    out = []
    for beta in beta_grid:
        t = tensor_builder(beta)
        res = power_iteration(t, init=init, tol=tol, max_sweeps=max_sweeps)
        out.append(res)
        init = WarmInit(vectors=res.vectors)
    return out


def unfold(t: np.ndarray, mode: int) -> np.ndarray:
    """Matricise along `mode`: rows index that mode, columns the remaining
    modes in original order (row-major)."""
    t = np.asarray(t, dtype=np.float64)
    if not 0 <= mode < t.ndim:
        raise ValueError(f"mode {mode} out of range")
    return np.moveaxis(t, mode, 0).reshape(t.shape[mode], -1)


def refold(m: np.ndarray, mode: int, dims) -> np.ndarray:
    """Exact inverse of :func:`unfold`."""
    dims = tuple(int(n) for n in dims)
    rest = tuple(n for i, n in enumerate(dims) if i != mode)
    return np.moveaxis(m.reshape((dims[mode],) + rest), 0, mode)


def top_singular_triple(m: np.ndarray) -> tuple[float, np.ndarray, np.ndarray]:
    """(sigma_max, u, v) via the Gram matrix of the shorter side."""
    m = np.asarray(m, dtype=np.float64)
    if m.shape[0] <= m.shape[1]:
        gram = m @ m.T
        vals, vecs = np.linalg.eigh(gram)
        sigma = float(np.sqrt(max(vals[-1], 0.0)))
        u = vecs[:, -1]
        v = m.T @ u
        nv = np.linalg.norm(v)
        v = v / nv if nv > 0 else v
    else:
        gram = m.T @ m
        vals, vecs = np.linalg.eigh(gram)
        sigma = float(np.sqrt(max(vals[-1], 0.0)))
        v = vecs[:, -1]
        u = m @ v
        nu = np.linalg.norm(u)
        u = u / nu if nu > 0 else u
    return sigma, u, v


def deflate_orthogonal(t: np.ndarray, rank: int, init=RandomInit(0), tol: float = 1e-10,
                       max_sweeps: int = 1000, restarts: int = 5) -> list[SingularTuple]:
    """Sequential rank-one extraction for mutually orthogonal planted parts.

    Each stage runs the power method from `restarts` random starts (planted
    or warm inits are used as given) and keeps the candidate with the largest
    fitted value, the usual guard against spurious local optima; the fitted
    rank-one term is subtracted and the process repeats.  Components come
    back sorted by decreasing fitted value; a non-converged stage is carried
    in the tuple's flag rather than raised.
    """
    if rank < 1:
        raise ValueError("rank must be >= 1")
    t = np.asarray(t, dtype=np.float64).copy()
    found: list[SingularTuple] = []
    for ell in range(rank):
        if isinstance(init, RandomInit):
            best = None
            for k in range(max(1, restarts)):
                cand = power_iteration(
                    t, init=RandomInit(init.seed + 104729 * ell + 15485863 * k),
                    tol=tol, max_sweeps=max_sweeps)
                if best is None or cand.value > best.value:
                    best = cand
            res = best
        else:
            res = power_iteration(t, init=init, tol=tol, max_sweeps=max_sweeps)
        found.append(res)
        t -= rank_one_tensor(res.value, res.vectors)
    found.sort(key=lambda r: -r.value)
    return found
