"""Pure-numpy kernel implementations.

This module is the reference backend: every function here defines the
semantics that the numba backend in :mod:`spikedtensor.kernels.jit` must
reproduce.  The Gaussian stream is bit-reproducible across runs and
platforms; contractions use BLAS-backed tensordot reductions.
"""

from __future__ import annotations

import numpy as np

# splitmix64 constants; entry k of the raw stream is mix64(seed + (k+1)*GAMMA)
# with all arithmetic mod 2**64.
_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)


def _mix64(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


def normal_stream(seed: int, count: int) -> np.ndarray:
    """`count` standard normals from a counter-based splitmix64 + Box-Muller.

    Entry i consumes raw words 2i and 2i+1 of the stream, so the result is a
    pure function of (seed, count) and any prefix is stable under extension.
    """
    if count < 0:
        raise ValueError("count must be nonnegative")
    k = np.arange(2 * count, dtype=np.uint64)
    raw = _mix64(np.uint64(seed & 0xFFFFFFFFFFFFFFFF) + (k + np.uint64(1)) * _GAMMA)
    top53 = raw >> np.uint64(11)
    u1 = (top53[0::2].astype(np.float64) + 1.0) * 2.0 ** -53  # in (0, 1]
    u2 = top53[1::2].astype(np.float64) * 2.0 ** -53          # in [0, 1)
    return np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)


def plain_stieltjes_iteration(c_pos: np.ndarray, z: float, tol: float, max_iter: int):
    """Square-root-form transform iteration on the real axis.

    g <- sum_i ((g+z) - sqrt(4 c_i + (g+z)^2)) / 2 from g = 0, damping 0.5
    after 200 non-monotone steps.  Returns (g, converged, iterations); the
    convergence flag is the support-edge detector's signal.
    """
    g = 0.0
    last = np.inf
    nonmono = 0
    damp = 1.0
    for it in range(1, max_iter + 1):
        w = g + z
        f = float(np.sum(w - np.sqrt(4.0 * c_pos + w * w))) / 2.0
        if not np.isfinite(f) or abs(f) > 1e8:
            return g, False, it
        delta = abs(f - g)
        if delta < tol:
            return f, True, it
        if delta >= last:
            nonmono += 1
            if nonmono > 200:
                damp = 0.5
        last = delta
        g = (1.0 - damp) * g + damp * f
    return g, False, max_iter


def mode_contract(arr: np.ndarray, vecs: list[np.ndarray], hole: int) -> np.ndarray:
    """Contract every mode of `arr` except `hole` with the matching vector."""
    d = arr.ndim
    t = np.moveaxis(arr, hole, 0)
    for k in range(d - 1, -1, -1):
        if k == hole:
            continue
        t = t @ vecs[k]  # always the trailing remaining axis
    return t


def pair_contract(arr: np.ndarray, vecs: list[np.ndarray], hole_i: int, hole_j: int) -> np.ndarray:
    """Contract all modes except `hole_i` < `hole_j`; returns an n_i x n_j matrix."""
    d = arr.ndim
    t = np.moveaxis(arr, (hole_i, hole_j), (0, 1))
    for k in range(d - 1, -1, -1):
        if k == hole_i or k == hole_j:
            continue
        t = t @ vecs[k]
    return t


def full_contract(arr: np.ndarray, vecs: list[np.ndarray]) -> float:
    """Contract every mode of `arr` with the matching vector."""
    return float(mode_contract(arr, vecs, 0) @ vecs[0])


def power_sweeps(arr, vecs, tol, max_sweeps):
    """Cyclic rank-one power sweeps until the iterate stabilises.

    Mutates nothing; returns (lam, new_vecs, sweeps, status) with status
    0 = converged, 1 = sweep budget exhausted, 2 = zero contraction hit.
    Convergence: max mode-vector change (sign-aligned) plus the relative
    singular-value change drops below `tol` between consecutive sweeps.
    """
    d = arr.ndim
    cur = [v.copy() for v in vecs]
    lam = abs(full_contract(arr, cur))
    for sweep in range(1, max_sweeps + 1):
        prev = [v.copy() for v in cur]
        prev_lam = lam
        nrm = 0.0
        for i in range(d):
            w = mode_contract(arr, cur, i)
            nrm = float(np.linalg.norm(w))
            if nrm == 0.0 or not np.isfinite(nrm):
                return lam, cur, sweep, 2
            cur[i] = w / nrm
        lam = nrm  # contraction along the freshly normalised last mode
        move = 0.0
        for i in range(d):
            sgn = 1.0 if float(cur[i] @ prev[i]) >= 0.0 else -1.0
            move = max(move, float(np.linalg.norm(cur[i] - sgn * prev[i])))
        move += abs(lam - prev_lam) / max(1.0, abs(lam))
        if move <= tol:
            return lam, cur, sweep, 0
    return lam, cur, max_sweeps, 1
