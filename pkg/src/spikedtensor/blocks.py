"""Symmetric block-wise contraction matrix of a tensor against d unit vectors.

For an order-d tensor and vectors (v1..vd), the N x N matrix (N = sum n_i)
has zero diagonal blocks and block (i, j), i < j, equal to the tensor
contracted on every vector except slots i and j.  At a critical point of
the best rank-one problem this matrix maps the stacked singular vectors to
(d-1) * lambda times themselves, which is the bridge used throughout the
theory side of this package.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .tensors import _check_vectors, contract_all_but_two, contract_full


@dataclass(frozen=True)
class BlockMatrix:
    """Dense symmetric matrix with block layout metadata."""

    data: np.ndarray
    block_dims: tuple[int, ...]

    def __post_init__(self):
        n = sum(self.block_dims)
        if self.data.shape != (n, n):
            raise ValueError("data shape inconsistent with block dims")

    @property
    def size(self) -> int:
        return self.data.shape[0]

    @property
    def order(self) -> int:
        return len(self.block_dims)

    @property
    def offsets(self) -> tuple[int, ...]:
        out, acc = [], 0
        for n in self.block_dims:
            out.append(acc)
            acc += n
        return tuple(out)

    def block(self, i: int, j: int) -> np.ndarray:
        off = self.offsets
        return self.data[off[i]:off[i] + self.block_dims[i],
                         off[j]:off[j] + self.block_dims[j]]


def _embed_order2(t: np.ndarray, vs):
    # matrices ride through the order-3 machinery with a trailing singleton
    t3 = np.asarray(t, dtype=np.float64)[:, :, None]
    vs3 = [np.asarray(vs[0], float), np.asarray(vs[1], float), np.ones(1)]
    return t3, vs3


def block_contraction_matrix(t: np.ndarray, vs) -> BlockMatrix:
    """Assemble the symmetric block matrix of pairwise-free contractions.

    Order-2 input is embedded as order 3 with a singleton trailing mode and
    scalar third vector, so the result carries a third (1-dim) block.
    """
    t = np.asarray(t, dtype=np.float64)
    if t.ndim == 2:
        t, vs = _embed_order2(t, vs)
    if t.ndim < 3:
        raise ValueError("order must be >= 2")
    vs = _check_vectors(t, vs)
    d = t.ndim
    dims = t.shape
    n = sum(dims)
    off = np.concatenate([[0], np.cumsum(dims)])
    m = np.zeros((n, n))
    for i in range(d):
        for j in range(i + 1, d):
            blk = contract_all_but_two(t, vs, (i, j))
            m[off[i]:off[i + 1], off[j]:off[j + 1]] = blk
            m[off[j]:off[j + 1], off[i]:off[i + 1]] = blk.T
    return BlockMatrix(data=m, block_dims=tuple(dims))


def stacked_singular_vector(vs) -> np.ndarray:
    """Concatenation (v1; ...; vd) renormalised to unit length (1/sqrt(d))."""
    vs = [np.asarray(v, dtype=np.float64) for v in vs]
    stacked = np.concatenate(vs)
    return stacked / np.sqrt(len(vs))


@dataclass(frozen=True)
class LocalityDiagnostic:
    """Top of the spectrum of the block matrix at a critical point."""

    top_two: tuple[float, float]
    singular_value: float
    is_local_max_candidate: bool


def hessian_locality_check(t: np.ndarray, tup, tol: float = 1e-8,
                           residual_tol: float = 1e-6) -> LocalityDiagnostic:
    """Check the second-order condition for a local maximum at a critical point.

    `tup` is a SingularTuple (or anything with .value and .vectors); it must
    satisfy the critical-point identities within `residual_tol`, rejected
    otherwise with the residuals in the message.  Candidate iff the top
    eigenvalue of the block matrix equals (d-1)*value within `tol` and the
    second-largest does not exceed value + tol.
    """
    from .estimation import critical_point_residuals  # local import, avoids cycle

    lam, vs = float(tup.value), list(tup.vectors)
    if lam < 0:
        raise ValueError("singular value must be nonnegative")
    res = critical_point_residuals(t, lam, vs)
    if max(res) > residual_tol:
        raise ValueError(f"not a critical point: per-mode residuals {[f'{r:.2e}' for r in res]}")
    bm = block_contraction_matrix(t, vs)
    eigs = np.linalg.eigvalsh(bm.data)
    top, second = float(eigs[-1]), float(eigs[-2])
    d = bm.order
    ok = abs(top - (d - 1) * lam) <= tol and second <= lam + tol
    return LocalityDiagnostic(top_two=(top, second), singular_value=lam,
                              is_local_max_candidate=bool(ok))


def check_block_matrix(bm: BlockMatrix, tol: float = 1e-12) -> None:
    """Invariants: symmetry and exactly-zero diagonal blocks."""
    if np.max(np.abs(bm.data - bm.data.T)) > tol:
        raise ValueError("block matrix is not symmetric")
    off = bm.offsets
    for i, n in enumerate(bm.block_dims):
        if np.any(bm.data[off[i]:off[i] + n, off[i]:off[i] + n] != 0.0):
            raise ValueError(f"diagonal block {i} is not zero")


def save_matrix_csv(path, m: np.ndarray) -> None:
    np.savetxt(path, m, delimiter=",", fmt="%.17g")
