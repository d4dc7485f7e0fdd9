"""Numba-accelerated kernels.

Same contracts as :mod:`spikedtensor.kernels.reference`.  The Gaussian
stream reproduces the reference integer arithmetic exactly; contraction
results agree with the BLAS path up to summation-order round-off
(~1e-15 relative), since the fused loops accumulate in index order.
"""

from __future__ import annotations

import numpy as np
from numba import njit, prange

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)


@njit(cache=True, parallel=True)
def _normal_fill(seed, out):
    n = out.shape[0]
    for i in prange(n):
        z1 = seed + np.uint64(2 * i + 1) * _GAMMA
        z1 = (z1 ^ (z1 >> np.uint64(30))) * _MIX1
        z1 = (z1 ^ (z1 >> np.uint64(27))) * _MIX2
        z1 ^= z1 >> np.uint64(31)
        z2 = seed + np.uint64(2 * i + 2) * _GAMMA
        z2 = (z2 ^ (z2 >> np.uint64(30))) * _MIX1
        z2 = (z2 ^ (z2 >> np.uint64(27))) * _MIX2
        z2 ^= z2 >> np.uint64(31)
        u1 = (np.float64(z1 >> np.uint64(11)) + 1.0) * 2.0 ** -53
        u2 = np.float64(z2 >> np.uint64(11)) * 2.0 ** -53
        out[i] = np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)


def normal_stream(seed: int, count: int) -> np.ndarray:
    if count < 0:
        raise ValueError("count must be nonnegative")
    out = np.empty(count, dtype=np.float64)
    _normal_fill(np.uint64(seed & 0xFFFFFFFFFFFFFFFF), out)
    return out


@njit(cache=True)
def _plain_stieltjes(c_pos, z, tol, max_iter):
    g = 0.0
    last = 1e300
    nonmono = 0
    damp = 1.0
    for it in range(1, max_iter + 1):
        w = g + z
        f = 0.0
        for k in range(c_pos.shape[0]):
            f += 0.5 * (w - np.sqrt(4.0 * c_pos[k] + w * w))
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


def plain_stieltjes_iteration(c_pos: np.ndarray, z: float, tol: float, max_iter: int):
    g, ok, it = _plain_stieltjes(np.ascontiguousarray(c_pos, dtype=np.float64),
                                 float(z), float(tol), int(max_iter))
    return float(g), bool(ok), int(it)


@njit(cache=True)
def _mode_contract_flat(flat, dims, vstack, hole, out):
    # single fused pass: out[a] = sum over all entries with index a in slot
    # `hole` of entry * prod of vector weights on the other slots
    d = dims.shape[0]
    out[:] = 0.0
    idx = np.zeros(d, dtype=np.int64)
    pw = np.ones(d, dtype=np.float64)  # pw[k] = weight product over modes < k
    for k in range(d - 1):
        w = 1.0 if k == hole else vstack[k, idx[k]]
        pw[k + 1] = pw[k] * w
    nd = dims[d - 1]
    n = flat.shape[0]
    lin = 0
    while lin < n:
        base = pw[d - 1]
        if hole == d - 1:
            for j in range(nd):
                out[j] += flat[lin + j] * base
        else:
            acc = 0.0
            for j in range(nd):
                acc += flat[lin + j] * vstack[d - 1, j]
            out[idx[hole]] += acc * base
        lin += nd
        j = d - 2
        while j >= 0:
            idx[j] += 1
            if idx[j] < dims[j]:
                break
            idx[j] = 0
            j -= 1
        if j < 0:
            break
        for k in range(j, d - 1):
            w = 1.0 if k == hole else vstack[k, idx[k]]
            pw[k + 1] = pw[k] * w


@njit(cache=True)
def _pair_contract_flat(flat, dims, vstack, hi, hj, out):
    d = dims.shape[0]
    out[:, :] = 0.0
    idx = np.zeros(d, dtype=np.int64)
    pw = np.ones(d, dtype=np.float64)
    for k in range(d - 1):
        w = 1.0 if (k == hi or k == hj) else vstack[k, idx[k]]
        pw[k + 1] = pw[k] * w
    nd = dims[d - 1]
    n = flat.shape[0]
    lin = 0
    while lin < n:
        base = pw[d - 1]
        if hj == d - 1:
            a = idx[hi]
            for j in range(nd):
                out[a, j] += flat[lin + j] * base
        else:
            acc = 0.0
            for j in range(nd):
                acc += flat[lin + j] * vstack[d - 1, j]
            out[idx[hi], idx[hj]] += acc * base
        lin += nd
        j = d - 2
        while j >= 0:
            idx[j] += 1
            if idx[j] < dims[j]:
                break
            idx[j] = 0
            j -= 1
        if j < 0:
            break
        for k in range(j, d - 1):
            w = 1.0 if (k == hi or k == hj) else vstack[k, idx[k]]
            pw[k + 1] = pw[k] * w


@njit(cache=True)
def _full_contract_flat(flat, dims, vstack):
    d = dims.shape[0]
    out = np.zeros(dims[0], dtype=np.float64)
    _mode_contract_flat(flat, dims, vstack, 0, out)
    acc = 0.0
    for a in range(dims[0]):
        acc += out[a] * vstack[0, a]
    return acc


@njit(cache=True)
def _power_sweeps_flat(flat, dims, vstack, tol, max_sweeps):
    d = dims.shape[0]
    nmax = vstack.shape[1]
    cur = vstack.copy()
    prev = np.empty_like(cur)
    lam = np.abs(_full_contract_flat(flat, dims, cur))
    work = np.empty(nmax, dtype=np.float64)
    sweeps = 0
    status = 1
    for sweep in range(1, max_sweeps + 1):
        sweeps = sweep
        prev[:, :] = cur
        prev_lam = lam
        nrm = 0.0
        for i in range(d):
            ni = dims[i]
            _mode_contract_flat(flat, dims, cur, i, work[:ni])
            s = 0.0
            for a in range(ni):
                s += work[a] * work[a]
            nrm = np.sqrt(s)
            if nrm == 0.0 or not np.isfinite(nrm):
                return lam, cur, sweep, 2
            for a in range(ni):
                cur[i, a] = work[a] / nrm
        lam = nrm
        move = 0.0
        for i in range(d):
            ni = dims[i]
            dot = 0.0
            for a in range(ni):
                dot += cur[i, a] * prev[i, a]
            sgn = 1.0 if dot >= 0.0 else -1.0
            s = 0.0
            for a in range(ni):
                diff = cur[i, a] - sgn * prev[i, a]
                s += diff * diff
            mv = np.sqrt(s)
            if mv > move:
                move = mv
        move += np.abs(lam - prev_lam) / max(1.0, np.abs(lam))
        if move <= tol:
            status = 0
            break
    return lam, cur, sweeps, status


def _stack(vecs, dims):
    vs = np.zeros((len(dims), max(dims)), dtype=np.float64)
    for i, v in enumerate(vecs):
        vs[i, : dims[i]] = v
    return vs


def mode_contract(arr: np.ndarray, vecs: list[np.ndarray], hole: int) -> np.ndarray:
    dims = np.asarray(arr.shape, dtype=np.int64)
    out = np.empty(arr.shape[hole], dtype=np.float64)
    _mode_contract_flat(np.ascontiguousarray(arr, dtype=np.float64).ravel(),
                        dims, _stack(vecs, arr.shape), hole, out)
    return out


def pair_contract(arr: np.ndarray, vecs: list[np.ndarray], hole_i: int, hole_j: int) -> np.ndarray:
    dims = np.asarray(arr.shape, dtype=np.int64)
    out = np.empty((arr.shape[hole_i], arr.shape[hole_j]), dtype=np.float64)
    _pair_contract_flat(np.ascontiguousarray(arr, dtype=np.float64).ravel(),
                        dims, _stack(vecs, arr.shape), hole_i, hole_j, out)
    return out


def full_contract(arr: np.ndarray, vecs: list[np.ndarray]) -> float:
    dims = np.asarray(arr.shape, dtype=np.int64)
    return float(_full_contract_flat(np.ascontiguousarray(arr, dtype=np.float64).ravel(),
                                     dims, _stack(vecs, arr.shape)))


def power_sweeps(arr, vecs, tol, max_sweeps):
    dims = np.asarray(arr.shape, dtype=np.int64)
    lam, stacked, sweeps, status = _power_sweeps_flat(
        np.ascontiguousarray(arr, dtype=np.float64).ravel(),
        dims, _stack(vecs, arr.shape), float(tol), int(max_sweeps))
    out = [stacked[i, : arr.shape[i]].copy() for i in range(arr.ndim)]
    return float(lam), out, int(sweeps), int(status)
