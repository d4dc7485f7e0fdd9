"""Dense tensor primitives: seeded sampling, spiked models, contractions, norms.

Tensors are plain C-order float64 ``numpy.ndarray`` objects (row-major, last
index fastest); the flat entry at multi-index (i_1.. i_d) sits at linear
offset ``i_1*n_2*...*n_d + ... + i_{d-1}*n_d + i_d``.  All sampling is a pure
function of (dims, seed).
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from . import kernels

_MAGIC = b"SPKTNSR\x00"
_FORMAT_VERSION = 1


def _check_dims(dims) -> tuple[int, ...]:
    dims = tuple(int(n) for n in dims)
    if len(dims) < 1 or any(n < 1 for n in dims):
        raise ValueError(f"dimensions must be positive integers, got {dims}")
    return dims


def _check_unit(v: np.ndarray, what: str = "vector", tol: float = 1e-12) -> np.ndarray:
    v = np.asarray(v, dtype=np.float64)
    if v.ndim != 1:
        raise ValueError(f"{what} must be 1-D")
    if abs(np.linalg.norm(v) - 1.0) > tol:
        raise ValueError(f"{what} is not unit norm (|1 - ||v||| = {abs(np.linalg.norm(v)-1.0):.2e})")
    return v


def _check_vectors(t: np.ndarray, vs, skip: tuple[int, ...] = ()) -> list[np.ndarray]:
    if len(vs) != t.ndim:
        raise ValueError(f"expected {t.ndim} vectors, got {len(vs)}")
    out = []
    for i, v in enumerate(vs):
        v = np.asarray(v, dtype=np.float64)
        if i in skip:
            out.append(v)
            continue
        v = _check_unit(v, f"vector {i}")
        if v.shape[0] != t.shape[i]:
            raise ValueError(f"vector {i} has dim {v.shape[0]}, tensor mode has {t.shape[i]}")
        out.append(v)
    return out


def sample_gaussian_tensor(dims, seed: int) -> np.ndarray:
    """i.i.d. standard normal tensor, bit-reproducible in (dims, seed)."""
    dims = _check_dims(dims)
    total = int(np.prod(dims))
    return kernels.normal_stream(int(seed), total).reshape(dims)


def random_unit_vector(dim: int, seed: int) -> np.ndarray:
    """Uniform point on the sphere, derived from the same seeded stream."""
    if dim < 1:
        raise ValueError("dim must be positive")
    v = kernels.normal_stream(int(seed), int(dim))
    n = np.linalg.norm(v)
    if n == 0.0:  # unreachable for this generator, kept for safety
        v[0] = 1.0
        n = 1.0
    return v / n


def random_unit_vectors(dims, seed: int) -> list[np.ndarray]:
    """One independent unit vector per mode; vector i uses seed + i."""
    dims = _check_dims(dims)
    return [random_unit_vector(n, seed + i) for i, n in enumerate(dims)]


@dataclass(frozen=True)
class SpikeModel:
    """Rank-one planted signal: snr * x1 o ... o xd observed in noise / sqrt(N)."""

    snr: float
    components: tuple[np.ndarray, ...]

    def __post_init__(self):
        if self.snr < 0:
            raise ValueError("snr must be nonnegative")
        comps = tuple(_check_unit(v, f"component {i}") for i, v in enumerate(self.components))
        object.__setattr__(self, "components", comps)
        if len(comps) < 2:
            raise ValueError("need at least two components (order >= 2)")

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(v.shape[0] for v in self.components)

    @property
    def order(self) -> int:
        return len(self.components)

    @property
    def noise_scale(self) -> float:
        """1/sqrt(sum of dims); the noise tensor enters scaled by this."""
        return 1.0 / np.sqrt(sum(self.dims))


def rank_one_tensor(scale: float, components) -> np.ndarray:
    """scale * v1 o v2 o ... o vd as a dense array."""
    out = np.asarray(components[0], dtype=np.float64) * float(scale)
    for v in components[1:]:
        out = np.multiply.outer(out, np.asarray(v, dtype=np.float64))
    return out


def build_spiked_tensor(model: SpikeModel, seed: int, noise: np.ndarray | None = None) -> np.ndarray:
    """Observed tensor: snr * (o components) + noise / sqrt(N).

    `noise` overrides the seeded Gaussian draw (test hook); it must match the
    model dims and is used as-is before the 1/sqrt(N) scaling.
    """
    if noise is None:
        noise = sample_gaussian_tensor(model.dims, seed)
    else:
        noise = np.asarray(noise, dtype=np.float64)
        if noise.shape != model.dims:
            raise ValueError(f"noise shape {noise.shape} != model dims {model.dims}")
    t = noise / np.sqrt(sum(model.dims))
    if model.snr != 0.0:
        t = t + rank_one_tensor(model.snr, model.components)
    return t


def contract_full(t: np.ndarray, vs) -> float:
    """Sum of t[i1..id] * prod_k vs[k][ik] over all entries."""
    vs = _check_vectors(t, vs)
    return kernels.full_contract(t, vs)


def contract_all_but_one(t: np.ndarray, vs, hole: int) -> np.ndarray:
    """Mode-`hole` contraction: slot `hole` left free, others hit with vs.

    vs[hole] is ignored (may be anything of the right length or None-like).
    """
    if not 0 <= hole < t.ndim:
        raise ValueError(f"hole {hole} out of range for order {t.ndim}")
    vs = list(vs)
    if vs[hole] is None:
        vs[hole] = np.zeros(t.shape[hole])
    vs = _check_vectors(t, vs, skip=(hole,))
    return kernels.mode_contract(t, vs, hole)


def contract_all_but_two(t: np.ndarray, vs, holes: tuple[int, int]) -> np.ndarray:
    """Two slots left free; returns the n_i x n_j matrix (i < j)."""
    i, j = holes
    if i == j:
        raise ValueError("holes must be distinct")
    if not (0 <= i < j < t.ndim):
        raise ValueError(f"holes {holes} invalid for order {t.ndim}")
    if t.ndim == 2:
        return np.asarray(t, dtype=np.float64)
    vs = list(vs)
    for h in (i, j):
        if vs[h] is None:
            vs[h] = np.zeros(t.shape[h])
    vs = _check_vectors(t, vs, skip=(i, j))
    return kernels.pair_contract(t, vs, i, j)


def spectral_norm_bound(dims, delta: float) -> float:
    """High-probability ceiling for the spectral norm of an i.i.d. N(0,1) tensor.

    sqrt(2 [ (sum n_i) log(2d / log(3/2)) + log(2/delta) ]); holds with
    probability at least 1 - delta.  Used as a sanity ceiling in tests.
    """
    dims = _check_dims(dims)
    if not 0.0 < delta <= 1.0:
        raise ValueError("delta must be in (0, 1]")
    d = len(dims)
    return float(np.sqrt(2.0 * (sum(dims) * np.log(2.0 * d / np.log(1.5)) + np.log(2.0 / delta))))


def save_tensor(path, t: np.ndarray) -> None:
    """Binary dump: magic, version, d, dims (all little-endian u64), then
    float64 entries in C order."""
    t = np.asarray(t, dtype=np.float64)
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<QQ", _FORMAT_VERSION, t.ndim))
        fh.write(struct.pack(f"<{t.ndim}Q", *t.shape))
        fh.write(np.ascontiguousarray(t).astype("<f8").tobytes())


def load_tensor(path) -> np.ndarray:
    with open(path, "rb") as fh:
        magic = fh.read(8)
        if magic != _MAGIC:
            raise ValueError("not a spikedtensor binary file")
        version, d = struct.unpack("<QQ", fh.read(16))
        if version != _FORMAT_VERSION:
            raise ValueError(f"unsupported format version {version}")
        dims = struct.unpack(f"<{d}Q", fh.read(8 * d))
        data = np.frombuffer(fh.read(8 * int(np.prod(dims))), dtype="<f8")
    return data.reshape(dims).astype(np.float64)


def dump_tensor_csv(path, t: np.ndarray) -> None:
    """One line per entry: i_1,...,i_d,value (intended for small tensors)."""
    t = np.asarray(t, dtype=np.float64)
    with open(path, "w") as fh:
        fh.write(",".join(f"i{k+1}" for k in range(t.ndim)) + ",value\n")
        for idx in np.ndindex(*t.shape):
            fh.write(",".join(str(i) for i in idx) + f",{t[idx]:.17g}\n")
