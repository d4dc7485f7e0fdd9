"""Eigendecomposition, empirical spectral measures and resolvent traces."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .blocks import BlockMatrix


class PoleError(ValueError):
    """Evaluation point collides with the spectrum."""


@dataclass(frozen=True)
class Spectrum:
    """Sorted eigenvalues with optional orthonormal eigenvectors."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray | None
    block_dims: tuple[int, ...] | None = None

    @property
    def size(self) -> int:
        return self.eigenvalues.shape[0]


@dataclass(frozen=True)
class EmpiricalMeasure:
    bin_edges: np.ndarray
    densities: np.ndarray
    total_mass: float


def eig_sym(m, want_vectors: bool = False, sym_tol: float = 1e-10) -> Spectrum:
    """Full symmetric eigendecomposition (ascending eigenvalues)."""
    block_dims = None
    if isinstance(m, BlockMatrix):
        block_dims = m.block_dims
        m = m.data
    m = np.asarray(m, dtype=np.float64)
    scale = max(1.0, np.max(np.abs(m)))
    if np.max(np.abs(m - m.T)) > sym_tol * scale:
        raise ValueError("matrix is not symmetric within tolerance")
    if want_vectors:
        vals, vecs = np.linalg.eigh(m)
        return Spectrum(eigenvalues=vals, eigenvectors=vecs, block_dims=block_dims)
    vals = np.linalg.eigvalsh(m)
    return Spectrum(eigenvalues=vals, eigenvectors=None, block_dims=block_dims)


def empirical_measure(s, bins: int = 100, span: tuple[float, float] | None = None) -> EmpiricalMeasure:
    """Normalised eigenvalue histogram (total mass 1).

    Default range pads the data range by 5% of its width on each side; a
    degenerate range (single repeated value) is padded by 0.5.
    """
    eig = s.eigenvalues if isinstance(s, Spectrum) else np.asarray(s, dtype=np.float64)
    if eig.size == 0:
        raise ValueError("empty spectrum")
    if bins < 1:
        raise ValueError("bins must be >= 1")
    if span is None:
        lo, hi = float(eig.min()), float(eig.max())
        width = hi - lo
        pad = 0.05 * width if width > 0 else 0.5
        span = (lo - pad, hi + pad)
    dens, edges = np.histogram(eig, bins=bins, range=span, density=True)
    inside = np.count_nonzero((eig >= span[0]) & (eig <= span[1]))
    # np.histogram normalises over in-range samples; rescale to mass-in-range
    frac = inside / eig.size
    return EmpiricalMeasure(bin_edges=edges, densities=dens * frac, total_mass=float(frac))


def empirical_stieltjes(s, z) -> complex:
    """(1/n) sum 1/(eig_i - z); real z must stay 1e-9 away from every eigenvalue."""
    eig = s.eigenvalues if isinstance(s, Spectrum) else np.asarray(s, dtype=np.float64)
    if np.iscomplexobj(np.asarray(z)) and np.imag(z) != 0:
        zc = complex(z)
    else:
        zc = float(np.real(z))
        if np.min(np.abs(eig - zc)) < 1e-9:
            raise PoleError(f"z={zc} within 1e-9 of the spectrum")
    return complex(np.mean(1.0 / (eig - zc)))


def block_trace(m: BlockMatrix, z: float, block: int, spectrum: Spectrum | None = None) -> float:
    """(1/N) tr of diagonal block `block` of the resolvent (M - zI)^{-1}.

    Computed from the eigendecomposition; z must clear the spectrum by 1e-6.
    """
    if spectrum is None or spectrum.eigenvectors is None:
        spectrum = eig_sym(m, want_vectors=True)
    z = float(z)
    if np.min(np.abs(spectrum.eigenvalues - z)) < 1e-6:
        raise PoleError(f"z={z} within 1e-6 of the spectrum")
    off = m.offsets[block]
    n_i = m.block_dims[block]
    vecs = spectrum.eigenvectors[off:off + n_i, :]
    weights = np.sum(vecs * vecs, axis=0)  # per-eigenvalue mass inside the block
    return float(np.sum(weights / (spectrum.eigenvalues - z)) / m.size)


def theory_cdf(measure, xs: np.ndarray) -> np.ndarray:
    """CDF of a limiting measure on sorted points, by adaptive quadrature.

    Integrates the density between consecutive evaluation points and adds the
    atom at 0 once crossed.  `measure` is a LimitingMeasure from
    :mod:`spikedtensor.stieltjes`.
    """
    xs = np.asarray(xs, dtype=np.float64)
    lo = min(measure.support_min, xs[0]) - 1.0
    sing = np.asarray(getattr(measure, "singular_points", ()), dtype=np.float64)
    out = np.empty(xs.size)
    acc = 0.0
    prev = lo
    for k, x in enumerate(xs):
        if x > prev:
            inside = sing[(sing > prev) & (sing < x)]
            pts = list(inside) if inside.size else None
            seg, _ = quad(measure.density, prev, x, limit=200, points=pts)
            acc += seg
        out[k] = acc
        prev = x
    if measure.atom_at_zero > 0:
        out = out + measure.atom_at_zero * (xs >= 0.0)
    return np.clip(out, 0.0, 1.0)


def ks_distance(eigenvalues, measure) -> float:
    """sup_x |empirical CDF - theory CDF| over the empirical support.

    Handles a Dirac atom at zero in the theory CDF: the jump is compared on
    both sides, and eigenvalues within 1e-10 of zero (numerically rank-null
    directions) are treated as sitting exactly on the atom.
    """
    eig = eigenvalues.eigenvalues if isinstance(eigenvalues, Spectrum) else np.asarray(eigenvalues, dtype=np.float64)
    if measure.atom_at_zero > 0:
        eig = np.where(np.abs(eig) < 1e-10, 0.0, eig)
    eig = np.sort(eig)
    n = eig.size
    pts = eig
    if measure.atom_at_zero > 0:
        pts = np.sort(np.concatenate([eig, [0.0]]))
    cdf_hi = theory_cdf(measure, pts)
    # left limit of the theory CDF: subtract the atom exactly at its location
    cdf_lo = cdf_hi - measure.atom_at_zero * (pts == 0.0)
    emp_hi = np.searchsorted(eig, pts, side="right") / n
    emp_lo = np.searchsorted(eig, pts, side="left") / n
    return float(np.max(np.maximum(np.abs(emp_hi - cdf_hi), np.abs(emp_lo - cdf_lo))))


def save_eigenvalues_csv(path, s) -> None:
    eig = s.eigenvalues if isinstance(s, Spectrum) else np.asarray(s)
    with open(path, "w") as fh:
        fh.write("eigenvalue\n")
        for v in eig:
            fh.write(f"{v:.15g}\n")


def save_measure_csv(path, em: EmpiricalMeasure) -> None:
    with open(path, "w") as fh:
        fh.write("bin_left,bin_right,density\n")
        for left, right, dens in zip(em.bin_edges[:-1], em.bin_edges[1:], em.densities):
            fh.write(f"{left:.15g},{right:.15g},{dens:.15g}\n")
