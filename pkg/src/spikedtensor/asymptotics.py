"""Asymptotic predictions: limiting singular value, alignments, SNR thresholds.

Above a threshold snr the dispersion relation z + g(z) = snr * prod_i q_i(z)
admits a root to the right of the limiting support; the root is the limiting
singular value and q_i evaluated there are the limiting alignments
|<estimate_i, planted_i>|.  Below the threshold the singular value sticks to
the support edge and the alignments vanish.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .stieltjes import (
    check_ratio_vector,
    g_matrix_case,
    matrix_case_support,
    right_edge,
    solve_fixed_point,
)


class BelowEdgeError(ValueError):
    """Observed singular value not above the support edge: no consistent SNR."""


@dataclass(frozen=True)
class AsymptoticPrediction:
    beta: float
    c: tuple[float, ...]
    lambda_inf: float
    alignments: np.ndarray
    beta_s: float
    right_edge: float
    above_threshold: bool


def _parts_at(c, lam: float):
    sol = solve_fixed_point(c, float(lam))
    if not sol.converged:
        raise BelowEdgeError(f"fixed point did not converge at z={lam}; point not right of the support")
    return float(np.real(sol.g)), np.real(sol.g_parts)


def alignments_at(c, lam: float) -> np.ndarray:
    """q_i = sqrt(1 - g_i^2 / c_i) at a point right of the support."""
    c = check_ratio_vector(c)
    _, gi = _parts_at(c, lam)
    q2 = 1.0 - gi * gi / c
    return np.sqrt(np.maximum(q2, 0.0))


def alignments_alpha_form(c, lam: float, beta: float) -> np.ndarray:
    """Equivalent alignment expression via a_i = beta / (z + g - g_i):
    q_i = (a_i^{d-3} / prod_{j != i} a_j)^{1/(2d-4)}.

    Defined for boundary ratios (c_i = 0 allowed), d >= 3.
    """
    c = check_ratio_vector(c, allow_zero=True)
    d = c.size
    if d < 3:
        raise ValueError("alpha form needs order >= 3")
    g, gi = _parts_at(c, lam)
    alpha = beta / (lam + g - gi)
    out = np.empty(d)
    for i in range(d):
        others = np.prod(np.delete(alpha, i))
        out[i] = (alpha[i] ** (d - 3) / others) ** (1.0 / (2.0 * d - 4.0))
    return out


def snr_of_lambda(c, lam: float) -> float:
    """Inverse map snr(lam) = (lam + g) / prod q_i, in the form
    (lam+g)^{1-d/2} * sqrt(prod (lam + g - g_i)) which tolerates zero ratios."""
    c = check_ratio_vector(c, allow_zero=True)
    d = c.size
    g, gi = _parts_at(c, lam)
    w = lam + g
    prod_terms = float(np.prod(w - gi))
    if w <= 0 or prod_terms < 0:
        raise BelowEdgeError(f"inverse map undefined at lam={lam}")
    return float(w ** (1.0 - d / 2.0) * np.sqrt(prod_terms))


def dispersion(c, z: float, beta: float) -> float:
    """f(z, beta) = z + g(z) - beta * prod q_i(z)."""
    c = check_ratio_vector(c)
    g, gi = _parts_at(c, z)
    q = np.sqrt(np.maximum(1.0 - gi * gi / c, 0.0))
    return float(z + g - beta * np.prod(q))


def compute_beta_s(c, tol: float = 1e-9, edge: float | None = None) -> float:
    """Smallest SNR with a dispersion root right of the support.

    Evaluates the explicit inverse snr(lam) on (edge, edge+10] and takes the
    minimum of the edge limit and the interior fold minimum (golden-section
    refined); warns when the two candidates disagree beyond 1e-6.
    """
    c = check_ratio_vector(c, allow_zero=True)
    if edge is None:
        edge = right_edge(c)

    def val(lam):
        try:
            return snr_of_lambda(c, lam)
        except (BelowEdgeError, FloatingPointError):
            return np.inf

    edge_limit = val(edge + 1e-9)
    lams = edge + np.logspace(-9, 1, 160)
    vals = np.array([val(l) for l in lams])
    i = int(np.nanargmin(vals))
    lo, hi = lams[max(0, i - 1)], lams[min(lams.size - 1, i + 1)]
    # golden-section refinement of the interior minimum
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    x1 = b - invphi * (b - a)
    x2 = a + invphi * (b - a)
    f1, f2 = val(x1), val(x2)
    while b - a > tol:
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - invphi * (b - a)
            f1 = val(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + invphi * (b - a)
            f2 = val(x2)
    fold_min = min(f1, f2, float(np.nanmin(vals)))
    if abs(fold_min - edge_limit) > 1e-6 and fold_min < edge_limit:
        warnings.warn(
            f"interior SNR-threshold fold ({fold_min}) below the edge limit ({edge_limit})",
            RuntimeWarning, stacklevel=2)
    return float(min(edge_limit, fold_min))


def hypercubic_beta_s(d: int) -> tuple[float, float]:
    """Equal-ratio threshold and its alignment:
    beta_s = sqrt((d-1)/d) ((d-2)/(d-1))^{1-d/2}, a(beta_s) = sqrt((d-2)/(d-1))."""
    if d < 3:
        raise ValueError("order must be >= 3")
    beta_s = np.sqrt((d - 1.0) / d) * ((d - 2.0) / (d - 1.0)) ** (1.0 - d / 2.0)
    return float(beta_s), float(np.sqrt((d - 2.0) / (d - 1.0)))


def predict(beta: float, c, edge: float | None = None, beta_s: float | None = None) -> AsymptoticPrediction:
    """Limiting singular value and alignments at SNR `beta` (Algorithm-2 style).

    Interior ratio vectors with d >= 3 only; use :func:`predict_matrix` for
    the matrix case.  Root finding: log-spaced scan of the dispersion on
    (edge, beta+3], rightmost sign change bisected to machine precision.
    """
    c = check_ratio_vector(c)
    if c.size < 3:
        raise ValueError("order must be >= 3 (matrix case via predict_matrix)")
    if beta < 0:
        raise ValueError("beta must be nonnegative")
    if edge is None:
        edge = right_edge(c)
    if beta_s is None:
        beta_s = compute_beta_s(c, edge=edge)

    below = AsymptoticPrediction(
        beta=float(beta), c=tuple(c), lambda_inf=float(edge),
        alignments=np.zeros(c.size), beta_s=float(beta_s),
        right_edge=float(edge), above_threshold=False)
    if beta <= beta_s:
        return below

    lo = edge + 1e-9
    hi = max(beta + 3.0, lo + 1.0)
    zs = lo + np.logspace(-9, np.log10(hi - lo), 60)
    fs = np.array([dispersion(c, z, beta) for z in zs])
    idx = None
    for k in range(zs.size - 1, 0, -1):
        if fs[k - 1] < 0.0 <= fs[k]:
            idx = k
            break
    if idx is None:
        if np.all(fs > 0):
            return below
        raise RuntimeError("dispersion has no bracketable root; widen the scan")
    # bracketed secant (bisection fallback) to machine precision
    a, b = float(zs[idx - 1]), float(zs[idx])
    fa, fb = float(fs[idx - 1]), float(fs[idx])
    for _ in range(80):
        mid = b - fb * (b - a) / (fb - fa) if fb != fa else 0.5 * (a + b)
        if not a < mid < b:
            mid = 0.5 * (a + b)
        fm = dispersion(c, mid, beta)
        if fm < 0.0:
            a, fa = mid, fm
        else:
            b, fb = mid, fm
        if b - a <= 1e-15 * max(1.0, b):
            break
    lam = 0.5 * (a + b)
    q = alignments_at(c, lam)
    return AsymptoticPrediction(
        beta=float(beta), c=tuple(c), lambda_inf=float(lam), alignments=q,
        beta_s=float(beta_s), right_edge=float(edge), above_threshold=True)


# ------------------------------------------------------------------- order 3

CUBIC_BETA_S = 2.0 * np.sqrt(3.0) / 3.0
CUBIC_EDGE = 2.0 * np.sqrt(2.0 / 3.0)


def predict_cubic_d3(beta: float) -> tuple[float, float]:
    """Closed-form (singular value, alignment) for equal ratios at order 3.

    Below the threshold the singular value reported is the support edge and
    the alignment 0; at the threshold the right-limit alignment sqrt(2)/2.
    """
    if beta < 0:
        raise ValueError("beta must be nonnegative")
    if beta < CUBIC_BETA_S:
        return float(CUBIC_EDGE), 0.0
    t = np.sqrt(3.0) * np.sqrt((3.0 * beta ** 2 - 4.0) ** 3) / beta
    lam = np.sqrt(beta ** 2 / 2.0 + 2.0 + t / 18.0)
    align = (np.sqrt(9.0 * beta ** 2 - 12.0 + t) + np.sqrt(9.0 * beta ** 2 + 36.0 + t)) / (6.0 * np.sqrt(2.0) * beta)
    return float(lam), float(align)


def cubic_d3_expansion(beta: float) -> tuple[float, float]:
    """4-term expansions of the order-3 closed forms around the threshold."""
    db = beta - CUBIC_BETA_S
    if db < 0:
        raise ValueError("expansion valid for beta >= threshold")
    lam = (2.0 * np.sqrt(2.0 / 3.0)
           + np.sqrt(2.0) / 4.0 * db
           + np.sqrt(2.0) * 3.0 ** 0.25 / 4.0 * db ** 1.5
           + 3.0 * np.sqrt(6.0) / 64.0 * db ** 2)
    align = (np.sqrt(2.0) / 2.0
             + np.sqrt(2.0) * 3.0 ** 0.25 / 4.0 * np.sqrt(db)
             - np.sqrt(6.0) / 16.0 * db
             - np.sqrt(2.0) * 3.0 ** 0.75 / 16.0 * db ** 1.5
             + 21.0 * np.sqrt(2.0) / 256.0 * db ** 2)
    return float(lam), float(align)


# ---------------------------------------------------------------- matrix case

def matrix_beta_s(c: float) -> float:
    """BBP-type threshold (c (1-c))^{1/4} of the spiked-matrix case."""
    if not 0.0 < c < 1.0:
        raise ValueError("c must be in (0, 1)")
    return float((c * (1.0 - c)) ** 0.25)


def kappa(beta: float, c: float) -> float:
    """Inverse alignment factor of the matrix case.

    Written with eta = c(1-c), which is symmetric in c <-> 1-c, so the x and
    y factors share the bit-identical beta^4 - eta term near the threshold.
    """
    eta = c * (1.0 - c)
    num = beta ** 2 * (beta ** 2 + 1.0) + eta
    den = (beta ** 4 - eta) * (beta ** 2 + 1.0 - c)
    if den <= 0.0:
        raise ValueError(f"kappa undefined at beta={beta}, c={c}")
    return float(beta * np.sqrt(num / den))


def predict_matrix(beta: float, c: float) -> tuple[float, float, float, float]:
    """Matrix-case limits: (singular value, alignment_x, alignment_y, beta_s).

    Above (c(1-c))^{1/4}: lam = sqrt(beta^2 + 1 + c(1-c)/beta^2) and the
    alignments are 1/kappa(beta, c), 1/kappa(beta, 1-c); below, the singular
    value sticks to sqrt(1 + 2 sqrt(c(1-c))) and the alignments vanish.
    """
    if not 0.0 < c < 1.0:
        raise ValueError("c must be in (0, 1)")
    if beta < 0:
        raise ValueError("beta must be nonnegative")
    bs = matrix_beta_s(c)
    _, outer = matrix_case_support(c)
    eta = c * (1.0 - c)
    # beta^4 - eta <= 0 is the exact at-or-below-threshold test; the relative
    # margin absorbs round-off when beta sits within a few ulp of the
    # threshold (the alignments are continuous and -> 0 there anyway)
    if beta <= bs or beta ** 4 - eta <= 1e-12 * eta:
        return float(outer), 0.0, 0.0, bs
    lam = float(np.sqrt(beta ** 2 + 1.0 + eta / beta ** 2))
    return lam, 1.0 / kappa(beta, c), 1.0 / kappa(beta, 1.0 - c), bs


def estimate_snr_from_lambda(lambda_obs: float, c, edge: float | None = None) -> float:
    """SNR consistent with an observed isolated singular value.

    Requires lambda_obs strictly above the support's right edge; raises
    BelowEdgeError otherwise.  Zero ratios (matrix case embedded at order 3)
    are supported through the boundary-safe form of the inverse map.
    """
    c = check_ratio_vector(c, allow_zero=True)
    if edge is None:
        edge = right_edge(c)
    if not lambda_obs > edge:
        raise BelowEdgeError(
            f"lambda={lambda_obs} does not exceed the support edge {edge}; no consistent SNR")
    return snr_of_lambda(c, float(lambda_obs))


def unfolding_threshold(dims) -> float:
    """SNR needed for recovery by unfolding + SVD:
    (prod n_i)^{1/4} / sqrt(sum n_i)."""
    dims = [int(n) for n in dims]
    if len(dims) < 3:
        raise ValueError("unfolding threshold applies to order >= 3")
    if any(n < 1 for n in dims):
        raise ValueError("dimensions must be positive")
    prod = float(np.prod([float(n) for n in dims]))
    return float(prod ** 0.25 / np.sqrt(sum(dims)))


def matrix_case_g(c: float, z: float) -> complex:
    """Convenience re-export of the matrix-case transform."""
    return g_matrix_case(c, z)
