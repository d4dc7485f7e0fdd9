"""Limiting Stieltjes transforms: fixed-point solver, closed forms, densities, edges.

The limiting spectral measure of the normalised block-contraction matrix is
characterised by g(z) = sum_i g_i(z) with each part solving the coupled
quadratic g_i^2 - (g+z) g_i - c_i = 0, where c_i are the asymptotic dimension
ratios.  The production solver iterates the equivalent pole form
g_i <- -c_i / (z + g - g_i) with a Newton accelerator (smooth in the parts,
no square-root branch to pick); for complex z it ladders the imaginary part
down from O(1) so the Herglotz branch is followed by continuation.  The
square-root update written in the plain iteration is kept verbatim as
``plain_real_iteration`` because its convergence/divergence is the signal the
support-edge detector uses.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels


class DomainError(ValueError):
    """Evaluation point inside the support (or otherwise out of domain)."""


def check_ratio_vector(c, allow_zero: bool = False) -> np.ndarray:
    c = np.asarray(c, dtype=np.float64)
    if c.ndim != 1 or c.size < 2:
        raise ValueError("ratio vector must be 1-D with length >= 2")
    if np.any(c < 0) or np.any(c > 1):
        raise ValueError("ratios must lie in [0, 1]")
    if abs(c.sum() - 1.0) > 1e-12:
        raise ValueError(f"ratios must sum to 1 (got {c.sum()!r})")
    if not allow_zero and np.any(c == 0):
        raise ValueError("zero ratios only allowed on the matrix-case route")
    return c


@dataclass(frozen=True)
class StieltjesSolution:
    z: complex
    g: complex
    g_parts: np.ndarray
    iterations: int
    converged: bool
    residual: float


def _parts_residual(gi, z, c):
    w = z + gi.sum()
    denom = w - gi
    with np.errstate(all="ignore"):
        target = np.where(c > 0, -c / np.where(denom == 0, np.inf, denom), 0.0)
    return target - gi


def _solve_parts(c, z, gi0, tol, max_iter):
    """Damped pole-form iteration with Newton steps on the d-dim system."""
    cplx = isinstance(z, complex)
    gi = gi0.astype(complex if cplx else float)
    it = 0
    for it in range(1, max_iter + 1):
        r = _parts_residual(gi, z, c)
        rn = float(np.max(np.abs(r)))
        if not np.isfinite(rn):
            gi = gi * 0.5
            continue
        if rn <= tol:
            return gi, True, it
        # Newton on R_i = -c_i/(w - g_i) - g_i: the Jacobian is
        # a_i (11^T - I) - I with a_i = c_i/(w-g_i)^2, solvable in O(d).
        w = z + gi.sum()
        denom = w - gi
        with np.errstate(all="ignore"):
            a = np.where(c > 0, c / (denom * denom), 0.0)
            den1 = 1.0 + a
            coef = 1.0 - np.sum(a / den1)
        stepped = False
        if np.isfinite(abs(coef)) and abs(coef) > 1e-300:
            s = np.sum(r / den1) / coef
            delta = (a * s + r) / den1
            gin = gi + delta
            if not (cplx and z.imag > 0 and (z + gin.sum()).imag <= 0):
                rn_new = float(np.max(np.abs(_parts_residual(gin, z, c))))
                if np.isfinite(rn_new) and rn_new <= rn:
                    gi = gin
                    stepped = True
        if not stepped:
            gi = gi + 0.5 * r
    return gi, False, it


def solve_fixed_point(c, z, tol: float = 1e-13, max_iter: int = 500) -> StieltjesSolution:
    """Limiting Stieltjes transform at z (complex with Im z > 0, or real
    outside the support).

    Real z inside the support does not admit the Herglotz solution; the
    returned object then carries converged=False.
    """
    c = check_ratio_vector(c, allow_zero=True)
    if np.iscomplexobj(np.asarray(z)) and np.imag(z) != 0:
        z = complex(z)
        if z.imag < 0:
            raise ValueError("use Im z >= 0 (transform of the conjugate otherwise)")
        eps = z.imag
        gi = np.zeros(c.size, dtype=complex)
        e = max(1.0, eps)
        total = 0
        while True:
            gi, ok, it = _solve_parts(c, complex(z.real, e), gi, tol, max_iter)
            total += it
            if e <= eps:
                break
            e = max(eps, e / 8.0)
        g = gi.sum()
        res = float(np.max(np.abs(_parts_residual(gi, z, c))))
        return StieltjesSolution(z=z, g=g, g_parts=gi, iterations=total,
                                 converged=bool(ok), residual=res)
    zr = float(np.real(z))
    gi, ok, it = _solve_parts(c, zr, np.zeros(c.size), tol, max_iter)
    g = gi.sum()
    res = float(np.max(np.abs(_parts_residual(gi, zr, c))))
    # right of the support the transform of a probability measure is negative,
    # left of it positive; a sign violation means a spurious real root
    if ok and zr > 0 and np.real(g) >= 0:
        ok = False
    if ok and zr < 0 and np.real(g) <= 0:
        ok = False
    return StieltjesSolution(z=complex(zr), g=complex(g), g_parts=gi.astype(complex),
                             iterations=it, converged=bool(ok), residual=res)


def plain_real_iteration(c, z: float, tol: float = 1e-12, max_iter: int = 10000):
    """Square-root-form fixed point on the real axis, as stated:
    g_i <- (g+z)/2 - sqrt(4 c_i + (g+z)^2)/2, g <- sum g_i.

    Damping 0.5 engages after 200 non-monotone steps.  Convergence of this
    iteration is the operational above-the-edge signal; below the edge the
    attracting real root disappears and the iteration drifts or diverges.
    Returns (g, converged, iterations).
    """
    c = check_ratio_vector(c, allow_zero=True)
    return kernels.plain_stieltjes_iteration(c[c > 0], float(z), tol, max_iter)


# ---------------------------------------------------------------- closed forms

def g_cubic_d3(z) -> complex:
    """Order-3 equal-ratios transform: (-3z + 3 sqrt(z^2 - 8/3)) / 4."""
    edge = 2.0 * np.sqrt(2.0 / 3.0)
    return g_semicircle_like(z, edge, lambda zz: (-3.0 * zz + 3.0 * np.sqrt(zz * zz - 8.0 / 3.0 + 0j)) / 4.0)


def g_hypercubic(d: int, z) -> complex:
    """Equal-ratios transform for order d >= 2:
    (-z d + d sqrt(z^2 - 4(d-1)/d)) / (2(d-1))."""
    if d < 2:
        raise ValueError("order must be >= 2")
    edge = 2.0 * np.sqrt((d - 1.0) / d)
    return g_semicircle_like(
        z, edge,
        lambda zz: (-zz * d + d * np.sqrt(zz * zz - 4.0 * (d - 1.0) / d + 0j)) / (2.0 * (d - 1.0)))


def g_semicircle_like(z, edge: float, formula) -> complex:
    """Evaluate a sqrt-branch closed form with the Herglotz branch choice.

    For real |z| > edge the principal square root already lands on the branch
    that decays like -1/z; for Im z > 0 the branch is flipped if needed so
    that Im g > 0.
    """
    zc = complex(z)
    if zc.imag == 0:
        x = zc.real
        if abs(x) <= edge:
            raise DomainError(f"z={x} inside the support [-{edge:.6g}, {edge:.6g}]")
        return complex(formula(complex(x, 0.0)).real)
    val = formula(zc)
    if zc.imag > 0 and val.imag < 0:
        val = val.conjugate()
    return val


def matrix_case_support(c: float) -> tuple[float, float]:
    """(inner, outer) positive support edges of the matrix-case law."""
    eta = c * (1.0 - c)
    return float(np.sqrt(max(1.0 - 2.0 * np.sqrt(eta), 0.0))), float(np.sqrt(1.0 + 2.0 * np.sqrt(eta)))


def g_matrix_case(c: float, z) -> complex:
    """Matrix-case transform -z + sqrt((z^2-1)^2 + 4c(c-1)) / z for ratio c."""
    if not 0.0 < c < 1.0:
        raise ValueError("c must be in (0, 1)")
    inner, outer = matrix_case_support(c)
    zc = complex(z)

    def q(zz):
        return (zz * zz - 1.0) ** 2 + 4.0 * c * (c - 1.0)

    if zc.imag == 0:
        x = zc.real
        if (inner <= abs(x) <= outer) or (x == 0.0 and inner == 0.0):
            raise DomainError(f"z={x} inside the support")
        if x == 0.0:
            raise DomainError("z=0 carries the point mass")
        s = float(np.sqrt(q(complex(x, 0.0)).real))
        # outside the outer edges the principal root is the decaying branch;
        # inside the spectral gap the other root keeps sign(g) = -sign(x)
        if abs(x) < inner:
            s = -s
        return complex(-x + s / x)
    val = -zc + np.sqrt(q(zc)) / zc
    if zc.imag > 0 and val.imag < 0:
        val = -zc - np.sqrt(q(zc)) / zc
    return val


# ------------------------------------------------------------ limiting measures

@dataclass(frozen=True)
class LimitingMeasure:
    """Limiting spectral law: continuous density plus optional atom at zero."""

    kind: str                      # fixed-point-generic | cubic-d3 | hypercubic-d | matrix-c
    density: object                # callable float -> float (continuous part)
    support_min: float
    support_max: float
    atom_at_zero: float = 0.0
    params: tuple = ()
    singular_points: tuple = ()    # density kinks, for quadrature splitting

    def __post_init__(self):
        if self.atom_at_zero < 0:
            raise ValueError("atom weight must be nonnegative")


def cubic_d3_measure() -> LimitingMeasure:
    edge = 2.0 * np.sqrt(2.0 / 3.0)

    def dens(x):
        return 3.0 / (4.0 * np.pi) * np.sqrt(max(8.0 / 3.0 - x * x, 0.0))

    return LimitingMeasure(kind="cubic-d3", density=dens, support_min=-edge,
                           support_max=edge, params=(3,),
                           singular_points=(-edge, edge))


def hypercubic_measure(d: int) -> LimitingMeasure:
    if d < 2:
        raise ValueError("order must be >= 2")
    edge = 2.0 * np.sqrt((d - 1.0) / d)

    def dens(x):
        return d / (2.0 * (d - 1.0) * np.pi) * np.sqrt(max(4.0 * (d - 1.0) / d - x * x, 0.0))

    return LimitingMeasure(kind="hypercubic-d", density=dens, support_min=-edge,
                           support_max=edge, params=(d,),
                           singular_points=(-edge, edge))


def matrix_case_measure(c: float) -> LimitingMeasure:
    """Two-bulk law with weight 1 - 2 min(c, 1-c) at zero."""
    if not 0.0 < c < 1.0:
        raise ValueError("c must be in (0, 1)")
    inner, outer = matrix_case_support(c)
    atom = 1.0 - 2.0 * min(c, 1.0 - c)

    def dens(x):
        q = (x * x - 1.0) ** 2 + 4.0 * c * (c - 1.0)
        if q >= 0.0:
            return 0.0
        if x == 0.0:
            # only reachable when inner == 0 (c = 1/2); continuous limit there
            return float(np.sqrt(2.0) / np.pi)
        return float(np.sqrt(-q) / (np.pi * abs(x)))

    return LimitingMeasure(kind="matrix-c", density=dens, support_min=-outer,
                           support_max=outer, atom_at_zero=atom, params=(c,),
                           singular_points=(-outer, -inner, inner, outer))


def generic_measure(c, epsilon: float = 1e-6) -> LimitingMeasure:
    """Stieltjes-inversion density for arbitrary interior ratios.

    density(x) = Im g(x + i eps) / pi via the fixed-point solver.  The point
    mass at zero (present when max c_i > 1/2) is 2 max(c) - 1.
    """
    c = check_ratio_vector(c, allow_zero=True)
    edge = right_edge(c)
    atom = max(0.0, 2.0 * float(np.max(c)) - 1.0)

    def dens(x):
        if abs(x) > edge + 0.1:
            return 0.0
        sol = solve_fixed_point(c, complex(float(x), epsilon))
        return max(float(sol.g.imag) / np.pi, 0.0)

    return LimitingMeasure(kind="fixed-point-generic", density=dens, support_min=-edge,
                           support_max=edge, atom_at_zero=atom, params=tuple(c),
                           singular_points=(-edge, edge))


def limiting_density(measure: LimitingMeasure, x: float) -> float:
    """Continuous-part density at x (0 outside the support)."""
    return float(measure.density(float(x)))


# ------------------------------------------------------------------ right edge

def _edge_fold_refine(c, z0: float, steps: int = 200) -> float:
    """Solve F(g,z) = g, dF/dg = 1 (the fold where the real solution vanishes).

    2-D Newton in (g, z); near the edge the sum uses w = z + g > 0 so the
    square-root form is branch-safe.
    """
    c = np.asarray(c, dtype=np.float64)
    pos = c > 0
    sol = solve_fixed_point(c, float(z0 + 1e-4))
    g = float(np.real(sol.g))
    z = float(z0)
    for _ in range(steps):
        w = g + z
        s = np.sqrt(4.0 * c[pos] + w * w)
        f = np.sum((w - s) / 2.0)
        df = np.sum(0.5 * (1.0 - w / s))
        d2f = np.sum(-2.0 * c[pos] / s ** 3)
        phi = f - g
        psi = df - 1.0
        det = -d2f
        if not np.isfinite(det) or abs(det) < 1e-300:
            break
        dg = -(d2f * phi - df * psi) / det
        dz = -(-d2f * phi + (df - 1.0) * psi) / det
        g += dg
        z += dz
        if abs(dg) + abs(dz) < 1e-15:
            break
    return float(z)


def right_edge(c, tol: float = 1e-8, bracket: tuple[float, float] = (0.0, 4.0)) -> float:
    """Right edge of the limiting support.

    Operational definition combining two signals: vanishing imaginary part
    of g(z + 1e-9 i) and convergence of the real-axis square-root iteration.
    The bisection runs on the first (cheap) signal; the second is confirmed
    just above the bracket, where its finite iteration budget resolves.  A
    final fold refinement solves the tangency system g = F(g, z),
    dF/dg = 1 to machine precision.
    """
    c = check_ratio_vector(c, allow_zero=True)

    def herglotz_gone(z: float) -> bool:
        # capped budget: points inside the bulk either converge to Im g = O(1)
        # or fail to settle, and both read as "not past the edge"
        sol = solve_fixed_point(c, complex(z, 1e-9), max_iter=150)
        return sol.converged and abs(sol.g.imag) < 1e-6

    lo, hi = bracket
    if not herglotz_gone(hi):
        raise RuntimeError(f"edge predicate never true on bracket {bracket}")
    if herglotz_gone(lo + 1e-12):
        raise RuntimeError("edge predicate true at the left bracket end")
    while hi - lo > max(tol, 1e-6):
        mid = 0.5 * (lo + hi)
        if herglotz_gone(mid):
            hi = mid
        else:
            lo = mid
    _, real_ok, _ = plain_real_iteration(c, hi + 1e-4)
    if not real_ok:
        raise RuntimeError(f"real-axis iteration does not converge just above z={hi}")
    refined = _edge_fold_refine(c, hi)
    if abs(refined - hi) <= 1e-4 and refined > 0:
        return refined
    return 0.5 * (lo + hi)


def measure_for_ratios(c, d: int | None = None) -> LimitingMeasure:
    """Pick the closed form matching the ratio vector, else the generic path."""
    c = np.asarray(c, dtype=np.float64)
    d = d if d is not None else c.size
    if np.allclose(c, 1.0 / d) and c.size == d:
        return cubic_d3_measure() if d == 3 else hypercubic_measure(d)
    zero = c == 0
    if np.count_nonzero(~zero) == 2 and c.size == 3 and zero[2]:
        return matrix_case_measure(float(c[0]))
    return generic_measure(c)
