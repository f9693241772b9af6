"""Periods, normalised differentials and Abel integrals.

Cycles.  a_j loops around the j-th gap (u_{j-1}, x_j) (u_0 = 1) and b_j runs
clockwise around the bands [0, 1], [x_1, u_1], ..., [x_{j-1}, u_{j-1}] on the
'+' sheet, so a_k . b_j = delta_kj.  In terms of integrals along the real axis
(with the upper boundary value of v)

    oint_{a_j} = -2 int_gap_j,        oint_{b_j} = 2 sum_{l < j} int_band_l.

Every segment integral between consecutive branch points is computed with
u = mid + half cos(theta), which removes both inverse square root endpoint
singularities; the resulting smooth periodic integrand is summed with a
Gauss-Chebyshev rule on a doubling ladder of node counts.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from numpy.polynomial import polynomial as P

from .curve import CurveSpec, BranchId, phi_at_ramification
from .errors import (CoincidentPoints, DimensionMismatch, PeriodInvariantViolation,
                     QuadratureNotConverged, SingularPeriodMatrix)

LADDER = tuple(32 * 2 ** k for k in range(8))  # 32 .. 4096
DEFAULT_TOL = 1e-10
COND_LIMIT = 1e12


# ---------------------------------------------------------------- quadrature

@lru_cache(maxsize=None)
def _cheb_cos(n):
    return np.cos((2 * np.arange(1, n + 1) - 1) * np.pi / (2 * n))


@lru_cache(maxsize=None)
def _legendre(n):
    return np.polynomial.legendre.leggauss(n)


def _ladder(evaluate, tol, what):
    """Run evaluate(n) on the node ladder until two rungs agree."""
    prev = evaluate(LADDER[0])
    for n in LADDER[1:]:
        cur = evaluate(n)
        scale = max(1.0, float(np.max(np.abs(cur))))
        if np.max(np.abs(cur - prev)) <= tol * scale:
            return cur
        prev = cur
    raise QuadratureNotConverged(
        f"{what}: no agreement to {tol:g} with {LADDER[-1]} nodes")


def chebyshev_endpoint_integral(f, lo, hi, tol=DEFAULT_TOL):
    """int_lo^hi f(u) du / sqrt((u - lo)(hi - u)) for smooth f."""
    mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
    return _ladder(lambda n: np.pi / n * np.sum(f(mid + half * _cheb_cos(n)), axis=-1),
                   tol, "endpoint integral")


def _as_poly_matrix(polys):
    c = np.atleast_2d(np.asarray(polys, dtype=complex))
    return c


def segment_integrals(curve: CurveSpec, s: int, polys, absolute=False,
                      tol=DEFAULT_TOL):
    """int over segment [b_s, b_{s+1}] of p(u) du / v for each row p of polys.

    With absolute=True the denominator is sqrt|Delta| instead of v.
    """
    pts = curve.branch_points
    if not 0 <= s < len(pts) - 1:
        raise DimensionMismatch(f"segment {s} out of range")
    lo, hi = pts[s], pts[s + 1]
    rest = np.delete(pts, [s, s + 1])
    c = _as_poly_matrix(polys)

    def f(u):
        r = np.prod(np.sqrt(np.abs(u[None, :] - rest[:, None])), axis=0)
        return P.polyval(u, c.T) / r

    val = chebyshev_endpoint_integral(f, lo, hi, tol)
    if not absolute:
        k = len(pts) - 1 - s  # branch points to the right of the segment
        val = val / (1j ** k)
    return val


def cut_integral(curve: CurveSpec, poly, interval, absolute=False, tol=DEFAULT_TOL):
    """int_interval p(u) du / v between two consecutive branch points."""
    pts = curve.branch_points
    lo, hi = interval
    s = int(np.argmin(np.abs(pts - lo)))
    if s + 1 >= len(pts) or abs(pts[s] - lo) > 1e-12 or abs(pts[s + 1] - hi) > 1e-12:
        raise DimensionMismatch(
            f"interval {interval} is not between consecutive branch points")
    out = segment_integrals(curve, s, poly, absolute, tol)
    return complex(out[0]) if np.ndim(poly) == 1 else out


@lru_cache(maxsize=256)
def monomial_periods(curve: CurveSpec, degree: int, tol=DEFAULT_TOL):
    """a- and b-periods of u^k du / v, k = 0..degree, as g x (degree+1) arrays."""
    g = curve.genus
    mono = np.eye(degree + 1)
    seg = np.array([segment_integrals(curve, s, mono, tol=tol)
                    for s in range(2 * g + 1)])
    A = np.array([-2 * seg[2 * j - 1] for j in range(1, g + 1)])
    B = 2 * np.cumsum(seg[0::2], axis=0)[:g]
    return A, B


def tail_integral(curve: CurveSpec, polys, tol=DEFAULT_TOL):
    """int_{u_g}^inf p(u) du / v on the '+' sheet, deg p <= g - 1.

    u = u_g + c tan^2(phi) turns the endpoint square root and the infinite
    range into an analytic integrand on [0, pi/2].
    """
    pts = curve.branch_points
    ug = pts[-1]
    rest = pts[:-1]
    c = _as_poly_matrix(polys)
    if c.shape[1] > curve.genus:
        raise DimensionMismatch("tail integral diverges for deg p >= g")
    scale = ug - pts[-2]

    def evaluate(n):
        t, w = _legendre(n)
        phi = np.pi / 4 * (t + 1)
        cphi = np.cos(phi)
        tan = np.sin(phi) / cphi
        u = ug + scale * tan ** 2
        r = np.prod(np.sqrt(u[None, :] - rest[:, None]), axis=0)
        jac = 2 * np.sqrt(scale) / cphi ** 2
        vals = P.polyval(u, c.T) * jac / r
        return np.pi / 4 * np.sum(w * vals, axis=-1)

    return _ladder(evaluate, tol, "tail integral")


# ---------------------------------------------------------------- period data

@dataclass(frozen=True, eq=False)
class PeriodData:
    curve: CurveSpec
    omega: np.ndarray      # row k: ascending coefficients of omega_k (times du/v)
    riemann: np.ndarray    # B_jk = oint_{b_j} omega_k
    abel: np.ndarray       # int_{inf-}^{inf+} omega along the real axis
    a_mono: np.ndarray = field(repr=False)

    def to_json(self) -> dict:
        return {
            "curve": self.curve.to_json(),
            "omega": _cjson(self.omega),
            "riemann": _cjson(self.riemann),
            "abel": _cjson(self.abel),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)


def _cjson(a):
    a = np.asarray(a, dtype=complex)
    if a.ndim == 0:
        return [float(a.real), float(a.imag)]
    return [_cjson(x) for x in a]


def _solve(M, rhs, what):
    cond = np.linalg.cond(M)
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise SingularPeriodMatrix(f"{what}: condition number {cond:.3g}")
    return np.linalg.solve(M, rhs)


def check_riemann(B, tol=1e-8):
    scale = max(1.0, float(np.max(np.abs(B))))
    if np.max(np.abs(B - B.T)) > tol * scale:
        raise PeriodInvariantViolation("Riemann matrix is not symmetric")
    im = 0.5 * (B.imag + B.imag.T)
    if np.min(np.linalg.eigvalsh(im)) <= 0:
        raise PeriodInvariantViolation("imaginary part is not positive definite")


@lru_cache(maxsize=256)
def normalized_holomorphic_basis(curve: CurveSpec, tol=DEFAULT_TOL) -> PeriodData:
    g = curve.genus
    A, B = monomial_periods(curve, g - 1, tol)
    # omega_k = sum_l C[k, l] u^l du/v with oint_{a_j} omega_k = delta_jk
    C = _solve(A, np.eye(g), "a-period matrix").T
    riemann = B @ C.T
    check_riemann(riemann)
    abel = 2 * C @ tail_integral(curve, np.eye(g), tol)
    return PeriodData(curve, C, riemann, abel, A)


def abel_between_infinities(curve: CurveSpec, periods: PeriodData | None = None):
    periods = periods or normalized_holomorphic_basis(curve)
    return periods.abel


def abel_decompose(B, abel):
    """Split abel = M1 + B M2 with real M1, M2."""
    M2 = np.linalg.solve(B.imag, np.imag(abel))
    M1 = np.real(abel) - B.real @ M2
    return M1, M2


# ---------------------------------------------------------------- differentials

@dataclass(frozen=True, eq=False)
class DifferentialRep:
    """p(u) du / v with ascending coefficient vector p."""

    coeffs: np.ndarray
    kind: str = "third"

    def __call__(self, u):
        return P.polyval(u, self.coeffs)

    def scaled(self, c) -> "DifferentialRep":
        return DifferentialRep(np.asarray(self.coeffs) * c, self.kind)


def _alpha_vec(curve, alpha):
    g = curve.genus
    if alpha is None:
        return np.zeros(g, dtype=complex)
    a = np.atleast_1d(np.asarray(alpha, dtype=complex))
    if a.shape != (g,):
        raise DimensionMismatch(f"alpha needs {g} entries")
    return a


def third_kind_differential(curve: CurveSpec, alpha=None, periods=None,
                            tol=DEFAULT_TOL) -> DifferentialRep:
    """Omega_alpha = -(u^g + ...) du / v, residue +1 at inf+, a-periods -alpha."""
    g = curve.genus
    a = _alpha_vec(curve, alpha)
    A, _ = monomial_periods(curve, g, tol)
    # sum_{l<g} c_l A[:, l] - A[:, g] = -alpha
    low = _solve(A[:, :g], A[:, g] - a, "a-period matrix")
    return DifferentialRep(np.concatenate([low, [-1.0]]).astype(complex), "third")


def second_kind_differential(curve: CurveSpec, tol=DEFAULT_TOL) -> DifferentialRep:
    """(u^{g+1}/2 + ...) du / v: principal part d(u/2) at inf+, zero residues
    and zero a-periods."""
    g = curve.genus
    A, _ = monomial_periods(curve, g + 1, tol)
    cg = -np.sum(curve.branch_points) / 4
    rhs = -(0.5 * A[:, g + 1] + cg * A[:, g])
    low = _solve(A[:, :g], rhs, "a-period matrix")
    return DifferentialRep(np.concatenate([low, [cg, 0.5]]).astype(complex), "second")


def differential_periods(curve: CurveSpec, diff: DifferentialRep, tol=DEFAULT_TOL):
    """(a-periods, b-periods) of p du / v."""
    c = np.asarray(diff.coeffs, dtype=complex)
    A, B = monomial_periods(curve, len(c) - 1, tol)
    return A @ c, B @ c


def eval_at_ramification(curve: CurveSpec, diff, b: BranchId) -> complex:
    coeffs = diff.coeffs if isinstance(diff, DifferentialRep) else diff
    return complex(P.polyval(curve.position(b), coeffs) * phi_at_ramification(curve, b))


eval_third_kind_at_ramification = eval_at_ramification


def holomorphic_at_ramification(curve: CurveSpec, b: BranchId, periods=None):
    """Vector omega_k(P_b), k = 1..g."""
    periods = periods or normalized_holomorphic_basis(curve)
    return P.polyval(curve.position(b), periods.omega.T) * phi_at_ramification(curve, b)


# ---------------------------------------------------------------- W(P, Q)

def _reduced_pole_poly(curve: CurveSpec, b: BranchId):
    """r with du/((u - a) v) = r du / v + exact, a = position of b.

    Writing Delta = (u - a) D(u):  D(a) du/((u-a) v) = (D' - T) du/v - 2 d(v/(u-a)),
    T = (D(u) - D(a)) / (u - a).
    """
    pts = curve.branch_points
    s = curve.slot(b)
    D = P.polyfromroots(np.delete(pts, s))
    a = pts[s]
    T, _ = P.polydiv(P.polysub(D, [P.polyval(a, D)]), [-a, 1.0])
    r = P.polysub(P.polyder(D), T)
    return r / P.polyval(a, D)


@lru_cache(maxsize=1024)
def _w_beta(curve: CurveSpec, b: BranchId, tol=DEFAULT_TOL):
    """a-periods of du/((u - a_b) v); W(., P_b) = (du/((u-a_b)v) - sum beta_k omega_k)/phi_b."""
    r = _reduced_pole_poly(curve, b)
    A, B = monomial_periods(curve, len(r) - 1, tol)
    return A @ r, B @ r


def w_b_periods(curve: CurveSpec, b: BranchId, periods=None):
    """b-periods of W(., P_b); they should equal 2 pi i omega(P_b)."""
    periods = periods or normalized_holomorphic_basis(curve)
    beta, bper = _w_beta(curve, b)
    return (bper - periods.riemann @ beta) / phi_at_ramification(curve, b)


def w_at_ramification_pair(curve: CurveSpec, p: BranchId, q: BranchId, periods=None) -> complex:
    """W(P_p, P_q) for distinct ramification points."""
    if p == q:
        raise CoincidentPoints(f"W is singular on the diagonal ({p})")
    periods = periods or normalized_holomorphic_basis(curve)
    beta, _ = _w_beta(curve, q)
    ap, aq = curve.position(p), curve.position(q)
    hol = P.polyval(ap, periods.omega.T)
    val = 1.0 / (ap - aq) - hol @ beta
    return complex(val * phi_at_ramification(curve, p) / phi_at_ramification(curve, q))


# ---------------------------------------------------------------- real paths

def _partial_from_branch(curve: CurveSpec, polys, e_slot, z, tol):
    """int from branch point e to real z (same segment) of p du / v."""
    pts = curve.branch_points
    e = pts[e_slot]
    rest = np.delete(pts, e_slot)
    c = _as_poly_matrix(polys)
    k = int(np.sum(pts > 0.5 * (e + z)))
    span = z - e

    def evaluate(n):
        t, w = _legendre(n)
        t = 0.5 * (t + 1)
        uu = e + span * t ** 2
        r = np.prod(np.sqrt(np.abs(uu[None, :] - rest[:, None])), axis=0)
        return 0.5 * np.sum(w * P.polyval(uu, c.T) / r, axis=-1)

    val = _ladder(evaluate, tol, "partial segment")
    return 2 * np.sign(span) * np.sqrt(abs(span)) * val / (1j ** k)


def real_path_integral(curve: CurveSpec, polys, z: float, tol=DEFAULT_TOL):
    """int_0^z p du / v along the real axis, upper side of the bands."""
    pts = curve.branch_points
    c = _as_poly_matrix(polys)
    if z == 0:
        return np.zeros(c.shape[0], complex)
    if z < 0:
        return _partial_from_branch(curve, c, 0, z, tol)
    s = int(np.searchsorted(pts, z, side="right")) - 1   # z in [pts[s], pts[s+1])
    full = np.zeros(c.shape[0], complex)
    for j in range(s):
        full = full + segment_integrals(curve, j, c, tol=tol)
    if pts[s] == z:
        return full
    if s == len(pts) - 1 or z - pts[s] <= pts[s + 1] - z:
        return full + _partial_from_branch(curve, c, s, z, tol)
    full = full + segment_integrals(curve, s, c, tol=tol)
    return full + _partial_from_branch(curve, c, s + 1, z, tol)
