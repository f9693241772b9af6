"""Pell equation P^2 - Delta Q^2 = 1 on rational-measure supports.

When every band carries measure k_j / N the function cosh(N int_0^z Omega_0)
is a polynomial of degree N (the Chebyshev polynomial of the support).  It is
sampled at Chebyshev nodes, interpolated, and Q is recovered from
(P^2 - 1) / Delta by an exact polynomial square root.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import Chebyshev, Polynomial
from numpy.polynomial import polynomial as P

from .curve import CurveSpec, build_curve
from .equilibrium import equilibrium_measures, rational_measure_detect
from .errors import (InputError, NegativeEndpoint, NotPerfectSquare, NotRational,
                     ParityViolation)
from .periods import real_path_integral, third_kind_differential

MEASURE_TOL = 1e-8


# ---------------------------------------------------------------- polynomial helpers

def trim(c, rel=1e-13):
    c = np.asarray(c, float)
    scale = max(np.max(np.abs(c)), 1e-300)
    n = len(c)
    while n > 1 and abs(c[n - 1]) <= rel * scale:
        n -= 1
    return c[:n]


def poly_sqrt(c, rel_tol=1e-8) -> np.ndarray:
    """Q with Q^2 = c (ascending coefficients), positive leading coefficient."""
    c = trim(c)
    deg = len(c) - 1
    if deg % 2 or c[-1] <= 0:
        raise NotPerfectSquare(f"degree {deg} / leading {c[-1]:.3g} is not a square")
    m = deg // 2
    a = c[::-1]
    q = np.zeros(m + 1)
    q[0] = np.sqrt(a[0])
    for i in range(1, m + 1):
        q[i] = (a[i] - np.dot(q[1:i], q[i - 1:0:-1])) / (2 * q[0])
    Q = q[::-1]
    err = np.max(np.abs(P.polysub(P.polymul(Q, Q), c)))
    if err > rel_tol * np.max(np.abs(c)):
        raise NotPerfectSquare(f"square root residual {err:.3g}")
    return Q


def exact_quotient(num, den, rel_tol=1e-8):
    q, r = P.polydiv(num, den)
    if np.max(np.abs(r)) > rel_tol * max(1.0, np.max(np.abs(num))):
        raise NotPerfectSquare("division left a remainder")
    return q


def sturm_count(p, a, b) -> int:
    """Number of distinct real roots of p in (a, b]."""
    p = trim(p)
    if len(p) < 2:
        return 0
    seq = [p, trim(P.polyder(p))]
    while len(seq[-1]) > 1 or abs(seq[-1][0]) > 0:
        _, r = P.polydiv(seq[-2], seq[-1])
        r = -trim(r, 1e-10)
        if len(r) == 1 and abs(r[0]) <= 1e-12 * np.max(np.abs(seq[-2])):
            break
        seq.append(r)
        if len(r) == 1:
            break

    def changes(t):
        s = [np.sign(P.polyval(t, q)) for q in seq]
        s = [v for v in s if v != 0]
        return sum(1 for u, v in zip(s, s[1:]) if u != v)

    return changes(a) - changes(b)


def _bands(support):
    if isinstance(support, CurveSpec):
        pts = support.branch_points
        return [(pts[2 * l], pts[2 * l + 1]) for l in range(support.genus + 1)]
    return [tuple(map(float, iv)) for iv in support]


def signature_of(Pc, support) -> tuple:
    """Number of critical points of P strictly inside each band."""
    dp = P.polyder(np.asarray(Pc, float))
    out = []
    for lo, hi in _bands(support):
        n = sturm_count(dp, lo, hi)
        if abs(P.polyval(hi, dp)) < 1e-12 * max(1.0, np.max(np.abs(dp))):
            n -= 1  # root sitting on the endpoint
        out.append(n)
    return tuple(out)


def pell_residual(Pc, Qc, delta, grid=None, rhs=1.0) -> float:
    """max |P^2 - Delta Q^2 - rhs| / max(1, max P^2) on a grid."""
    if isinstance(delta, CurveSpec):
        pts = delta.branch_points
        delta = P.polyfromroots(pts)
    if grid is None:
        roots = np.real(P.polyroots(delta)) if len(delta) > 1 else np.array([0.0])
        lo, hi = roots.min() - 0.1, roots.max() + 0.1
        grid = np.linspace(lo, hi, 513)
    p2 = P.polyval(grid, Pc) ** 2
    res = p2 - P.polyval(grid, delta) * P.polyval(grid, Qc) ** 2 - rhs
    return float(np.max(np.abs(res)) / max(1.0, np.max(p2)))


# ---------------------------------------------------------------- certificate

@dataclass(frozen=True, eq=False)
class PellCertificate:
    N: int
    k: tuple
    P: np.ndarray
    Q: np.ndarray
    residual: float
    signature: tuple

    def to_json(self):
        return {"N": self.N, "k": list(self.k), "P": [float(t) for t in self.P],
                "Q": [float(t) for t in self.Q], "residual": self.residual,
                "signature": list(self.signature)}


def _check_rational(curve, N, k):
    rho = equilibrium_measures(curve)
    if k is None:
        det = rational_measure_detect(rho, MEASURE_TOL, N)
        if det is None or N % det.N:
            raise NotRational(f"measures {rho} are not multiples of 1/{N}")
        k = tuple(int(t) * (N // det.N) for t in det.k)
    k = tuple(int(t) for t in k)
    if len(k) != curve.genus + 1 or sum(k) != N:
        raise InputError(f"k must have {curve.genus + 1} entries summing to N")
    if np.max(np.abs(rho - np.array(k) / N)) > MEASURE_TOL:
        raise NotRational(f"measures {rho} differ from {k}/{N}")
    return k


def chebyshev_from_curve(curve: CurveSpec, N: int, k=None) -> PellCertificate:
    k = _check_rational(curve, N, k)
    q = third_kind_differential(curve).coeffs.real
    lo, hi = -0.1, curve.u[-1] + 0.1
    t = np.cos((2 * np.arange(N + 1) + 1) * np.pi / (2 * N + 2))
    z = 0.5 * (lo + hi) + 0.5 * (hi - lo) * t
    vals = np.array([np.cosh(N * real_path_integral(curve, q, zz)[0]) for zz in z])
    if np.max(np.abs(vals.imag)) > 1e-8 * np.max(np.abs(vals)):
        raise NotRational("sampled Chebyshev values are not real")
    cheb = Chebyshev.fit(z, vals.real, N, domain=[lo, hi])
    Pc = cheb.convert(kind=Polynomial).coef
    Pc = np.concatenate([Pc, np.zeros(N + 1 - len(Pc))])
    if Pc[-1] < 0:
        Pc = -Pc
    delta = P.polyfromroots(curve.branch_points)
    Q2 = exact_quotient(P.polysub(P.polymul(Pc, Pc), [1.0]), delta, 1e-6)
    Qc = poly_sqrt(Q2, 1e-6)
    return PellCertificate(N, k, Pc, Qc, pell_residual(Pc, Qc, delta),
                           signature_of(Pc, curve))


def curve_from_support(intervals):
    """Affine map z -> (z - z0)/(z1 - z0) sending the first band to [0, 1]."""
    iv = sorted(tuple(map(float, t)) for t in intervals)
    z0, z1 = iv[0]
    L = z1 - z0
    rest = [((a - z0) / L, (b - z0) / L) for a, b in iv[1:]]
    curve = build_curve(len(rest), [a for a, _ in rest], [b for _, b in rest])
    return curve, (z0, L)


def chebyshev_on_support(intervals, N, k=None) -> PellCertificate:
    """Certificate in the original coordinate with monic Delta(z)."""
    curve, (z0, L) = curve_from_support(intervals)
    cu = chebyshev_from_curve(curve, N, k)
    Pz = Polynomial(cu.P)(Polynomial([-z0 / L, 1.0 / L])).coef
    ends = [t for iv in intervals for t in iv]
    delta = P.polyfromroots(ends)
    Qz = poly_sqrt(exact_quotient(P.polysub(P.polymul(Pz, Pz), [1.0]), delta, 1e-6), 1e-6)
    return PellCertificate(N, cu.k, Pz, Qz, pell_residual(Pz, Qz, delta),
                           signature_of(Pz, intervals))


# ---------------------------------------------------------------- parity

@dataclass(frozen=True, eq=False)
class ParityReduction:
    p_hat: np.ndarray
    q_hat: np.ndarray | None
    residual: float | None
    p_tilde: np.ndarray | None = None


def _split_parity(Pc, keep, tol):
    Pc = np.asarray(Pc, float)
    bad = Pc[1 - keep::2]
    if np.max(np.abs(bad), initial=0.0) > tol * np.max(np.abs(Pc)):
        raise ParityViolation("polynomial lacks the required parity")
    return Pc[keep::2].copy()


def parity_reduce(Pc, w_roots=None, tol=1e-12) -> ParityReduction:
    """Even P(z) = p_hat(z^2); with w_roots also q_hat for p_hat^2 - D q_hat^2 = 1."""
    ph = _split_parity(Pc, 0, tol)
    if w_roots is None:
        return ParityReduction(ph, None, None)
    D = P.polyfromroots(w_roots)
    qh = poly_sqrt(exact_quotient(P.polysub(P.polymul(ph, ph), [1.0]), D))
    return ParityReduction(ph, qh, pell_residual(ph, qh, D))


def parity_reduce_odd(Pc, w_roots, tol=1e-12) -> ParityReduction:
    """Odd P(z) = z p_hat(z^2): w p_hat^2 - prod(w - r) q_hat^2 = 1."""
    ph = _split_parity(Pc, 1, tol)
    D = P.polyfromroots(w_roots)
    wp2 = P.polymulx(P.polymul(ph, ph))
    qh = poly_sqrt(exact_quotient(P.polysub(wp2, [1.0]), D))
    grid = np.linspace(min(0.0, min(w_roots)) - 0.1, max(w_roots) + 0.1, 513)
    wp2_val = P.polyval(grid, wp2)
    res = np.max(np.abs(wp2_val - P.polyval(grid, D) * P.polyval(grid, qh) ** 2 - 1))
    res /= max(1.0, np.max(np.abs(wp2_val)))
    p_tilde = P.polysub(2 * wp2, [1.0])
    return ParityReduction(ph, qh, float(res), p_tilde)


def symmetric_lift(half, includes_zero=False):
    """Lift w-intervals to symmetric z-intervals via z = +- sqrt(w)."""
    half = sorted(tuple(map(float, t)) for t in half)
    if any(a < 0 for a, _ in half):
        raise NegativeEndpoint("w-intervals must lie in [0, inf)")
    out = []
    for j, (a, b) in enumerate(half):
        if j == 0 and includes_zero:
            if a != 0:
                raise InputError("first interval must start at 0 when includes_zero")
            out.append((-np.sqrt(b), np.sqrt(b)))
        else:
            out += [(-np.sqrt(b), -np.sqrt(a)), (np.sqrt(a), np.sqrt(b))]
    return sorted(out)
