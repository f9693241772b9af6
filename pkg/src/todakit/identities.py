"""Rational and residue identities used as self-checks."""
from __future__ import annotations

import numpy as np
from numpy.polynomial import polynomial as P

from .curve import CurveSpec, U, X, ONE, ZERO, lagrange_factor, phi_at_ramification
from .isoflow import first_order_rhs
from .periods import (_w_beta, eval_at_ramification, normalized_holomorphic_basis,
                      third_kind_differential, w_at_ramification_pair)


# ---------------------------------------------------------------- rational

def rat1_residual(x, us) -> float:
    us = np.asarray(us, complex)
    M = len(us)
    lhs = sum(1 / ((x - us[k]) * np.prod(us[k] - np.delete(us, k))) for k in range(M))
    rhs = 1 / np.prod(x - us)
    return abs(lhs - rhs) / max(abs(rhs), 1e-300)


def rat2_residual(x, us, m) -> float:
    """m is 0-based."""
    us = np.asarray(us, complex)
    M = len(us)
    um = us[m]
    pm = np.prod(um - np.delete(us, m))
    lhs = sum(1 / ((us[k] - x) * (us[k] - um) * np.prod(us[k] - np.delete(us, k)))
              for k in range(M) if k != m)
    rhs = (np.sum(1 / (um - np.delete(us, m))) / ((um - x) * pm)
           + 1 / ((um - x) * np.prod(x - us)) + 1 / ((um - x) ** 2 * pm))
    return abs(lhs - rhs) / max(abs(rhs), abs(lhs), 1e-300)


def random_rational_checks(rng: np.random.Generator, n=100):
    """Worst relative residuals of rat1 / rat2 over n random instances."""
    w1 = w2 = 0.0
    for _ in range(n):
        M = int(rng.integers(1, 7))
        us = rng.normal(size=M) + 1j * rng.normal(size=M)
        x = complex(rng.normal(), rng.normal())
        w1 = max(w1, rat1_residual(x, us))
        w2 = max(w2, rat2_residual(x, us, int(rng.integers(0, M))))
    return w1, w2


# ---------------------------------------------------------------- residues

def _others_poly(curve: CurveSpec, b):
    pts = curve.branch_points
    return P.polyfromroots(np.delete(pts, curve.slot(b)))


def _log_pole_coeff(num, den, a):
    """Coefficient of 1/(u-a) in num / ((u-a)^2 den), den(a) != 0."""
    dn, dd = P.polyval(a, P.polyder(num)), P.polyval(a, P.polyder(den))
    n0, d0 = P.polyval(a, num), P.polyval(a, den)
    return (dn * d0 - n0 * dd) / d0 ** 2


def residue_omega_phi(curve: CurveSpec, diff, b) -> complex:
    """res_{P_b} Omega phi / ((u - a_b) du) = 2 (p / D_b)'(a_b)."""
    return complex(2 * _log_pole_coeff(diff.coeffs, _others_poly(curve, b), curve.position(b)))


def residue_omega_w(curve: CurveSpec, diff, b, periods=None) -> complex:
    """res_{P_b} Omega(P) W(P, P_b) / du."""
    periods = periods or normalized_holomorphic_basis(curve)
    a = curve.position(b)
    D = _others_poly(curve, b)
    beta, _ = _w_beta(curve, b)
    hol = P.polyval(a, periods.omega.T) @ beta
    val = _log_pole_coeff(diff.coeffs, D, a) - P.polyval(a, diff.coeffs) * hol / P.polyval(a, D)
    return complex(2 * val / phi_at_ramification(curve, b))


def residue_identities(curve: CurveSpec, alpha=None) -> dict:
    """Worst absolute residuals of the four residue identities (and res_main)."""
    g = curve.genus
    diff = third_kind_differential(curve, alpha)
    periods = normalized_holomorphic_basis(curve)
    ids = curve.branch_ids
    om = {b: eval_at_ramification(curve, diff, b) for b in ids}
    ph = {b: phi_at_ramification(curve, b) for b in ids}
    D = first_order_rhs(curve, diff=diff)
    x, u = np.array(curve.x), np.array(curve.u)
    out = {"res3": 0.0, "res4": 0.0, "res5": 0.0, "res6": 0.0, "res_main": 0.0}
    for m in range(1, g + 1):
        um = U(m)
        a_m = curve.position(um)
        rest = [b for b in ids if b != um]
        r3 = 0.5 * sum(om[b] * ph[b] / (curve.position(b) - a_m) for b in rest)
        r3 += residue_omega_phi(curve, diff, um)
        r4 = 0.5 * sum(om[b] * w_at_ramification_pair(curve, b, um, periods) for b in rest)
        r4 += residue_omega_w(curve, diff, um, periods)

        def vm(b):
            return ph[b] * lagrange_factor(curve, m, curve.position(b)) / ph[um]

        xs = [X(i) for i in range(1, g + 1)]
        r5 = om[ZERO] * vm(ZERO) + om[ONE] * vm(ONE) + sum(om[b] * vm(b) for b in xs) + om[um]
        r6 = om[ONE] * vm(ONE) + sum(curve.position(b) * om[b] * vm(b) for b in xs) + a_m * om[um]
        scale = max(1.0, max(abs(v) for v in om.values()))
        out["res3"] = max(out["res3"], abs(r3) / scale)
        out["res4"] = max(out["res4"], abs(r4) / scale)
        out["res5"] = max(out["res5"], abs(r5) / scale)
        out["res6"] = max(out["res6"], abs(r6) / scale)
        lhs = residue_omega_phi(curve, diff, um) / (om[um] * ph[um])
        out["res_main"] = max(out["res_main"], abs(lhs - res_main_rhs(x, u, D, m - 1)))
    return out


def res_main_rhs(x, u, D, m) -> complex:
    """Rational right hand side for the normalised residue at P_{u_m} (m 0-based)."""
    g = len(x)
    um = u[m]
    om = np.delete(np.arange(g), m)
    pm = np.prod(um - u[om])
    s = np.sum(D[m])
    val = 0.5 * sum(D[m, j] * pm / np.prod(x[j] - u) for j in range(g))
    val += 0.5 * (s - 1) * np.sum(1 / (um - u[om]))
    val += (s - 1) / (2 * um)
    val += (np.sum(x * D[m]) / um - 1) / (2 * (um - 1))
    for j in om:
        pj = np.prod(u[j] - np.delete(u, j))
        val += 0.5 * sum(D[m, i] * (1 / (um - u[j]) - 1 / (x[i] - u[j])) for i in range(g)) * pm / pj
    return val
