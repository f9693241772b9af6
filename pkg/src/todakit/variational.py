"""Variational formulas and their finite-difference verification.

Two kinds of derivatives appear:

* Rauch type: one branch point moves, all others are frozen, alpha fixed.
* Family type: x_i moves and u follows the isoperiodic family; the curve at
  x +- h e_i is rebuilt with the Newton corrector.

Each check compares the closed form with a centred difference and reports the
error relative to the largest closed-form value of its group.
"""
from __future__ import annotations

import numpy as np

from .curve import CurveSpec, U, X, phi_at_ramification, v_basis_at_ramification
from .isoflow import bperiods, first_order_rhs, newton_period_corrector
from .periods import (eval_at_ramification, holomorphic_at_ramification,
                      normalized_holomorphic_basis, third_kind_differential,
                      w_at_ramification_pair)

FORMULAS = ("rauch_riemann", "rauch_omega", "self_shift", "omega_at_fixed",
            "omega_at_u", "omega_at_x", "phi_derivatives", "v_derivatives")


def _tables(curve, alpha):
    diff = third_kind_differential(curve, alpha)
    ids = curve.branch_ids
    om = {b: eval_at_ramification(curve, diff, b) for b in ids}
    ph = {b: phi_at_ramification(curve, b) for b in ids}
    return om, ph


def _movable(curve):
    return [b for b in curve.branch_ids if b.kind in ("x", "u")]


# ---------------------------------------------------------------- closed forms

def rauch_riemann(curve, b):
    w = holomorphic_at_ramification(curve, b)
    return 1j * np.pi * np.outer(w, w)


def rauch_omega(curve, alpha, target, moving):
    om, _ = _tables(curve, alpha)
    return 0.5 * om[moving] * w_at_ramification_pair(curve, target, moving)


def self_shift(curve, alpha, b):
    om, _ = _tables(curve, alpha)
    return -0.5 * sum(om[c] * w_at_ramification_pair(curve, b, c)
                      for c in curve.branch_ids if c != b)


def omega_at_fixed(curve, alpha, i, b):
    """d Omega(P_b)/dx_i along the family, b not in {x_i, u_*}."""
    om, ph = _tables(curve, alpha)
    xi, a = curve.x[i - 1], curve.position(b)
    uu = np.array(curve.u)
    return om[X(i)] * ph[X(i)] / (2 * (xi - a) * ph[b]) * np.prod((xi - uu) / (a - uu))


def omega_at_u(curve, alpha, i, m, D=None):
    om, ph = _tables(curve, alpha)
    D = first_order_rhs(curve, alpha) if D is None else D
    um = U(m)
    a = curve.position(um)
    uu = np.array(curve.u)
    s = -1 / (curve.x[i - 1] - a) + np.sum(1 / (a - np.delete(uu, m - 1)))
    s -= sum(om[c] * ph[c] / (curve.position(c) - a)
             for c in curve.branch_ids if c != um) / (om[um] * ph[um])
    return 0.5 * om[um] * s * D[m - 1, i - 1]


def omega_at_x(curve, alpha, k):
    om, ph = _tables(curve, alpha)
    xb = X(k)
    xk = curve.x[k - 1]
    uu = np.array(curve.u)
    g = curve.genus
    s = sum(1 / (uu[a] - xk) * np.prod([(xk - uu[b]) / (uu[a] - uu[b]) for b in range(g) if b != a])
            for a in range(g))
    s += sum(om[c] * ph[c] / (curve.position(c) - xk)
             for c in curve.branch_ids if c != xb) / (om[xb] * ph[xb])
    return -0.5 * om[xb] * s


def dphi_fixed(curve, D, i, b):
    """d phi(P_b)/dx_i for b independent and not x_i."""
    a = curve.position(b)
    uu = np.array(curve.u)
    return 0.5 * phi_at_ramification(curve, b) * (
        1 / (a - curve.x[i - 1]) + np.sum(D[:, i - 1] / (a - uu)))


def dphi_u(curve, D, i, m):
    a = curve.position(U(m))
    uu = np.array(curve.u)
    others = np.delete(curve.branch_points, curve.slot(U(m)))
    rest = [al for al in range(curve.genus) if al != m - 1]
    return 0.5 * phi_at_ramification(curve, U(m)) * (
        1 / (a - curve.x[i - 1]) - D[m - 1, i - 1] * np.sum(1 / (a - others))
        + sum(D[al, i - 1] / (a - uu[al]) for al in rest))


def dv_fixed(curve, D, i, m, b):
    """d v_m(P_b)/dx_i for b not in {u_*, x_i}."""
    x, uu = np.array(curve.x), np.array(curve.u)
    a, um, xi = curve.position(b), uu[m - 1], x[i - 1]
    d = D[:, i - 1]
    rest = [al for al in range(curve.genus) if al != m - 1]
    r = 0.5 * (1 / (a - xi) - 1 / (um - xi)) + 0.5 * d[m - 1] / (a - um)
    r -= 0.5 * sum(d[al] / (a - uu[al]) for al in rest)
    r += 0.5 * d[m - 1] * (1 / um + 1 / (um - 1) + np.sum(1 / (um - x)))
    r -= 0.5 * sum((d[m - 1] - d[al]) / (um - uu[al]) for al in rest)
    return r * v_basis_at_ramification(curve, m, b)


def dv_x(curve, D, i, m):
    """d v_m(P_{x_i})/dx_i."""
    x, uu = np.array(curve.x), np.array(curve.u)
    um, xi = uu[m - 1], x[i - 1]
    d = D[:, i - 1]
    ox = np.delete(x, i - 1)
    rest = [al for al in range(curve.genus) if al != m - 1]
    r = -0.5 * (1 / xi + 1 / (xi - 1) + np.sum(1 / (xi - ox)))
    r += 0.5 * sum((1 - d[al]) / (xi - uu[al]) for al in rest)
    r += 0.5 * (1 / um + 1 / (um - 1) + np.sum(1 / (um - ox))) * d[m - 1]
    r -= 0.5 * sum((d[m - 1] - d[al]) / (um - uu[al]) for al in rest)
    return r * v_basis_at_ramification(curve, m, X(i))


# ---------------------------------------------------------------- FD machinery

def _rauch_fd(curve, b, fn, h):
    a = curve.position(b)
    return (fn(curve.with_branch(b, a + h)) - fn(curve.with_branch(b, a - h))) / (2 * h)


class Family:
    """Isoperiodic family through a base curve, rebuilt by the corrector."""

    def __init__(self, curve: CurveSpec, alpha=None, tol=1e-13):
        self.curve = curve
        self.alpha = alpha
        self.tol = tol
        self.target = bperiods(curve, alpha)
        self.D = first_order_rhs(curve, alpha).real
        self._cache = {}

    def at(self, dx):
        key = tuple(np.round(dx, 15))
        if key not in self._cache:
            x0 = np.array(self.curve.x)
            guess = np.array(self.curve.u) + self.D @ dx
            c, _, _ = newton_period_corrector(x0 + dx, guess, self.target, self.alpha,
                                              tol=self.tol)
            self._cache[key] = c
        return self._cache[key]

    def fd(self, i, fn, h):
        e = np.zeros(self.curve.genus)
        e[i - 1] = h
        return (fn(self.at(e)) - fn(self.at(-e))) / (2 * h)


def _value(b, alpha):
    return lambda c: eval_at_ramification(c, third_kind_differential(c, alpha), b)


def variational_pairs(curve: CurveSpec, alpha=None, h=1e-4, family=None):
    """{formula: (closed form array, finite difference array)}."""
    g = curve.genus
    fam = family or Family(curve, alpha)
    D = fam.D
    out = {k: ([], []) for k in FORMULAS}

    def add(k, an, fd):
        out[k][0].append(np.ravel(an))
        out[k][1].append(np.ravel(fd))

    for b in _movable(curve):
        add("rauch_riemann", rauch_riemann(curve, b),
            _rauch_fd(curve, b, lambda c: normalized_holomorphic_basis(c).riemann, h))
        add("self_shift", self_shift(curve, alpha, b), _rauch_fd(curve, b, _value(b, alpha), h))
        for t in curve.branch_ids:
            if t != b:
                add("rauch_omega", rauch_omega(curve, alpha, t, b),
                    _rauch_fd(curve, b, _value(t, alpha), h))
    for i in range(1, g + 1):
        fixed = [b for b in curve.branch_ids if b.kind != "u" and b != X(i)]
        for b in fixed:
            add("omega_at_fixed", omega_at_fixed(curve, alpha, i, b), fam.fd(i, _value(b, alpha), h))
            add("phi_derivatives", dphi_fixed(curve, D, i, b),
                fam.fd(i, lambda c, b=b: phi_at_ramification(c, b), h))
        for m in range(1, g + 1):
            add("omega_at_u", omega_at_u(curve, alpha, i, m, D), fam.fd(i, _value(U(m), alpha), h))
            add("phi_derivatives", dphi_u(curve, D, i, m),
                fam.fd(i, lambda c, m=m: phi_at_ramification(c, U(m)), h))
            for b in fixed:
                add("v_derivatives", dv_fixed(curve, D, i, m, b),
                    fam.fd(i, lambda c, m=m, b=b: v_basis_at_ramification(c, m, b), h))
            add("v_derivatives", dv_x(curve, D, i, m),
                fam.fd(i, lambda c, m=m, i=i: v_basis_at_ramification(c, m, X(i)), h))
        add("omega_at_x", omega_at_x(curve, alpha, i), fam.fd(i, _value(X(i), alpha), h))
    return {k: (np.concatenate(a), np.concatenate(f)) for k, (a, f) in out.items()}


def validate_variational(curve: CurveSpec, alpha=None, hs=(1e-3, 1e-4)):
    """Relative FD errors per formula for each step in hs."""
    fam = Family(curve, alpha)
    report = {k: [] for k in FORMULAS}
    for h in hs:
        pairs = variational_pairs(curve, alpha, h, fam)
        for k, (an, fd) in pairs.items():
            report[k].append(float(np.max(np.abs(an - fd)) / np.max(np.abs(an))))
    return report
