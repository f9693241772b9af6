"""Upper triangular solution of the constrained Schlesinger system.

For every branch point a,

    A_a = [[-1/4, A12_a], [0, 1/4]],   A12_a = (t/4) Omega(P_a) phi(P_a),

and x_1..x_g are the independent variables, u following the isoperiodic
family of Omega = Omega_alpha.
"""
from __future__ import annotations

import json

import numpy as np

from .curve import CurveSpec, U, X, phi_at_ramification
from .periods import eval_at_ramification, third_kind_differential
from .variational import Family


def residue_entries(curve: CurveSpec, alpha=None, t=1.0) -> dict:
    diff = third_kind_differential(curve, alpha)
    return {b: 0.25 * t * eval_at_ramification(curve, diff, b) * phi_at_ramification(curve, b)
            for b in curve.branch_ids}


def build_residue_matrices(curve: CurveSpec, alpha=None, t=1.0) -> dict:
    return {b: np.array([[-0.25, a12], [0.0, 0.25]], dtype=complex)
            for b, a12 in residue_entries(curve, alpha, t).items()}


def sum_rule_check(mats: dict, genus: int) -> float:
    total = sum(mats.values())
    expected = np.diag([-(genus + 1) / 2, (genus + 1) / 2])
    return float(np.max(np.abs(total - expected)))


def _comm(a, b):
    return a @ b - b @ a


def schlesinger_rhs(curve: CurveSpec, mats: dict, D, i: int) -> dict:
    """Right hand sides of d A_a / dx_i (i 1-based) for all a; D[m, i] = du_m/dx_i."""
    g = curve.genus
    xi = X(i)
    pos = {b: curve.position(b) for b in mats}
    us = [U(k) for k in range(1, g + 1)]
    out = {}
    for b, A in mats.items():
        if b == xi:
            r = -sum(_comm(A, mats[c]) / (pos[xi] - pos[c]) for c in mats if c != xi)
            r = r + sum(_comm(mats[uk], A) / (pos[uk] - pos[xi]) * D[k, i - 1]
                        for k, uk in enumerate(us))
        elif b.kind == "u":
            m = b.index - 1
            r = _comm(mats[xi], A) / (pos[xi] - pos[b])
            r = r + sum(_comm(mats[uk], A) / (pos[uk] - pos[b]) * D[k, i - 1]
                        for k, uk in enumerate(us) if uk != b)
            r = r - D[m, i - 1] * sum(_comm(mats[c], A) / (pos[c] - pos[b])
                                      for c in mats if c != b)
        else:
            r = _comm(mats[xi], A) / (pos[xi] - pos[b])
            r = r + sum(_comm(mats[uk], A) / (pos[uk] - pos[b]) * D[k, i - 1]
                        for k, uk in enumerate(us))
        out[b] = r
    return out


def reduced_rhs(curve: CurveSpec, a12: dict, D, i: int) -> dict:
    """Scalar (1,2)-entry form of the same equations (for a not equal to x_i)."""
    g = curve.genus
    xi = X(i)
    pos = {b: curve.position(b) for b in a12}
    out = {}
    for b, v in a12.items():
        if b == xi:
            continue
        r = 0.5 * (a12[xi] - v) / (pos[xi] - pos[b])
        for k in range(1, g + 1):
            uk = U(k)
            if uk != b:
                r += 0.5 * (a12[uk] - v) / (pos[uk] - pos[b]) * D[k - 1, i - 1]
        if b.kind == "u":
            r -= 0.5 * D[b.index - 1, i - 1] * sum((a12[c] - v) / (pos[c] - pos[b])
                                                   for c in a12 if c != b)
        out[b] = r
    return out


def constrained_residual(curve: CurveSpec, alpha=None, t=1.0, h=1e-4, family=None) -> dict:
    """Max |FD derivative - RHS| for the three kinds of equations."""
    fam = family or Family(curve, alpha)
    mats = build_residue_matrices(curve, alpha, t)
    D = fam.D
    worst = {"fixed": 0.0, "u": 0.0, "x": 0.0}
    for i in range(1, curve.genus + 1):
        rhs = schlesinger_rhs(curve, mats, D, i)
        for b in curve.branch_ids:
            fd = fam.fd(i, lambda c, b=b: build_residue_matrices(c, alpha, t)[b], h)
            key = "x" if b == X(i) else ("u" if b.kind == "u" else "fixed")
            worst[key] = max(worst[key], float(np.max(np.abs(fd - rhs[b]))))
    return worst


def matrices_json(mats: dict) -> str:
    return json.dumps({str(b): [[float(z.real), float(z.imag)] for z in A.ravel()]
                       for b, A in mats.items()}, indent=2)
