"""Isoperiodic deformations: u_1..u_g as functions of x_1..x_g.

Along a family on which the b-periods of Omega_alpha stay fixed

    du_m/dx_i = - Omega(P_{x_i}) v_m(P_{x_i}) / Omega(P_{u_m}).

This module provides that first-order field, the closed second-order
rational system, an RK4 integrator that re-derives the differential at every
stage, and a Newton corrector that re-imposes the periods directly.
"""
from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

from .curve import CurveSpec, U, X, build_curve, v_basis_at_ramification
from .errors import (DenominatorVanishes, InputError, NewtonDiverged,
                     OrderingViolation, PoleHit, RealityLost, SingularJacobian)
from .periods import (DifferentialRep, differential_periods,
                      eval_at_ramification, holomorphic_at_ramification,
                      normalized_holomorphic_basis, third_kind_differential)

POLE_FLOOR = 1e-9


def omega_table(curve: CurveSpec, diff: DifferentialRep) -> dict:
    """Omega(P_a) for every ramification point."""
    return {b: eval_at_ramification(curve, diff, b) for b in curve.branch_ids}


def first_order_rhs(curve: CurveSpec, alpha=None, diff: DifferentialRep | None = None):
    """Matrix D[m, i] = du_{m+1}/dx_{i+1} (complex)."""
    g = curve.genus
    if diff is None:
        diff = third_kind_differential(curve, alpha)
    om_u = np.array([eval_at_ramification(curve, diff, U(m)) for m in range(1, g + 1)])
    om_x = np.array([eval_at_ramification(curve, diff, X(i)) for i in range(1, g + 1)])
    scale = max(1.0, float(np.max(np.abs(np.concatenate([om_u, om_x])))))
    if np.min(np.abs(om_u)) < POLE_FLOOR * scale:
        m = int(np.argmin(np.abs(om_u))) + 1
        raise DenominatorVanishes(f"Omega(P_u{m}) vanishes")
    D = np.empty((g, g), dtype=complex)
    for m in range(1, g + 1):
        for i in range(1, g + 1):
            D[m - 1, i - 1] = -om_x[i - 1] * v_basis_at_ramification(curve, m, X(i)) / om_u[m - 1]
    return D


def _real(z, what, tol=1e-8):
    z = np.asarray(z)
    if np.max(np.abs(z.imag), initial=0.0) > tol * max(1.0, float(np.max(np.abs(z)))):
        raise RealityLost(f"{what} left the real axis")
    return z.real


# ---------------------------------------------------------------- second order

def _check_poles(x, u):
    pts = np.concatenate([[0.0, 1.0], x, u])
    diff = np.abs(pts[:, None] - pts[None, :]) + np.eye(len(pts))
    if np.min(diff) < POLE_FLOOR:
        raise PoleHit("coincident branch points in rational system")


def _cubic_factor(x, u, du, m):
    """Common coefficient of (du_m/dx_k)(du_m/dx_n) in the last lines."""
    g = len(x)
    um = u[m]
    others = np.delete(np.arange(g), m)
    prod_m = np.prod(um - u[others])
    s_u = np.sum(1.0 / (um - u[others]))
    out = -0.5 * np.sum(du[m]) * (s_u + 1.0 / um)
    out -= np.sum(x * du[m]) / (2 * um * (um - 1))
    out -= 0.5 * sum(du[m, j] * prod_m / np.prod(x[j] - u) for j in range(g))
    for j in others:
        pj = np.prod(u[j] - np.delete(u, j))
        out -= 0.5 * sum(du[m, i] * (1 / (um - u[j]) - 1 / (x[i] - u[j]))
                         for i in range(g)) * prod_m / pj
    return out


def second_order_rhs(x, u, du, mixed_exclude="kn"):
    """Tensor H[m, k, n] = d^2 u_m / dx_k dx_n from the rational system.

    du[m, i] holds first derivatives.  mixed_exclude selects the index set
    dropped from the sum over x_j in the mixed equation: "kn" (symmetric form)
    or "km" (literal transcription, kept for comparison).
    """
    x = np.asarray(x, float)
    u = np.asarray(u, float)
    du = np.asarray(du)
    g = len(x)
    _check_poles(x, u)
    H = np.zeros((g, g, g), dtype=du.dtype)
    for m in range(g):
        um = u[m]
        om = np.delete(np.arange(g), m)
        E = _cubic_factor(x, u, du, m)
        s_uu = np.sum(1.0 / (um - u[om]))
        for k in range(g):
            for n in range(k + 1, g):
                excl = {k, n} if mixed_exclude == "kn" else {k, m}
                s_x = sum(1 / (um - x[j]) for j in range(g) if j not in excl)
                h = 0.5 * (1 / (x[k] - x[n]) - 1 / (um - x[n])) * du[m, k]
                h += 0.5 * (1 / (x[n] - x[k]) - 1 / (um - x[k])) * du[m, n]
                h += 0.5 * (2 / um + 2 / (um - 1) + s_x - s_uu) * du[m, n] * du[m, k]
                h += 0.25 * du[m, k] * sum((1 / (um - u[a]) - 1 / (x[k] - u[a])) * du[a, n] for a in om)
                h += 0.25 * du[m, n] * sum((1 / (um - u[a]) - 1 / (x[n] - u[a])) * du[a, k] for a in om)
                h += du[m, k] * du[m, n] * E
                H[m, k, n] = H[m, n, k] = h
            xk = x[k]
            ok = np.delete(np.arange(g), k)
            d = du[m, k]
            h = 0.5 * (um / (xk - 1) - (um - 1) / xk - 1 / (xk - um))
            h -= 0.5 * sum((1 / (xk - um) - 1 / (xk - x[j])) * du[m, j] for j in ok)
            h -= 0.5 * d * (2 / xk + 2 / (xk - 1) + np.sum(1 / (xk - x[ok]))
                            - np.sum(1 / (xk - u[om])) - 1 / (xk - um))
            h += 0.5 * (1 / xk - 1 / (xk - 1)) * sum(x[i] * du[m, i] for i in ok)
            h += 0.5 * (1 / (xk - um) - 1 / xk) * sum(du[m, i] for i in ok)
            h += 0.5 * d ** 2 * (2 / um + 2 / (um - 1) + np.sum(1 / (um - x[ok]))
                                 - s_uu + 1 / (xk - um))
            h += 0.5 * d * sum((1 / (um - u[a]) - 1 / (xk - u[a])) * du[a, k] for a in om)
            h += d ** 2 * E
            H[m, k, k] = h
    return H


def genus1_ode_rhs(x: float, u: float, up: float) -> float:
    """u'' for the genus one family."""
    _check_poles(np.array([x]), np.array([u]))
    return (0.5 * (u / (x - 1) - (u - 1) / x + 1 / (u - x))
            - 0.5 * up * (2 / x + 2 / (x - 1) + 1 / (u - x))
            + 0.5 * up ** 2 * (2 / u + 2 / (u - 1) + 1 / (x - u))
            - 0.5 * up ** 3 * (x / (u - 1) - (x - 1) / u + 1 / (x - u)))


# ---------------------------------------------------------------- corrector

def bperiods(curve: CurveSpec, alpha=None):
    return differential_periods(curve, third_kind_differential(curve, alpha))[1]


def period_jacobian(curve: CurveSpec, alpha=None):
    """J[k, j] = d(oint_{b_k} Omega_alpha)/du_j = pi i Omega(P_{u_j}) omega_k(P_{u_j})."""
    g = curve.genus
    diff = third_kind_differential(curve, alpha)
    pdata = normalized_holomorphic_basis(curve)
    J = np.empty((g, g), dtype=complex)
    for j in range(1, g + 1):
        J[:, j - 1] = (1j * np.pi * eval_at_ramification(curve, diff, U(j))
                       * holomorphic_at_ramification(curve, U(j), pdata))
    return J


def newton_period_corrector(x, u_guess, target, alpha=None, tol=1e-10,
                            max_iter=40, cond_limit=1e12):
    """Solve b-periods(Omega_alpha; x, u) = target for real u."""
    g = len(x)
    target = np.asarray(target, dtype=complex)
    u = np.array(u_guess, dtype=float)
    try:
        curve = build_curve(g, x, u)
    except OrderingViolation as e:
        raise NewtonDiverged(f"initial guess invalid: {e}") from e
    r = bperiods(curve, alpha) - target
    for it in range(max_iter):
        res = float(np.max(np.abs(r)))
        if res < tol:
            return curve, res, it
        J = period_jacobian(curve, alpha)
        Jr = np.vstack([J.real, J.imag])
        s = np.linalg.svd(Jr, compute_uv=False)
        if s[-1] <= s[0] / cond_limit:
            raise SingularJacobian(f"period Jacobian condition {s[0] / s[-1]:.3g}")
        du = np.linalg.lstsq(Jr, -np.concatenate([r.real, r.imag]), rcond=None)[0]
        lam = 1.0
        while True:
            try:
                trial = build_curve(g, x, u + lam * du)
                rt = bperiods(trial, alpha) - target
                if np.max(np.abs(rt)) < res or lam < 1e-3:
                    break
            except OrderingViolation:
                pass
            lam *= 0.5
            if lam < 1e-3:
                raise NewtonDiverged("line search failed")
        u = u + lam * du
        curve, r = trial, rt
    res = float(np.max(np.abs(r)))
    if res < tol:
        return curve, res, max_iter
    raise NewtonDiverged(f"residual {res:.3g} after {max_iter} iterations")


# ---------------------------------------------------------------- RK4

@dataclass
class Trajectory:
    alpha: np.ndarray
    target: np.ndarray
    steps: list = field(default_factory=list)   # (x, u, drift) tuples
    step_sizes: list = field(default_factory=list)
    omega_u: list = field(default_factory=list)  # |Omega_alpha(P_{u_m})| per sample

    @property
    def end(self) -> CurveSpec:
        x, u, _ = self.steps[-1]
        return build_curve(len(x), x, u)

    def to_csv(self) -> str:
        g = len(self.alpha)
        head = ["step_index"] + [f"x_{i}" for i in range(1, g + 1)] + \
            [f"u_{i}" for i in range(1, g + 1)]
        for i in range(1, g + 1):
            head += [f"drift_re_{i}", f"drift_im_{i}"]
        out = io.StringIO()
        out.write(",".join(head) + "\n")
        for k, (x, u, d) in enumerate(self.steps):
            row = [str(k)] + [repr(float(t)) for t in x] + [repr(float(t)) for t in u]
            for z in d:
                row += [repr(float(z.real)), repr(float(z.imag))]
            out.write(",".join(row) + "\n")
        return out.getvalue()


def _omega_u(x, u, alpha):
    curve = build_curve(len(x), x, u)
    diff = third_kind_differential(curve, alpha)
    return np.array([abs(eval_at_ramification(curve, diff, U(m)))
                     for m in range(1, len(x) + 1)])


def _field(x, u, direction, alpha):
    curve = build_curve(len(x), x, u)
    D = first_order_rhs(curve, alpha)
    return _real(D @ direction, "flow field")


def integrate_flow(curve: CurveSpec, waypoints, h=0.01, alpha=None,
                   drift_tol=1e-6, max_halvings=8) -> Trajectory:
    """RK4 along the piecewise linear path curve.x -> waypoints[0] -> ...

    A step is halved while its b-period drift per unit path exceeds drift_tol.
    DenominatorVanishes / OrderingViolation / RealityLost propagate with the
    trajectory up to the last valid sample attached as ``err.trajectory``.
    """
    g = curve.genus
    alpha_v = np.zeros(g, complex) if alpha is None else np.asarray(alpha, complex)
    target = bperiods(curve, alpha_v)
    traj = Trajectory(alpha_v, target)
    x = np.array(curve.x)
    u = np.array(curve.u)
    traj.steps.append((x.copy(), u.copy(), np.zeros(g, complex)))
    traj.step_sizes.append(0.0)
    traj.omega_u.append(_omega_u(x, u, alpha_v))
    try:
        _advance(traj, x, u, waypoints, h, alpha_v, target, drift_tol, max_halvings)
    except (DenominatorVanishes, OrderingViolation, RealityLost) as e:
        e.trajectory = traj
        raise
    return traj


def _advance(traj, x, u, waypoints, h, alpha_v, target, drift_tol, max_halvings):
    g = len(x)
    for wp in waypoints:
        wp = np.asarray(wp, float)
        if wp.shape != (g,):
            raise InputError(f"waypoint needs {g} coordinates")
        seg = wp - x
        length = float(np.linalg.norm(seg))
        if length == 0:
            continue
        direction = seg / length
        s = 0.0
        while s < length - 1e-14:
            hs = min(h, length - s)
            drift_prev = traj.steps[-1][2]
            for _ in range(max_halvings + 1):
                k1 = _field(x, u, direction, alpha_v)
                k2 = _field(x + 0.5 * hs * direction, u + 0.5 * hs * k1, direction, alpha_v)
                k3 = _field(x + 0.5 * hs * direction, u + 0.5 * hs * k2, direction, alpha_v)
                k4 = _field(x + hs * direction, u + hs * k3, direction, alpha_v)
                un = u + hs / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
                xn = x + hs * direction
                if s + hs >= length - 1e-14:
                    xn = wp.copy()
                drift = bperiods(build_curve(g, xn, un), alpha_v) - target
                if np.max(np.abs(drift - drift_prev)) <= drift_tol * hs:
                    break
                hs *= 0.5
            x, u, s = xn, un, s + hs
            traj.steps.append((x.copy(), u.copy(), drift))
            traj.step_sizes.append(hs)
            traj.omega_u.append(_omega_u(x, u, alpha_v))


def parse_path(text: str, g: int):
    """"x0:x1:...:h" with comma separated coordinates; returns (points, h)."""
    parts = text.split(":")
    if len(parts) < 3:
        raise InputError("path needs start:end[:...]:step")
    try:
        pts = [np.array([float(t) for t in p.split(",")]) for p in parts[:-1]]
        h = float(parts[-1])
    except ValueError as e:
        raise InputError(f"bad path {text!r}") from e
    if any(p.shape != (g,) for p in pts) or h <= 0:
        raise InputError(f"path points need {g} coordinates and a positive step")
    return pts, h
