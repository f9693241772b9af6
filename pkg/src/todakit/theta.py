"""Riemann theta functions and finite-gap Toda lattice solutions.

theta(z | B) = sum_n exp(pi i n.B.n + 2 pi i n.z), periodic under z -> z + e_k.
With U = 2 pi i int_{inf-}^{inf+} omega the lattice shift n -> n+1 moves the
theta argument by U / (2 pi i) and time moves it by t V / (2 pi i), where V
holds the b-periods of the normalised second-kind differential with principal
part d(u/2) at inf+.

    c_n = theta(z_{n+1}) theta(z_{n-1}) / theta(z_n)^2,
    v_n = d/dt log(theta(z_{n+1}) / theta(z_n)),
    z_n = (n U + t V) / (2 pi i) + z0.

The identity  d^2/dt^2 log theta(z_n) = K c_n + const  holds with a constant
K fixed by the curve; V is rescaled by 1/sqrt(K) so that the Toda equations
hold with unit coefficient.
"""
from __future__ import annotations

import io
import itertools
from dataclasses import dataclass, replace

import numpy as np

from .curve import CurveSpec
from .errors import ThetaDivisorHit
from .periods import (_solve, abel_decompose, differential_periods, monomial_periods,
                      normalized_holomorphic_basis, second_kind_differential)

TAIL_TOL = 1e-12
DIVISOR_FLOOR = 1e-12


# ---------------------------------------------------------------- theta

def truncation_radius(B, tol=TAIL_TOL, shift=0.0) -> int:
    """Smallest R with exp(-pi lam R^2 + 2 pi s R)(2R+1)^g < tol.

    lam is the smallest eigenvalue of Im B and s bounds |Im z| (the linear
    term of the exponent).
    """
    g = B.shape[0]
    lam = float(np.min(np.linalg.eigvalsh(0.5 * (B.imag + B.imag.T))))
    R = 1
    while np.exp(-np.pi * lam * R * R + 2 * np.pi * shift * R) * (2 * R + 1) ** g >= tol:
        R += 1
    return R


@dataclass(frozen=True, eq=False)
class ThetaParams:
    B: np.ndarray
    radius: int

    @classmethod
    def for_matrix(cls, B, tol=TAIL_TOL, shift=0.0):
        return cls(np.asarray(B), truncation_radius(np.asarray(B), tol, shift))

    def lattice(self):
        g = self.B.shape[0]
        r = range(-self.radius, self.radius + 1)
        return np.array(list(itertools.product(r, repeat=g)), dtype=float)


def riemann_theta(z, params: ThetaParams, derivs=()):
    """theta and directional derivatives at z (vector or array of vectors).

    derivs is a tuple of direction vectors; returns a list
    [theta, D_d1 theta, D_d1 D_d2 theta, ...] for successive directions.
    """
    n = params.lattice()
    z = np.atleast_2d(np.asarray(z, dtype=complex))
    quad = 1j * np.pi * np.einsum("ij,jk,ik->i", n, params.B, n)
    expo = np.exp(quad[None, :] + 2j * np.pi * z @ n.T)
    out = [expo.sum(axis=1)]
    factor = np.ones(n.shape[0], dtype=complex)
    for d in derivs:
        factor = factor * (2j * np.pi * (n @ np.asarray(d, dtype=complex)))
        out.append(expo @ factor)
    return out


# ---------------------------------------------------------------- Toda

@dataclass(frozen=True, eq=False)
class TodaData:
    U: np.ndarray        # 2 pi i * Abel integral between infinities
    V: np.ndarray        # calibrated time direction
    V_raw: np.ndarray    # b-periods of the second kind differential
    scale: complex       # K in d^2 log theta = K c + const, for V_raw
    z0: np.ndarray
    params: ThetaParams
    M1: np.ndarray
    M2: np.ndarray

    def to_json(self):
        from .periods import _cjson
        return {"U": _cjson(self.U), "V": _cjson(self.V), "z0": _cjson(self.z0),
                "radius": self.params.radius, "M1": [float(t) for t in self.M1],
                "M2": [float(t) for t in self.M2]}


def default_z0(B):
    g = B.shape[0]
    return B @ np.full(g, 0.25) + 0.25


def _arg(data: TodaData, n, t, V):
    return (n * data.U + t * V) / (2j * np.pi) + data.z0


def _log_derivs(data, n, t, V):
    th, d1, d2 = riemann_theta(_arg(data, n, t, V), data.params, (V / (2j * np.pi),) * 2)
    th, d1, d2 = th[0], d1[0], d2[0]
    if abs(th) < DIVISOR_FLOOR:
        raise ThetaDivisorHit(f"theta vanishes at n={n}, t={t}")
    return th, d1 / th, d2 / th - (d1 / th) ** 2


def toda_wave_vectors(curve: CurveSpec, z0=None, probe=(-2, -1, 0, 1, 2, 3)) -> TodaData:
    pdata = normalized_holomorphic_basis(curve)
    B = pdata.riemann
    U = 2j * np.pi * pdata.abel
    V_raw = differential_periods(curve, second_kind_differential(curve))[1]
    z0 = default_z0(B) if z0 is None else np.asarray(z0, dtype=complex)
    M1, M2 = abel_decompose(B, pdata.abel)
    shift = float(np.max(np.abs(np.imag(z0)))) + float(np.max(np.abs(pdata.abel.imag))) * 8 + 1.0
    params = ThetaParams.for_matrix(B, TAIL_TOL, shift)
    pre = TodaData(U, V_raw, V_raw, 1.0, z0, params, M1, M2)
    # fit d^2 log theta(z_n) = K c_n + d over a few lattice sites
    rows, rhs = [], []
    for t in (0.0, 0.37):
        for n in probe:
            c = _c(pre, n, t, V_raw)
            rows.append([c, 1.0])
            rhs.append(_log_derivs(pre, n, t, V_raw)[2])
    K = np.linalg.lstsq(np.array(rows), np.array(rhs), rcond=None)[0][0]
    V = V_raw / np.sqrt(K)
    if np.max(np.abs(V.imag)) < 1e-12 * np.max(np.abs(V)):
        V = V.real.astype(complex)
    return TodaData(U, V, V_raw, K, z0, params, M1, M2)


def _c(data, n, t, V=None):
    V = data.V if V is None else V
    z = np.array([_arg(data, n + s, t, V) for s in (1, -1, 0)])
    th = riemann_theta(z, data.params)[0]
    if abs(th[2]) < DIVISOR_FLOOR:
        raise ThetaDivisorHit(f"theta vanishes at n={n}, t={t}")
    return th[0] * th[1] / th[2] ** 2


def toda_solution(data: TodaData, n: int, t: float):
    """(c_n(t), v_n(t))."""
    c = _c(data, n, t)
    v = _log_derivs(data, n + 1, t, data.V)[1] - _log_derivs(data, n, t, data.V)[1]
    return complex(c), complex(v)


def toda_rates(data: TodaData, n: int, t: float):
    """Analytic (dc_n/dt, dv_n/dt)."""
    c, _ = toda_solution(data, n, t)
    d = {s: _log_derivs(data, n + s, t, data.V) for s in (-1, 0, 1)}
    cdot = c * (d[1][1] + d[-1][1] - 2 * d[0][1])
    vdot = d[1][2] - d[0][2]
    return complex(cdot), complex(vdot)


def lattice_residual(data: TodaData, n: int, t: float, kdv=False,
                     method="analytic", h=1e-4) -> float:
    """Residual of the Toda (or KdV difference) equations at (n, t).

    method="analytic" differentiates the theta series term by term;
    method="fd" uses a five-point centred difference in t.
    """
    c0, v0 = toda_solution(data, n, t)
    c1, _ = toda_solution(data, n + 1, t)
    cl, vl = toda_solution(data, n - 1, t)
    if method == "analytic":
        cdot, vdot = toda_rates(data, n, t)
    else:
        w = {-2: 1 / 12, -1: -2 / 3, 1: 2 / 3, 2: -1 / 12}
        vals = {k: toda_solution(data, n, t + k * h) for k in w}
        cdot = sum(w[k] * vals[k][0] for k in w) / h
        vdot = sum(w[k] * vals[k][1] for k in w) / h
    if kdv:
        return float(abs(cdot - c0 * (c1 - cl)))
    return float(max(abs(vdot - (c1 - c0)), abs(cdot - c0 * (v0 - vl))))


def volterra_time_vector(curve: CurveSpec, center: float, scale: float) -> np.ndarray:
    """b-periods of the normalised differential with principal part d(z^2/2) at inf+.

    z = center + scale * u is the original coordinate of a support mapped
    to the curve.  For a support symmetric about 0 the Toda flow with
    v_n = 0 reduces to the Volterra (KdV difference) flow along this vector.
    """
    g = curve.genus
    b = np.asarray(curve.branch_points)
    p1, p2 = b.sum(), (b * b).sum()
    A, Bp = monomial_periods(curve, g + 2)
    # u^{g+2} + c1 u^{g+1} + c0 u^g expands as u^2 (1 + O(u^-2)) times v/u^{g+1}
    top = np.array([p1 * p1 / 8 - p2 / 4, -p1 / 2, 1.0])
    low = _solve(A[:, :g], -(A[:, g:] @ top), "a")
    y2 = Bp @ np.concatenate([low, top])
    v1 = differential_periods(curve, second_kind_differential(curve))[1]
    return scale ** 2 * y2 + 2 * center * scale * v1


def volterra_data(curve: CurveSpec, center: float, scale: float, z0=None) -> TodaData:
    """TodaData whose time direction is the calibrated Volterra vector.

    Calibration: dc_n/dt = K c_n (c_{n+1} - c_{n-1}) along the raw vector,
    then W = W_raw / K so that lattice_residual(..., kdv=True) has unit
    coefficient.
    """
    base = toda_wave_vectors(curve, z0=z0)
    W_raw = volterra_time_vector(curve, center, scale)
    if np.max(np.abs(W_raw)) < 1e-12 * max(1.0, float(np.max(np.abs(base.V_raw)))):
        # stationary flow: c_n does not move, every time is t = 0
        return replace(base, V=np.zeros_like(W_raw), V_raw=W_raw, scale=1.0)
    pre = replace(base, V=W_raw)
    rows, rhs = [], []
    for t in (0.0, 0.37):
        for n in (-2, -1, 0, 1, 2):
            c, cp, cm = (_c(pre, n + s, t) for s in (0, 1, -1))
            d = {s: _log_derivs(pre, n + s, t, W_raw)[1] for s in (-1, 0, 1)}
            rows.append(c * (cp - cm))
            rhs.append(c * (d[1] + d[-1] - 2 * d[0]))
    rows, rhs = np.array(rows), np.array(rhs)
    K = np.vdot(rows, rhs) / np.vdot(rows, rows)
    return replace(base, V=W_raw / K, V_raw=W_raw, scale=K)


def periodicity_check(data: TodaData, N: int, ns=range(-4, 5), ts=(0.0, 0.3, 0.7)):
    """max |c_{n+N} - c_n|, |v_{n+N} - v_n| and the lattice condition on N*abel."""
    worst = 0.0
    for t in ts:
        for n in ns:
            a, b = toda_solution(data, n, t), toda_solution(data, n + N, t)
            worst = max(worst, abs(a[0] - b[0]), abs(a[1] - b[1]))
    lat = np.concatenate([N * data.M1, N * data.M2])
    return worst, float(np.max(np.abs(lat - np.rint(lat))))


def lattice_table(data: TodaData, ns, ts, jobs=1):
    """Rows (n, t, c, v) in n-major order."""
    def row(n):
        return [(n, t) + toda_solution(data, n, t) for t in ts]

    ns = list(ns)
    if jobs > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(jobs) as ex:
            blocks = list(ex.map(row, ns))
    else:
        blocks = [row(n) for n in ns]
    return [r for b in blocks for r in b]


def lattice_csv(rows) -> str:
    out = io.StringIO()
    out.write("n,t,re_c,im_c,re_v,im_v\n")
    for n, t, c, v in rows:
        out.write(f"{n},{float(t)!r},{c.real!r},{c.imag!r},{v.real!r},{v.imag!r}\n")
    return out.getvalue()
