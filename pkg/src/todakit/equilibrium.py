"""Equilibrium measures of the bands and their link to b-periods.

q_g is the monic polynomial of degree g whose integrals q du / sqrt(Delta)
over every gap vanish; Omega_0 = -q_g du / v.  The equilibrium measure of a
band is (1/pi) int_band |q_g| / sqrt|Delta|, and the b-periods of Omega_0 are
2 pi i times partial sums of the measures.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .curve import CurveSpec
from .isoflow import integrate_flow
from .periods import (DEFAULT_TOL, differential_periods, segment_integrals,
                      third_kind_differential, _solve)


def gap_vanishing_polynomial(curve: CurveSpec, tol=DEFAULT_TOL) -> np.ndarray:
    """Ascending coefficients of the monic q_g."""
    g = curve.genus
    mono = np.eye(g + 1)
    M = np.array([segment_integrals(curve, 2 * j - 1, mono, absolute=True, tol=tol).real
                  for j in range(1, g + 1)])
    low = _solve(M[:, :g], -M[:, g], "gap moment matrix")
    return np.concatenate([low, [1.0]])


def equilibrium_measures(curve: CurveSpec, tol=DEFAULT_TOL) -> np.ndarray:
    """(rho_0, ..., rho_g) for [0, 1], [x_1, u_1], ..."""
    q = gap_vanishing_polynomial(curve, tol)
    rho = np.array([abs(segment_integrals(curve, 2 * l, q, absolute=True, tol=tol)[0].real)
                    for l in range(curve.genus + 1)]) / np.pi
    return rho


def measures_to_bperiods(rho) -> np.ndarray:
    """b_j = 2 pi i (rho_0 + ... + rho_{j-1}), j = 1..g."""
    rho = np.asarray(rho, float)
    return 2j * np.pi * np.cumsum(rho)[:-1]


def bperiods_to_measures(b) -> np.ndarray:
    s = np.concatenate([[0.0], np.asarray(b).imag / (2 * np.pi)])
    rho = np.diff(s)
    return np.concatenate([rho, [1.0 - s[-1]]])


def omega0_bperiods(curve: CurveSpec):
    return differential_periods(curve, third_kind_differential(curve))[1]


def isoequilibrium_flow(curve: CurveSpec, waypoints, h=0.01, drift_tol=1e-6):
    """Flow with alpha = 0; measures stay fixed and u stays real."""
    return integrate_flow(curve, waypoints, h, None, drift_tol)


@dataclass(frozen=True)
class RationalMeasures:
    N: int
    k: tuple

    def to_json(self):
        return {"N": self.N, "k": list(self.k)}


def rational_measure_detect(rho, tol=1e-8, n_max=64) -> RationalMeasures | None:
    """Smallest N <= n_max with every rho_j within tol of k_j / N, k_j >= 1."""
    rho = np.asarray(rho, float)
    for N in range(len(rho), n_max + 1):
        k = np.rint(rho * N)
        if np.all(k >= 1) and k.sum() == N and np.all(np.abs(rho - k / N) < tol):
            return RationalMeasures(N, tuple(int(t) for t in k))
    return None


def equilibrium_report(curve: CurveSpec, tol=1e-8, n_max=64) -> dict:
    rho = equilibrium_measures(curve)
    b = omega0_bperiods(curve)
    rat = rational_measure_detect(rho, tol, n_max)
    return {
        "rho": [float(r) for r in rho],
        "b_periods": [[float(z.real), float(z.imag)] for z in b],
        "rational": None if rat is None else rat.to_json(),
    }


def fraction_string(rho, n_max=64) -> list:
    return [str(Fraction(float(r)).limit_denominator(n_max)) for r in rho]
