import numpy as np
from scipy import integrate

from todakit.curve import build_curve, delta_eval
from todakit.equilibrium import (bperiods_to_measures, equilibrium_measures,
                                 equilibrium_report, fraction_string,
                                 gap_vanishing_polynomial, isoequilibrium_flow,
                                 measures_to_bperiods, omega0_bperiods,
                                 rational_measure_detect)
from todakit.pell import curve_from_support

from conftest import random_curve


def _quad(f, lo, hi):
    # weight 1/sqrt((u-lo)(hi-u)) handled by the alg weight of QUADPACK
    return integrate.quad(f, lo, hi, weight="alg", wvar=(-0.5, -0.5), limit=200,
                          epsabs=1e-13, epsrel=1e-13)[0]


def test_g1_measures(g1):
    assert np.max(np.abs(equilibrium_measures(g1) - 0.5)) < 1e-8
    assert np.max(np.abs(gap_vanishing_polynomial(g1) - [-1.5, 1.0])) < 1e-9


def test_symmetric_support_half_half():
    curve, _ = curve_from_support([(-np.sqrt(0.5), -0.5), (0.5, np.sqrt(0.5))])
    assert np.max(np.abs(equilibrium_measures(curve) - 0.5)) < 1e-10


def test_measures_against_quadpack(g2):
    pts = g2.branch_points

    def rest(u, s):
        return np.prod(np.sqrt(np.abs(u - np.delete(pts, [s, s + 1]))))

    def moment(s, k):
        return _quad(lambda u: u ** k / rest(u, s), pts[s], pts[s + 1])

    M = np.array([[moment(s, k) for k in range(3)] for s in (1, 3)])
    q = np.concatenate([np.linalg.solve(M[:, :2], -M[:, 2]), [1.0]])
    assert np.max(np.abs(q - gap_vanishing_polynomial(g2))) < 1e-9
    rho = [abs(_quad(lambda u: np.polyval(q[::-1], u) / rest(u, s), pts[s], pts[s + 1]))
           / np.pi for s in (0, 2, 4)]
    assert np.max(np.abs(np.array(rho) - equilibrium_measures(g2))) < 1e-9


def test_measures_sum_to_one(rng):
    for g in (1, 2, 3):
        rho = equilibrium_measures(random_curve(rng, g))
        assert abs(rho.sum() - 1) < 1e-10 and np.all(rho > 0)


def test_dictionary(rng):
    for g in (1, 2, 3):
        c = random_curve(rng, g)
        rho = equilibrium_measures(c)
        b = omega0_bperiods(c)
        assert np.max(np.abs(measures_to_bperiods(rho) - b)) < 1e-7
        assert np.max(np.abs(bperiods_to_measures(b) - rho)) < 1e-7


def test_isoequilibrium_flow_keeps_measures(g2):
    rho0 = equilibrium_measures(g2)
    traj = isoequilibrium_flow(g2, [np.array([2.2, 4.25])], 0.02)
    for x, u, _ in traj.steps:
        assert np.all(np.isreal(u))
        rho = equilibrium_measures(build_curve(2, x, u))
        assert np.max(np.abs(rho - rho0)) < 1e-6


def test_rational_detection():
    assert rational_measure_detect([0.5, 0.5]).N == 2
    r = rational_measure_detect(equilibrium_measures(build_curve(1, [2.0], [3 + 2 * np.sqrt(2)])))
    assert (r.N, r.k) == (3, (1, 2))
    assert rational_measure_detect([1 / np.pi, 1 - 1 / np.pi]) is None
    assert fraction_string([1 / 3, 2 / 3]) == ["1/3", "2/3"]


def test_report_json_ready(g1):
    rep = equilibrium_report(g1)
    assert rep["rational"] == {"N": 2, "k": [1, 1]}
    assert abs(rep["b_periods"][0][1] - np.pi) < 1e-10
