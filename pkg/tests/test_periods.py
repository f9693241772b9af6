import numpy as np
import pytest
from scipy import integrate, special

from todakit.curve import U, X, build_curve, delta_eval
from todakit.errors import CoincidentPoints, DimensionMismatch, QuadratureNotConverged
from todakit.periods import (abel_decompose, chebyshev_endpoint_integral, cut_integral,
                             differential_periods, holomorphic_at_ramification,
                             monomial_periods, normalized_holomorphic_basis,
                             real_path_integral, second_kind_differential,
                             segment_integrals, tail_integral, third_kind_differential,
                             w_at_ramification_pair, w_b_periods)

from conftest import random_curve


def test_chebyshev_rule_on_arcsine():
    assert abs(chebyshev_endpoint_integral(lambda u: np.ones_like(u), 0.0, 1.0) - np.pi) < 1e-14
    # int_0^1 u du / sqrt(u(1-u)) = pi / 2
    assert abs(chebyshev_endpoint_integral(lambda u: u, 0.0, 1.0) - np.pi / 2) < 1e-14


def test_genus1_riemann_matrix_against_ellipk(g1):
    # four real roots 0,1,2,3: tau = i K(k)/K(k'), k^2 = cross ratio = 1/4
    m = (1 - 0) * (3 - 2) / ((3 - 1) * (2 - 0))
    tau = 1j * special.ellipk(m) / special.ellipk(1 - m)
    B = normalized_holomorphic_basis(g1).riemann
    assert abs(B[0, 0] - tau) < 1e-12


def test_segment_integral_against_quad(g2):
    for s in range(5):
        lo, hi = g2.branch_points[s], g2.branch_points[s + 1]
        ref = integrate.quad(lambda u: u / np.sqrt(abs(delta_eval(g2, u))), lo, hi,
                             limit=200, epsabs=1e-13)[0]
        got = segment_integrals(g2, s, [0.0, 1.0], absolute=True)[0]
        assert abs(got - ref) < 1e-9


def test_tail_against_quad(g2):
    f = lambda u: 1 / np.sqrt(delta_eval(g2, u))
    ref = integrate.quad(f, 5.5, 6.5, limit=200)[0] + integrate.quad(f, 6.5, np.inf)[0]
    assert abs(tail_integral(g2, [[1.0, 0.0]])[0] - ref) < 1e-9
    with pytest.raises(DimensionMismatch):
        tail_integral(g2, [[0, 0, 1.0]])


def test_cut_integral_requires_consecutive_points(g2):
    cut_integral(g2, [1.0], (2.0, 3.0))
    with pytest.raises(DimensionMismatch):
        cut_integral(g2, [1.0], (1.0, 3.0))


@pytest.mark.parametrize("g", [1, 2, 3])
def test_riemann_matrix_symmetric_positive(rng, g):
    for _ in range(3):
        B = normalized_holomorphic_basis(random_curve(rng, g)).riemann
        assert np.max(np.abs(B - B.T)) < 1e-10
        assert np.min(np.linalg.eigvalsh(B.imag)) > 0


def test_holomorphic_a_normalised(g3):
    pd = normalized_holomorphic_basis(g3)
    A, _ = monomial_periods(g3, 2)
    assert np.max(np.abs(pd.omega @ A.T - np.eye(3))) < 1e-12


def test_third_kind_periods_and_reciprocity(g2):
    alpha = np.array([0.3, -0.2])
    a_per, b_per = differential_periods(g2, third_kind_differential(g2, alpha))
    assert np.max(np.abs(a_per + alpha)) < 1e-12
    # reciprocity: b-periods of Omega_0 = 2 pi i * abel
    _, b0 = differential_periods(g2, third_kind_differential(g2))
    assert np.max(np.abs(b0 - 2j * np.pi * normalized_holomorphic_basis(g2).abel)) < 1e-10


def test_second_kind_normalised(g2):
    diff = second_kind_differential(g2)
    a_per, _ = differential_periods(g2, diff)
    assert np.max(np.abs(a_per)) < 1e-12
    assert diff.coeffs[-1] == 0.5


def test_w_b_periods(g2):
    pd = normalized_holomorphic_basis(g2)
    for b in g2.branch_ids:
        ref = 2j * np.pi * holomorphic_at_ramification(g2, b, pd)
        assert np.max(np.abs(w_b_periods(g2, b, pd) - ref)) < 1e-10


def test_w_symmetric(g2):
    for p in g2.branch_ids:
        for q in g2.branch_ids:
            if p != q:
                assert abs(w_at_ramification_pair(g2, p, q)
                           - w_at_ramification_pair(g2, q, p)) < 1e-10
    with pytest.raises(CoincidentPoints):
        w_at_ramification_pair(g2, X(1), X(1))


def test_abel_decompose(g2):
    pd = normalized_holomorphic_basis(g2)
    M1, M2 = abel_decompose(pd.riemann, pd.abel)
    assert np.max(np.abs(M1 + pd.riemann @ M2 - pd.abel)) < 1e-14


def test_real_path_integral_hits_segments(g1):
    q = np.array([1.0, 2.0])
    full = sum(segment_integrals(g1, s, q) for s in range(2))
    assert np.max(np.abs(real_path_integral(g1, q, 2.0) - full)) < 1e-12
    # inside a band, split at either endpoint
    mid = real_path_integral(g1, q, 2.5)
    ref = full + integrate.quad(lambda u: P(q, u) / np.sqrt(-delta_eval(g1, u)), 2.0, 2.5,
                                limit=200)[0] / 1j
    assert abs(mid[0] - ref) < 1e-9


def P(q, u):
    return np.polynomial.polynomial.polyval(u, q)


def test_homogeneity_power_of_two(g2):
    # scaling a differential by 2 scales its periods exactly
    diff = third_kind_differential(g2, [0.1, 0.2])
    a1, b1 = differential_periods(g2, diff)
    a2, b2 = differential_periods(g2, diff.scaled(2.0))
    assert np.array_equal(2 * a1, a2) and np.array_equal(2 * b1, b2)
    a3, b3 = differential_periods(g2, diff.scaled(0.37))
    assert np.max(np.abs(0.37 * b1 - b3)) < 1e-14 * np.max(np.abs(b1))


def test_period_json_deterministic(g2):
    assert normalized_holomorphic_basis(g2).dumps() == \
        normalized_holomorphic_basis(build_curve(2, [2.0, 4.0], [3.0, 5.5])).dumps()


def test_near_degenerate_quadrature_reports():
    # a 1e-6 gap is admissible but beyond the node ladder
    with pytest.raises(QuadratureNotConverged):
        normalized_holomorphic_basis(build_curve(1, [1.0 + 1e-6], [3.0]))
    # a 1e-3 gap still converges
    assert normalized_holomorphic_basis(build_curve(1, [1.001], [3.0])).riemann[0, 0].imag > 0
