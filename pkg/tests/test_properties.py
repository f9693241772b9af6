import numpy as np
from hypothesis import given, settings, strategies as st
from numpy.polynomial import polynomial as P

from todakit.curve import BranchId, build_curve
from todakit.equilibrium import equilibrium_measures
from todakit.identities import rat1_residual, rat2_residual
from todakit.pell import poly_sqrt
from todakit.periods import normalized_holomorphic_basis

gaps = st.floats(0.2, 2.0)


@st.composite
def curves(draw, max_genus=3):
    g = draw(st.integers(1, max_genus))
    pts = 1.0 + np.cumsum([draw(gaps) for _ in range(2 * g)])
    return build_curve(g, pts[0::2], pts[1::2])


@settings(max_examples=25, deadline=None)
@given(curves())
def test_riemann_matrix_invariants(c):
    B = normalized_holomorphic_basis(c).riemann
    assert np.max(np.abs(B - B.T)) < 1e-10
    assert np.min(np.linalg.eigvalsh(B.imag)) > 0


@settings(max_examples=25, deadline=None)
@given(curves())
def test_measures_probability(c):
    rho = equilibrium_measures(c)
    assert abs(rho.sum() - 1) < 1e-10 and np.all(rho > 0)


@settings(max_examples=25, deadline=None)
@given(curves())
def test_json_roundtrip(c):
    d = c.to_json()
    assert build_curve(d["genus"], d["x"], d["u"]) == c
    for b in c.branch_ids:
        assert BranchId.parse(str(b)) == b


cplx = st.complex_numbers(min_magnitude=0.1, max_magnitude=5, allow_nan=False,
                          allow_infinity=False)


def _separated(us, x):
    pts = list(us) + [x]
    return min(abs(a - b) for i, a in enumerate(pts) for b in pts[i + 1:]) > 0.05


@settings(max_examples=100, deadline=None)
@given(st.lists(cplx, min_size=1, max_size=6), cplx, st.data())
def test_rational_identities(us, x, data):
    if not _separated(us, x):
        return
    assert rat1_residual(x, us) < 1e-9
    m = data.draw(st.integers(0, len(us) - 1))
    assert rat2_residual(x, us, m) < 1e-9


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-3, 3), min_size=1, max_size=5), st.floats(0.1, 3))
def test_poly_sqrt_roundtrip(q, lead):
    q = np.array(q + [lead])
    r = poly_sqrt(P.polymul(q, q))
    assert np.max(np.abs(P.polymul(r, r) - P.polymul(q, q))) < 1e-8 * max(1, np.max(q ** 2))
