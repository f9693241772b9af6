import json

import numpy as np
import pytest

from todakit.curve import (ONE, ZERO, BranchId, U, X, build_curve, delta_eval,
                           phi_at_ramification, sqrt_delta_signed, v_basis_at_ramification)
from todakit.errors import (BranchPointHit, DimensionMismatch, InputError,
                            OrderingViolation)


def continued_sqrt(curve, z, steps=3000):
    """Independent oracle: continue sqrt(Delta) from z + 1e6 i (where it is
    ~ +z^(g+1)) straight down to z + 1e-9 i with log-spaced heights."""
    start = z + 1e6j
    path = z + 1j * np.logspace(6, -9, steps)
    w = np.prod([np.sqrt(start - b) for b in curve.branch_points])
    for p in path[1:]:
        r = np.sqrt(complex(delta_eval(curve, p)))
        w = r if abs(r - w) < abs(r + w) else -r
    return w


def test_branch_id_roundtrip():
    for b in (ZERO, ONE, X(1), U(3)):
        assert BranchId.parse(str(b)) == b
    with pytest.raises(ValueError):
        BranchId.parse("y2")


def test_branch_points_and_ids(g2):
    assert list(g2.branch_points) == [0, 1, 2, 3, 4, 5.5]
    assert [str(b) for b in g2.branch_ids] == ["0", "1", "x1", "u1", "x2", "u2"]
    for b in g2.branch_ids:
        assert g2.branch_points[g2.slot(b)] == g2.position(b)


def test_json_roundtrip(g2):
    d = json.loads(json.dumps(g2.to_json()))
    assert build_curve(d["genus"], d["x"], d["u"]) == g2


@pytest.mark.parametrize("g,x,u,err", [
    (1, [3.0], [2.0], OrderingViolation),
    (1, [0.5], [3.0], OrderingViolation),
    (2, [2.0], [3.0], DimensionMismatch),
    (1, [2.0], [2.0 + 1e-12], OrderingViolation),
    (1, [np.nan], [3.0], OrderingViolation),
])
def test_build_curve_rejects(g, x, u, err):
    with pytest.raises(err):
        build_curve(g, x, u)
    with pytest.raises(InputError):
        build_curve(g, x, u)


@pytest.mark.parametrize("z", [-0.7, 0.3, 1.5, 2.4, 3.8, 4.6, 7.0])
def test_sqrt_sign_matches_continuation(g2, z):
    v = sqrt_delta_signed(g2, z)
    assert abs(v - continued_sqrt(g2, z)) < 1e-6 * max(1, abs(v))


def test_sqrt_rejects_branch_point(g1):
    with pytest.raises(BranchPointHit):
        sqrt_delta_signed(g1, 2.0)


def test_phi_squared_is_local_expansion(g2):
    # phi(P_a)^2 = 4 / prod_{c != a}(a - c), whatever the branch
    for b in g2.branch_ids:
        a = g2.position(b)
        others = np.delete(g2.branch_points, g2.slot(b))
        assert abs(phi_at_ramification(g2, b) ** 2 - 4 / np.prod(a - others)) < 1e-14


def test_v_basis_is_lagrange(g2):
    # v_k(P_{u_m}) = delta_km
    for k in (1, 2):
        for m in (1, 2):
            assert abs(v_basis_at_ramification(g2, k, U(m)) - (k == m)) < 1e-14


def test_v1_at_x1_genus1(g1):
    # v_1 = phi / phi(P_u1); with the principal branch this is -i sqrt(3)
    assert abs(v_basis_at_ramification(g1, 1, X(1)) - (-1j * np.sqrt(3))) < 1e-14
