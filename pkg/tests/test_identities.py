import numpy as np
import pytest

from todakit.identities import (random_rational_checks, rat1_residual, rat2_residual,
                                residue_identities)

from conftest import random_curve


def test_rat1_single_term():
    assert rat1_residual(2.0, [3.0]) < 1e-15


def test_rat2_hand_case():
    # us = {1, 3}, x = 2, m = 0: lhs = 1/((3-2)(3-1)(3-1)) = 1/4
    assert rat2_residual(2.0, [1.0, 3.0], 0) < 1e-15


def test_rational_random(rng):
    w1, w2 = random_rational_checks(rng, 100)
    assert w1 < 1e-12 and w2 < 1e-12


@pytest.mark.parametrize("g", [1, 2, 3])
def test_residue_identities(rng, g):
    for _ in range(3):
        c = random_curve(rng, g)
        res = residue_identities(c)
        assert max(res[k] for k in ("res3", "res4", "res5", "res6")) < 1e-8
        assert res["res_main"] < 1e-7


def test_residue_identities_with_alpha(g2):
    res = residue_identities(g2, [0.3, -0.2])
    assert max(res.values()) < 1e-8


def test_g1_res5(g1):
    assert residue_identities(g1)["res5"] < 1e-8
