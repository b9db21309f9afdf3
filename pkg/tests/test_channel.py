"""Blockage, path loss, fading and antenna-gain primitives."""

import numpy as np
import pytest

from hotnet.channel import (LinkClass, MIN_LINK_DISTANCE_M,
                            interferer_antenna_gain, los_probability,
                            nakagami_order, path_loss, sample_fading_power)
from hotnet.params import SystemParams

P = SystemParams()


def test_los_probability_is_thinned_indicator():
    r = np.array([0.0, 50.0, 199.999, 200.0, 500.0])
    out = los_probability(r, P)
    np.testing.assert_allclose(out, [0.2, 0.2, 0.2, 0.0, 0.0])


def test_los_probability_boundary_is_open():
    # exactly at the ball radius the link is blocked
    assert los_probability(P.r_los_ball_m, P) == 0.0


def test_los_probability_rejects_negative():
    with pytest.raises(ValueError):
        los_probability(-1.0, P)


@pytest.mark.parametrize("link,c,alpha", [
    (LinkClass.SUB6, P.c1, P.alpha1),
    (LinkClass.MM_LOS, P.c_los, P.alpha_los),
    (LinkClass.MM_NLOS, P.c_nlos, P.alpha_nlos),
])
def test_path_loss_power_law(link, c, alpha):
    for r in (1.0, 10.0, 123.4):
        assert path_loss(link, r, P) == pytest.approx(c * r ** (-alpha),
                                                      rel=1e-12)


def test_path_loss_clamped_below_one_meter():
    assert path_loss(LinkClass.SUB6, 0.01, P) == path_loss(
        LinkClass.SUB6, MIN_LINK_DISTANCE_M, P)


def test_path_loss_rejects_nonpositive():
    with pytest.raises(ValueError):
        path_loss(LinkClass.SUB6, 0.0, P)


def test_nakagami_orders():
    assert nakagami_order(LinkClass.SUB6, P) == 1
    assert nakagami_order(LinkClass.MM_LOS, P) == P.n_nakagami_los
    assert nakagami_order(LinkClass.MM_NLOS, P) == P.n_nakagami_nlos


@pytest.mark.parametrize("link", list(LinkClass))
def test_fading_power_has_unit_mean_and_right_variance(link):
    rng = np.random.default_rng(12345)
    h = sample_fading_power(link, P, rng, size=200_000)
    n = nakagami_order(link, P)
    # Gamma(n, 1/n): mean 1, variance 1/n
    assert np.mean(h) == pytest.approx(1.0, abs=0.01)
    assert np.var(h) == pytest.approx(1.0 / n, rel=0.03)


def test_interferer_gain_two_level_pattern():
    rng = np.random.default_rng(7)
    g = interferer_antenna_gain(P, rng, size=100_000)
    assert set(np.unique(g)) == {P.g_side, P.g_main}
    frac_main = np.mean(g == P.g_main)
    assert frac_main == pytest.approx(P.p_main, abs=0.003)
