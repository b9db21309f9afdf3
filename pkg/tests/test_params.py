"""Parameter record: unit conversions, validation, derived accessors."""

import math

import pytest

from hotnet.params import (SystemParams, db_to_linear, dbm_to_watts,
                           linear_to_db, noise_power_w)


def test_db_roundtrip():
    for x_db in (-20.0, -3.0, 0.0, 3.0, 18.0, 50.0):
        assert linear_to_db(db_to_linear(x_db)) == pytest.approx(x_db, abs=1e-12)


def test_dbm_to_watts_anchors():
    assert dbm_to_watts(0.0) == pytest.approx(1e-3)
    assert dbm_to_watts(30.0) == pytest.approx(1.0)
    assert dbm_to_watts(40.0) == pytest.approx(10.0)


def test_linear_to_db_rejects_nonpositive():
    with pytest.raises(ValueError):
        linear_to_db(0.0)
    with pytest.raises(ValueError):
        linear_to_db(-1.0)


def test_default_record_is_valid():
    p = SystemParams()
    assert p.lambda1 == pytest.approx(30e-6)
    assert p.lambda_p == pytest.approx(5e-6)
    assert p.p1_w == pytest.approx(10.0)
    assert p.p2_w == pytest.approx(1.0)
    assert p.g_main == pytest.approx(db_to_linear(18.0))
    assert p.bias_ratio == pytest.approx(1.0)


def test_noise_power_formula():
    # -174 dBm/Hz + 10 log10(W) + NF
    p = SystemParams()
    want1 = dbm_to_watts(-174.0 + 10.0 * math.log10(20e6) + 10.0)
    want2 = dbm_to_watts(-174.0 + 10.0 * math.log10(1e9) + 10.0)
    assert p.noise1_w == pytest.approx(want1, rel=1e-12)
    assert p.noise2_w == pytest.approx(want2, rel=1e-12)
    with pytest.raises(ValueError):
        noise_power_w(0.0, 10.0)


def test_mean_interferer_gain_is_beam_average():
    p = SystemParams()
    frac = p.theta_b_rad / (2.0 * math.pi)
    want = frac * p.g_main + (1.0 - frac) * p.g_side
    assert p.mean_interferer_gain == pytest.approx(want, rel=1e-12)
    assert p.p_main == pytest.approx(10.0 / 360.0)


@pytest.mark.parametrize("changes", [
    dict(p_los=1.3),
    dict(p_los=-0.1),
    dict(r_los_ball_m=0.0),
    dict(lambda1_per_km2=-1.0),
    dict(n_bs=-2),
    dict(sigma_bs_m=0.0),
    dict(alpha1=2.0),
    dict(n_nakagami_los=0),
    dict(n_nakagami_los=11),
    dict(theta_b_deg=0.0),
    dict(theta_b_deg=360.0),
    dict(g_main_dbi=-5.0, g_side_dbi=0.0),
    dict(w1_hz=0.0),
    dict(truncation_radius_m=-1.0),
])
def test_validation_rejects(changes):
    with pytest.raises(ValueError):
        SystemParams(**changes)


def test_replace_returns_new_frozen_record():
    p = SystemParams()
    q = p.replace(n_bs=4)
    assert q.n_bs == 4 and p.n_bs == 10
    with pytest.raises(Exception):
        p.n_bs = 5  # type: ignore[misc]


def test_as_dict_round_trips():
    p = SystemParams(n_bs=7, bias2_db=5.0)
    assert SystemParams(**p.as_dict()) == p


def test_bias_ratio_uses_both_biases():
    p = SystemParams(bias1_db=3.0, bias2_db=13.0)
    assert p.bias_ratio == pytest.approx(10.0)
