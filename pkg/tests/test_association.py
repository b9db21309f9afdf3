"""Biased max-power association and the tier-boundary distance maps."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hotnet.association import (AssociationOutcome, Tier, associate,
                                biased_metric, delta, tier_weight)
from hotnet.geometry import ClusterRealization, NetworkRealization
from hotnet.params import SystemParams

P = SystemParams()


def _net(sub6_xy, mm_xy, mm_los, v0=100.0):
    sub6 = np.asarray(sub6_xy, dtype=float).reshape(-1, 2)
    mm = np.asarray(mm_xy, dtype=float).reshape(-1, 2)
    cl = ClusterRealization(center=np.array([v0, 0.0]), members=mm,
                            los_mask=np.asarray(mm_los, dtype=bool))
    return NetworkRealization(sub6_points=sub6, clusters=[cl],
                              typical_offset_v0=v0, window_radius=3000.0)


def test_tier_weights_include_intercepts():
    w1 = tier_weight(Tier.SUB6, P)
    w2 = tier_weight(Tier.MMWAVE, P)
    assert w1 == pytest.approx(P.bias1 * P.p1_w * P.g1 * P.c1, rel=1e-12)
    assert w2 == pytest.approx(P.bias2 * P.p2_w * P.g_main
                               * P.n_nakagami_los * P.c_los, rel=1e-12)


def test_biased_metric_decays_with_distance():
    r = np.array([10.0, 100.0, 1000.0])
    for tier in Tier:
        m = biased_metric(tier, r, P)
        assert np.all(np.diff(m) < 0)


def test_biased_metric_clamps_below_one_meter():
    assert biased_metric(Tier.SUB6, 0.001, P) == biased_metric(Tier.SUB6, 1.0, P)


@given(st.floats(min_value=1.0, max_value=2000.0),
       st.floats(min_value=-20.0, max_value=60.0))
@settings(max_examples=60, deadline=None)
def test_boundary_maps_are_inverse_pair(r, bias_db):
    p = P.replace(bias2_db=bias_db)
    fwd = delta(Tier.SUB6, Tier.MMWAVE, r, p)
    back = delta(Tier.MMWAVE, Tier.SUB6, fwd, p)
    assert back == pytest.approx(r, rel=1e-9)


@given(st.floats(min_value=1.0, max_value=2000.0))
@settings(max_examples=60, deadline=None)
def test_boundary_map_equalizes_metrics(r):
    # a mmWave candidate at delta(r) ties with a Sub-6GHz candidate at r
    d = delta(Tier.SUB6, Tier.MMWAVE, r, P)
    if d >= 1.0:  # below 1 m the metric clamp breaks the power law
        m1 = biased_metric(Tier.SUB6, r, P)
        m2 = biased_metric(Tier.MMWAVE, d, P)
        assert m2 == pytest.approx(m1, rel=1e-9)


def test_boundary_map_identity_on_same_tier():
    assert delta(Tier.SUB6, Tier.SUB6, 123.0, P) == 123.0


def test_boundary_map_rejects_negative_distance():
    with pytest.raises(ValueError):
        delta(Tier.SUB6, Tier.MMWAVE, -1.0, P)


def test_associate_picks_nearest_sub6_when_no_los():
    net = _net([[50.0, 0.0], [-30.0, 0.0]], [[80.0, 0.0]], [False])
    out = associate(net, P)
    assert out.tier is Tier.SUB6
    assert out.serving_distance == pytest.approx(30.0)
    assert out.serving_index == ("sub6", 1)


def test_associate_picks_strong_los_member():
    # LoS mmWave member very close, Sub-6GHz far: mmWave must win
    net = _net([[900.0, 0.0]], [[20.0, 0.0], [10.0, 0.0]], [True, True])
    out = associate(net, P)
    assert out.tier is Tier.MMWAVE
    assert out.serving_distance == pytest.approx(10.0)
    assert out.serving_index == ("mm", 0, 1)


def test_associate_ignores_nlos_members_as_candidates():
    net = _net([[900.0, 0.0]], [[10.0, 0.0]], [False])
    out = associate(net, P)
    assert out.tier is Tier.SUB6


def test_associate_matches_metric_comparison():
    rng = np.random.default_rng(31)
    for _ in range(200):
        sub6 = rng.uniform(-500, 500, size=(5, 2))
        mm = rng.uniform(-300, 300, size=(4, 2))
        los = rng.random(4) < 0.5
        net = _net(sub6, mm, los)
        out = associate(net, P)
        r1 = np.linalg.norm(sub6, axis=1).min()
        m1 = biased_metric(Tier.SUB6, r1, P)
        d = np.linalg.norm(mm, axis=1)
        if los.any():
            r2 = d[los].min()
            m2 = biased_metric(Tier.MMWAVE, r2, P)
        else:
            m2 = -np.inf
        want = Tier.MMWAVE if m2 > m1 else Tier.SUB6
        assert out.tier is want


def test_tie_breaks_toward_sub6():
    # nudge the mmWave candidate onto (or a hair past) the equal-metric
    # boundary so its metric does not exceed the Sub-6GHz one
    r1 = 200.0
    m1 = biased_metric(Tier.SUB6, r1, P)
    r2 = delta(Tier.SUB6, Tier.MMWAVE, r1, P)
    while biased_metric(Tier.MMWAVE, r2, P) > m1:
        r2 = np.nextafter(r2, np.inf)
    net = _net([[r1, 0.0]], [[r2, 0.0]], [True])
    out = associate(net, P)
    assert out.tier is Tier.SUB6


def test_associate_requires_sub6_point():
    net = _net(np.empty((0, 2)), [[10.0, 0.0]], [True])
    with pytest.raises(ValueError):
        associate(net, P)


def test_outcome_is_immutable():
    out = AssociationOutcome(Tier.SUB6, 10.0, ("sub6", 0))
    with pytest.raises(Exception):
        out.tier = Tier.MMWAVE  # type: ignore[misc]
