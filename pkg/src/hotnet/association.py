"""Strongest-bias association rule and the tier-boundary distance maps.

Candidates are the nearest Sub-6GHz BS anywhere and the nearest LoS mmWave
BS of the typical UE's own cluster; other mmWave BSs act only as
interferers.  The per-tier weight is ``B_k P_k G_k N_k ell_k(r)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from .channel import MIN_LINK_DISTANCE_M
from .geometry import NetworkRealization
from .params import SystemParams


class Tier(IntEnum):
    SUB6 = 1
    MMWAVE = 2


@dataclass(frozen=True)
class AssociationOutcome:
    tier: Tier
    serving_distance: float
    serving_index: tuple  # ("sub6", i) or ("mm", cluster_idx, member_idx)


def tier_weight(tier: Tier, params: SystemParams) -> float:
    """Distance-independent part of the association metric, intercept
    included."""
    if tier is Tier.SUB6:
        return (params.bias1 * params.p1_w * params.g1 * 1.0 * params.c1)
    return (params.bias2 * params.p2_w * params.g_main
            * params.n_nakagami_los * params.c_los)


def tier_exponent(tier: Tier, params: SystemParams) -> float:
    return params.alpha1 if tier is Tier.SUB6 else params.alpha_los


def biased_metric(tier: Tier, r, params: SystemParams):
    """Bias-averaged received power of a candidate at distance ``r``."""
    r = np.maximum(np.asarray(r, dtype=float), MIN_LINK_DISTANCE_M)
    out = tier_weight(tier, params) * r ** (-tier_exponent(tier, params))
    return out if out.ndim else float(out)


def delta(from_tier: Tier, to_tier: Tier, r, params: SystemParams):
    """Boundary distance map: the other tier's candidate at ``delta(r)``
    has the same biased metric as this tier's candidate at ``r``.

    ``delta(2, 1, .)`` is the exact inverse of ``delta(1, 2, .)``.
    """
    if from_tier == to_tier:
        return np.asarray(r, dtype=float) * 1.0
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise ValueError("r must be nonnegative")
    w_from = tier_weight(from_tier, params)
    w_to = tier_weight(to_tier, params)
    a_from = tier_exponent(from_tier, params)
    a_to = tier_exponent(to_tier, params)
    out = (w_to / w_from) ** (1.0 / a_to) * r ** (a_from / a_to)
    return out if out.ndim else float(out)


def associate(realization: NetworkRealization,
              params: SystemParams) -> AssociationOutcome:
    """Pick the serving BS for the typical UE at the origin.

    Falls back to the Sub-6GHz tier when the typical cluster has no LoS
    member; ties break toward Sub-6GHz.
    """
    if len(realization.sub6_points) == 0:
        raise ValueError("association requires at least one Sub-6GHz BS")
    d_sub6 = np.linalg.norm(realization.sub6_points, axis=1)
    i1 = int(np.argmin(d_sub6))
    r1 = float(d_sub6[i1])
    metric1 = biased_metric(Tier.SUB6, r1, params)

    best_mm = None
    if realization.clusters:
        own = realization.clusters[0]
        if own.los_mask is None:
            raise ValueError("typical cluster is missing LoS labels")
        if own.count and own.los_mask.any():
            d = np.linalg.norm(own.members, axis=1)
            d = np.where(own.los_mask, d, np.inf)
            i2 = int(np.argmin(d))
            best_mm = (i2, float(d[i2]))

    if best_mm is not None:
        i2, r2 = best_mm
        if biased_metric(Tier.MMWAVE, r2, params) > metric1:
            return AssociationOutcome(Tier.MMWAVE,
                                      max(r2, MIN_LINK_DISTANCE_M),
                                      ("mm", 0, i2))
    return AssociationOutcome(Tier.SUB6, max(r1, MIN_LINK_DISTANCE_M),
                              ("sub6", i1))
