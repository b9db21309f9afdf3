"""Spatial point processes: homogeneous PPP, Thomas clusters, UE offset.

Points are float arrays of shape ``(n, 2)`` in meters; the typical UE sits
at the origin.  All samplers are pure given an ``np.random.Generator``, so
distinct trials with distinct generators can run in parallel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.special import i0e

from .params import SystemParams

Point2D = np.ndarray  # shape (2,)


@dataclass
class ClusterRealization:
    """One hotspot: a parent point and its Gaussian-scattered members.

    ``los_mask`` marks members with a line-of-sight link to the origin; it
    is filled in when the cluster is part of a sampled network.
    """

    center: np.ndarray
    members: np.ndarray            # shape (m, 2)
    los_mask: Optional[np.ndarray] = None

    @property
    def count(self) -> int:
        return len(self.members)


@dataclass
class NetworkRealization:
    """One sampled world seen from the typical UE at the origin.

    Cluster index 0 is the typical UE's own hotspot and always holds
    exactly ``n_bs`` members; interfering clusters carry Poisson counts.
    """

    sub6_points: np.ndarray                 # shape (n, 2)
    clusters: Sequence[ClusterRealization]
    typical_offset_v0: float
    window_radius: float


def sample_ppp(density: float, window_radius: float,
               rng: np.random.Generator) -> np.ndarray:
    """Homogeneous PPP on a disk centered at the origin."""
    if not (np.isfinite(density) and np.isfinite(window_radius)):
        raise ValueError("density and window_radius must be finite")
    if density < 0 or window_radius <= 0:
        raise ValueError("need density >= 0 and window_radius > 0")
    n = rng.poisson(density * math.pi * window_radius ** 2)
    r = window_radius * np.sqrt(rng.random(n))
    phi = rng.uniform(0.0, 2.0 * math.pi, n)
    return np.column_stack((r * np.cos(phi), r * np.sin(phi)))


def sample_thomas_cluster(center: np.ndarray, sigma: float, count: int,
                          rng: np.random.Generator) -> ClusterRealization:
    """Scatter ``count`` members around ``center`` with isotropic normal
    offsets of standard deviation ``sigma``."""
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    if count < 0:
        raise ValueError("count must be nonnegative")
    center = np.asarray(center, dtype=float)
    offsets = rng.normal(0.0, sigma, size=(count, 2))
    return ClusterRealization(center=center, members=center + offsets)


def sample_typical_offset(sigma_ue: float, rng: np.random.Generator) -> float:
    """Distance from the typical UE to its own hotspot center, Rayleigh
    distributed with scale ``sigma_ue``."""
    if sigma_ue <= 0:
        raise ValueError("sigma_ue must be positive")
    return float(rng.rayleigh(sigma_ue))


def rician_distance_density(r, v0: float, sigma: float):
    """Radial density of |c + g| where g is isotropic normal with spread
    ``sigma`` and ``|c| = v0``: the distance from the origin to a cluster
    member whose parent sits at distance ``v0``.

    Evaluated in exponentially scaled form so large ``v0*r/sigma**2``
    arguments do not overflow.  Reduces to the Rayleigh density at v0=0.
    """
    if v0 < 0:
        raise ValueError("v0 must be nonnegative")
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise ValueError("r must be nonnegative")
    s2 = sigma * sigma
    # (r/s2) * exp(-(r^2+v0^2)/(2 s2)) * I0(v0 r / s2)
    #   = (r/s2) * exp(-(r-v0)^2/(2 s2)) * i0e(v0 r / s2)
    out = (r / s2) * np.exp(-((r - v0) ** 2) / (2.0 * s2)) * i0e(v0 * r / s2)
    return out if out.ndim else float(out)


def sample_network(params: SystemParams, rng: np.random.Generator,
                   with_sub6: bool = True,
                   with_mmwave: bool = True) -> NetworkRealization:
    """Draw one full network realization.

    Hotspot centers are sampled on a window enlarged by six cluster
    standard deviations so clusters straddling the boundary are kept.  The
    typical cluster (index 0) has a fixed member count ``n_bs``; the others
    are Poisson with the same mean.  LoS labels are i.i.d. thinning draws.
    """
    window = min(params.window_radius_m, params.truncation_radius_m)
    v0 = sample_typical_offset(params.sigma_ue_m, rng)
    psi = rng.uniform(0.0, 2.0 * math.pi)
    c0 = v0 * np.array([math.cos(psi), math.sin(psi)])

    sub6 = (sample_ppp(params.lambda1, window, rng) if with_sub6
            else np.empty((0, 2)))

    clusters: list[ClusterRealization] = []
    if with_mmwave:
        clusters.append(
            sample_thomas_cluster(c0, params.sigma_bs_m, params.n_bs, rng))
        enlarged = window + 6.0 * max(params.sigma_bs_m, params.sigma_ue_m)
        centers = sample_ppp(params.lambda_p, enlarged, rng)
        counts = rng.poisson(params.n_bs, size=len(centers))
        for center, m in zip(centers, counts):
            clusters.append(
                sample_thomas_cluster(center, params.sigma_bs_m, int(m), rng))
        for cl in clusters:
            d = np.linalg.norm(cl.members, axis=1)
            cl.los_mask = ((rng.random(len(d)) < params.p_los)
                           & (d < params.r_los_ball_m))

    return NetworkRealization(sub6_points=sub6, clusters=clusters,
                              typical_offset_v0=v0, window_radius=window)
