"""Numerical evaluation of the model's closed-form expressions: serving
distance laws, association probabilities, interference Laplace transforms,
SINR coverage and average rate.

Conventions used throughout:

* The LoS-thinned member distance law collapses to a noncentral chi-square
  CDF: F_SL(r) = p_los * RiceCDF(min(r, R_B)), because the LoS probability
  is constant inside the ball and zero outside.
* The intra-cluster interference intensity is (n_members - 1) times the
  *radial* member distance density (LoS part excluded below the serving
  distance, NLoS part unrestricted).  A `literal` evaluation mode keeps the
  alternative form with an explicit 2*pi*r Jacobian for comparison; the
  radial form is the one that is dimensionally consistent and matches
  Monte Carlo.
* The inter-cluster transform treats interfering clusters as carrying a
  Poisson member count with mean n_bs, which makes the per-cluster factor
  exp(-n_bs * ...); a convention flag switches to n_bs - 1.
* Semi-infinite integrals are mapped to [0, 1) by r -> a + c*u/(1-u) with
  a per-integrand scale c; nested tolerances are tightened one order per
  level of nesting.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.special import binom, hyp2f1, i0e
from scipy.stats import ncx2

from .association import Tier, tier_exponent, tier_weight
from .geometry import rician_distance_density
from .params import SystemParams
from .quadrature import (IntegrationResult, QuadSpec, integrate_adaptive,
                         integrate_semi_infinite)

DEFAULT_SPEC = QuadSpec(rel_tol=1e-6, abs_tol=1e-14)
OUTER_SPEC = QuadSpec(rel_tol=1e-5, abs_tol=1e-9)

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(64)


@dataclass
class AnalyticReport:
    value: float
    est_error: float
    evaluations: int


# ---------------------------------------------------------------------------
# elementary pieces
# ---------------------------------------------------------------------------

def j_factor(t):
    """Angular factor J(t) = integral of exp(t cos th) over [-pi, pi],
    equal to 2*pi*I0(t).  Evaluated through the exponentially scaled
    Bessel function; overflows to inf only where the true value exceeds
    the float64 range."""
    t = np.abs(np.asarray(t, dtype=float))
    if not np.all(np.isfinite(t)):
        raise ValueError("j_factor requires finite arguments")
    with np.errstate(over="ignore"):
        out = 2.0 * math.pi * i0e(t) * np.exp(t)
    return out if out.ndim else float(out)


def _rice_cdf(r, v0: float, sigma: float):
    """CDF of the member distance |c + g| with |c| = v0 and isotropic
    normal scatter of spread sigma (noncentral chi-square, 2 dof).

    For large v0/sigma the ncx2 implementation overflows internally, so
    the CDF is then integrated from the exponentially scaled density."""
    r = np.asarray(r, dtype=float)
    a = v0 / sigma
    if a <= 25.0:
        # everything beyond v0 + 9*sigma carries < 1e-16 of the mass;
        # clipping there also keeps the ncx2 argument in its stable range
        r_eff = np.minimum(r, v0 + 9.0 * sigma)
        q = np.square(r_eff / sigma)
        out = np.where(r >= v0 + 9.0 * sigma, 1.0, ncx2.cdf(q, 2, a * a))
        return out if out.ndim else float(out)
    lo = max(v0 - 9.0 * sigma, 0.0)
    hi = np.maximum(r, lo)
    half = 0.5 * (hi - lo)
    nodes = lo + half[..., None] * (_GL_NODES + 1.0)
    dens = _rice_pdf_b(nodes, v0, sigma)
    out = half * np.sum(_GL_WEIGHTS * dens, axis=-1)
    out = np.clip(out, 0.0, 1.0)
    return out if out.ndim else float(out)


def f_sl(r, v0: float, params: SystemParams):
    """LoS-thinned member distance density (integrates to F_SL(R_B))."""
    r = np.asarray(r, dtype=float)
    dens = rician_distance_density(r, v0, params.sigma_bs_m)
    out = np.where(r < params.r_los_ball_m, params.p_los * dens, 0.0)
    return out if out.ndim else float(out)


def F_sl(r, v0: float, params: SystemParams):
    """CDF of the LoS member distance; saturates at p_los*RiceCDF(R_B)."""
    r = np.asarray(r, dtype=float)
    capped = np.minimum(r, params.r_los_ball_m)
    out = params.p_los * np.asarray(_rice_cdf(capped, v0, params.sigma_bs_m))
    return out if out.ndim else float(out)


def _F_sl_max(v0: float, params: SystemParams) -> float:
    return params.p_los * _rice_cdf(params.r_los_ball_m, v0,
                                    params.sigma_bs_m)


def rayleigh_pdf(v, sigma: float):
    v = np.asarray(v, dtype=float)
    out = (v / sigma ** 2) * np.exp(-np.square(v) / (2.0 * sigma ** 2))
    return out if out.ndim else float(out)


def serving_distance_laws(r, v0: float, params: SystemParams) -> dict:
    """Distance laws of the two candidate serving BSs: the nearest
    Sub-6GHz BS (R1) and the nearest intra-cluster LoS mmWave BS (R2),
    plus the single-member LoS law (S_L) they derive from."""
    r = np.asarray(r, dtype=float)
    if np.any(r < 0) or v0 < 0:
        raise ValueError("distances must be nonnegative")
    fsl = f_sl(r, v0, params)
    Fsl = F_sl(r, v0, params)
    lam = params.lambda1
    F_r1 = 1.0 - np.exp(-math.pi * lam * np.square(r))
    f_r1 = 2.0 * math.pi * lam * r * np.exp(-math.pi * lam * np.square(r))
    n = params.n_bs
    bar = 1.0 - Fsl
    F_r2 = 1.0 - bar ** n
    f_r2 = n * bar ** (n - 1) * fsl if n >= 1 else np.zeros_like(r)
    return {"F_SL": Fsl, "f_SL": fsl, "F_R1": F_r1, "f_R1": f_r1,
            "F_R2": F_r2, "f_R2": f_r2}


def _delta12(r, params: SystemParams):
    """Map a Sub-6GHz distance to the mmWave distance of equal metric."""
    w1 = tier_weight(Tier.SUB6, params)
    w2 = tier_weight(Tier.MMWAVE, params)
    a1, a2 = params.alpha1, params.alpha_los
    return (w2 / w1) ** (1.0 / a2) * np.asarray(r, dtype=float) ** (a1 / a2)


def _delta21(r, params: SystemParams):
    w1 = tier_weight(Tier.SUB6, params)
    w2 = tier_weight(Tier.MMWAVE, params)
    a1, a2 = params.alpha1, params.alpha_los
    return (w1 / w2) ** (1.0 / a1) * np.asarray(r, dtype=float) ** (a2 / a1)


def _r1_upper(params: SystemParams) -> float:
    """Radius beyond which the nearest-Sub-6GHz density mass is < 1e-15."""
    lam = max(params.lambda1, 1e-12)
    return math.sqrt(36.0 / (math.pi * lam))


# ---------------------------------------------------------------------------
# association probabilities
# ---------------------------------------------------------------------------

def conditional_assoc_prob(k: int, v0: float, params: SystemParams,
                           spec: QuadSpec = DEFAULT_SPEC) -> float:
    """Probability of serving-tier k given the UE sits at distance v0 from
    its hotspot center."""
    if k not in (1, 2):
        raise ValueError("tier index must be 1 or 2")
    if v0 < 0:
        raise ValueError("v0 must be nonnegative")
    n = params.n_bs
    if k == 2:
        if params.lambda_p == 0 or n == 0 or params.p_los == 0:
            return 0.0
        lam = params.lambda1

        def f(r):
            bar = 1.0 - F_sl(r, v0, params)
            d21 = _delta21(r, params)
            return (n * bar ** (n - 1) * f_sl(r, v0, params)
                    * np.exp(-math.pi * lam * np.square(d21)))

        res = integrate_adaptive(f, 0.0, params.r_los_ball_m, spec)
        return min(max(res.value, 0.0), 1.0)

    # k == 1
    if params.lambda1 == 0:
        return 0.0

    def g(r):
        bar = 1.0 - F_sl(_delta12(r, params), v0, params)
        lam = params.lambda1
        f_r1 = 2.0 * math.pi * lam * r * np.exp(-math.pi * lam * np.square(r))
        return f_r1 * bar ** n

    res = integrate_adaptive(g, 0.0, _r1_upper(params), spec)
    return min(max(res.value, 0.0), 1.0)


def assoc_prob(k: int, params: SystemParams,
               spec: QuadSpec = DEFAULT_SPEC,
               with_report: bool = False):
    """Tier association probability, averaged over the Rayleigh-distributed
    UE-to-center distance."""
    inner = spec.tighter()

    def f(v0):
        v0 = np.atleast_1d(v0)
        vals = [conditional_assoc_prob(k, float(v), params, inner)
                for v in v0]
        return rayleigh_pdf(v0, params.sigma_ue_m) * np.asarray(vals)

    hi = 8.5 * params.sigma_ue_m
    res = integrate_adaptive(f, 0.0, hi, spec)
    value = min(max(res.value, 0.0), 1.0)
    if with_report:
        return AnalyticReport(value, res.est_error, res.evaluations)
    return value


def conditional_distance_pdf(k: int, x, v0: float, params: SystemParams,
                             spec: QuadSpec = DEFAULT_SPEC):
    """Density of the serving distance given tier k and offset v0."""
    a = conditional_assoc_prob(k, v0, params, spec)
    if a <= 0.0:
        raise ValueError(f"conditional distance density undefined: "
                         f"tier {k} has zero association probability")
    x = np.asarray(x, dtype=float)
    n = params.n_bs
    lam = params.lambda1
    if k == 1:
        bar = 1.0 - F_sl(_delta12(x, params), v0, params)
        f_r1 = 2.0 * math.pi * lam * x * np.exp(-math.pi * lam * np.square(x))
        out = f_r1 * bar ** n / a
    else:
        bar = 1.0 - F_sl(x, v0, params)
        d21 = _delta21(x, params)
        out = (n * bar ** (n - 1) * f_sl(x, v0, params)
               * np.exp(-math.pi * lam * np.square(d21)) / a)
    return out if out.ndim else float(out)


# ---------------------------------------------------------------------------
# Laplace transforms
# ---------------------------------------------------------------------------

def _ppp_tail_integral(s, b: float, alpha: float, x):
    """integral_x^inf [1 - 1/(1 + s*b*r^-alpha)] r dr  (vectorized).

    Scaled form: (s*b)^(2/alpha) * Q(x / (s*b)^(1/alpha)) with
    Q(z) = int_z^inf t/(1+t^alpha) dt, expressed through 2F1.
    """
    if alpha <= 2.0:
        raise ValueError("tail integral diverges for alpha <= 2")
    s = np.asarray(s, dtype=float)
    x = np.asarray(x, dtype=float)
    s, x = np.broadcast_arrays(s, x)
    out = np.zeros(s.shape)
    pos = s > 0
    if np.any(pos):
        d = (s[pos] * b) ** (1.0 / alpha)
        z = x[pos] / d
        q0 = (math.pi / alpha) / math.sin(2.0 * math.pi / alpha)
        small = z < 1.0
        q = np.empty_like(z)
        # z < 1: Q(z) = Q(0) - z^2/2 * 2F1(1, 2/a; 1+2/a; -z^a)
        zs = z[small]
        q[small] = q0 - 0.5 * zs ** 2 * hyp2f1(1.0, 2.0 / alpha,
                                               1.0 + 2.0 / alpha,
                                               -zs ** alpha)
        # z >= 1: Q(z) = (1/a) * y^c / c * 2F1(1, c; 1+c; -y), y = z^-a
        zl = z[~small]
        c = 1.0 - 2.0 / alpha
        y = zl ** (-alpha)
        q[~small] = (1.0 / alpha) * (y ** c / c) * hyp2f1(1.0, c, 1.0 + c, -y)
        out[pos] = d ** 2 * q
    return out


def laplace_I1(s, v0: float, x, params: SystemParams):
    """Laplace transform of the Sub-6GHz interference seen past a serving
    BS at distance x (v0 is irrelevant for the PPP tier but kept for
    signature symmetry)."""
    s = np.asarray(s, dtype=float)
    if np.any(s < 0):
        raise ValueError("s must be nonnegative")
    b1 = params.p1_w * params.g1 * params.c1
    expo = 2.0 * math.pi * params.lambda1 * _ppp_tail_integral(
        s, b1, params.alpha1, x)
    out = np.exp(-expo)
    return out if out.ndim else float(out)


def _mm_kernel(s, r, c: float, alpha: float, order: int,
               params: SystemParams):
    """1 - E_G[(1 + s*P2*G*C*r^-alpha)^-N] over the two-level beam gain."""
    p_m = params.p_main
    g = params.p2_w * c
    # unit-mean Nakagami power is Gamma(N, 1/N): E[e^{-zh}] = (1+z/N)^-N
    t_main = (1.0 + s * g * params.g_main * r ** (-alpha) / order) ** (-order)
    t_side = (1.0 + s * g * params.g_side * r ** (-alpha) / order) ** (-order)
    return 1.0 - (p_m * t_main + (1.0 - p_m) * t_side)


def _cluster_exponent(s, v0, x, params: SystemParams,
                      include_nlos: bool = True):
    """Per-member interference exponent of one mmWave cluster whose center
    sits at distance v0: the LoS part integrates the thinned radial
    density from the serving distance x, the NLoS part from zero.

    Broadcasts over s, v0 and x.  Multiplying by (n_members - 1) and
    negating the exponent gives the intra-cluster Laplace transform.
    """
    s = np.asarray(s, dtype=float)
    v0 = np.asarray(v0, dtype=float)
    x = np.asarray(x, dtype=float)
    s, v0, x = np.broadcast_arrays(s, v0, x)
    shape = s.shape
    s = s[..., None]
    v0 = v0[..., None]
    x = x[..., None]
    sig = params.sigma_bs_m
    rb = params.r_los_ball_m
    u = _GL_NODES
    w = _GL_WEIGHTS

    total = np.zeros(shape + (1,))

    # LoS members: support [x, R_B]
    lo = np.clip(x, 0.0, rb)
    half = 0.5 * (rb - lo)
    r = lo + half * (u + 1.0)
    dens = params.p_los * _rice_pdf_b(r, v0, sig)
    ker = _mm_kernel(s, np.maximum(r, 1e-9), params.c_los, params.alpha_los,
                     params.n_nakagami_los, params)
    total += half * np.sum(w * dens * ker, axis=-1, keepdims=True)

    if include_nlos:
        # NLoS members inside the ball: density weight (1 - p_los)
        half1 = 0.5 * rb
        r1 = half1 * (u + 1.0)
        dens1 = (1.0 - params.p_los) * _rice_pdf_b(r1, v0, sig)
        ker1 = _mm_kernel(s, np.maximum(r1, 1e-9), params.c_nlos,
                          params.alpha_nlos, params.n_nakagami_nlos, params)
        total += half1 * np.sum(w * dens1 * ker1, axis=-1, keepdims=True)

        # NLoS members outside the ball: the radial density has effectively
        # compact support [v0 - 8 sigma, v0 + 8 sigma]
        lo2 = np.maximum(rb, v0 - 8.0 * sig)
        hi2 = np.maximum(rb, v0 + 8.0 * sig)
        half2 = 0.5 * (hi2 - lo2)
        r2 = lo2 + half2 * (u + 1.0)
        dens2 = _rice_pdf_b(r2, v0, sig)
        ker2 = _mm_kernel(s, np.maximum(r2, 1e-9), params.c_nlos,
                          params.alpha_nlos, params.n_nakagami_nlos, params)
        total += half2 * np.sum(w * dens2 * ker2, axis=-1, keepdims=True)

    return total[..., 0]


def _rice_pdf_b(r, v0, sigma: float):
    """Broadcasting variant of the member radial density."""
    s2 = sigma * sigma
    return (r / s2) * np.exp(-np.square(r - v0) / (2.0 * s2)) * i0e(v0 * r / s2)


def laplace_I2_intra(s, v0: float, x: float, n_members: int,
                     params: SystemParams, include_nlos: bool = True,
                     mode: str = "radial"):
    """Laplace transform of the intra-cluster mmWave interference given a
    serving LoS member at distance x and n_members cluster members.

    ``mode='radial'`` (default) uses the radial member density as the
    process intensity; ``mode='literal'`` keeps an extra 2*pi*r Jacobian,
    reproducing the printed form of the derivation for comparison.
    """
    if n_members < 1:
        raise ValueError("n_members must be >= 1")
    s = np.asarray(s, dtype=float)
    if np.any(s < 0):
        raise ValueError("s must be nonnegative")
    if mode == "radial":
        expo = (n_members - 1) * _cluster_exponent(s, v0, x, params,
                                                   include_nlos)
    elif mode == "literal":
        expo = (n_members - 1) * _cluster_exponent_literal(
            s, v0, x, params, include_nlos)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    out = np.exp(-expo)
    return out if out.ndim else float(out)


def _cluster_exponent_literal(s, v0, x, params: SystemParams,
                              include_nlos: bool):
    """Printed-form variant: 2*pi * integral f(r) * kernel * r dr with the
    same LoS/NLoS split.  Not dimensionally consistent; comparison only."""
    s = np.asarray(s, dtype=float)
    v0 = np.asarray(v0, dtype=float)
    x = np.asarray(x, dtype=float)
    s, v0, x = np.broadcast_arrays(s, v0, x)
    shape = s.shape
    s = s[..., None]
    v0 = v0[..., None]
    x = x[..., None]
    sig = params.sigma_bs_m
    rb = params.r_los_ball_m
    u, w = _GL_NODES, _GL_WEIGHTS
    total = np.zeros(shape + (1,))
    lo = np.clip(x, 0.0, rb)
    half = 0.5 * (rb - lo)
    r = lo + half * (u + 1.0)
    dens = params.p_los * _rice_pdf_b(r, v0, sig)
    ker = _mm_kernel(s, np.maximum(r, 1e-9), params.c_los, params.alpha_los,
                     params.n_nakagami_los, params)
    total += half * np.sum(w * dens * ker * r, axis=-1, keepdims=True)
    if include_nlos:
        half1 = 0.5 * rb
        r1 = half1 * (u + 1.0)
        dens1 = (1.0 - params.p_los) * _rice_pdf_b(r1, v0, sig)
        ker1 = _mm_kernel(s, np.maximum(r1, 1e-9), params.c_nlos,
                          params.alpha_nlos, params.n_nakagami_nlos, params)
        total += half1 * np.sum(w * dens1 * ker1 * r1, axis=-1, keepdims=True)
        lo2 = np.maximum(rb, v0 - 8.0 * sig)
        hi2 = np.maximum(rb, v0 + 8.0 * sig)
        half2 = 0.5 * (hi2 - lo2)
        r2 = lo2 + half2 * (u + 1.0)
        dens2 = _rice_pdf_b(r2, v0, sig)
        ker2 = _mm_kernel(s, np.maximum(r2, 1e-9), params.c_nlos,
                          params.alpha_nlos, params.n_nakagami_nlos, params)
        total += half2 * np.sum(w * dens2 * ker2 * r2, axis=-1, keepdims=True)
    return 2.0 * math.pi * total[..., 0]


class _InterLaplace:
    """Lazy log-log spline of the inter-cluster Laplace transform.

    The exact exponent A(s) = 2*pi*lambda_p * int [1 - exp(-n*E(s,v))] v dv
    is sampled on a geometric grid of s and interpolated; the grid extends
    on demand.  Values with A > 46 are clamped to 0, A < 1e-9 to 1 (both
    indistinguishable at double precision in the transform itself).
    """

    _LN_STEP = 0.5

    def __init__(self, cluster_exponent: Callable, lambda_p: float,
                 n_factor: int, tail_scale: float,
                 spec: QuadSpec = DEFAULT_SPEC):
        self._expfun = cluster_exponent
        self._lambda_p = lambda_p
        self._n = n_factor
        self._tail_scale = tail_scale
        self._spec = spec
        self._ls: list[float] = []
        self._la: list[float] = []
        self._spline = None

    def exponent_exact(self, s: float) -> float:
        if s <= 0.0 or self._lambda_p == 0 or self._n <= 0:
            return 0.0

        def f(v):
            e = self._expfun(s, np.asarray(v, dtype=float), 0.0)
            return -np.expm1(-self._n * e) * np.asarray(v, dtype=float)

        scale = self._tail_scale
        res = integrate_semi_infinite(f, 0.0, scale, self._spec)
        return 2.0 * math.pi * self._lambda_p * max(res.value, 0.0)

    def _ensure(self, ls_min: float, ls_max: float) -> None:
        changed = False
        if not self._ls:
            mid = 0.5 * (ls_min + ls_max)
            self._insert(mid)
            changed = True
        while self._ls[0] > ls_min and self._la[0] > math.log(1e-9):
            self._insert(self._ls[0] - self._LN_STEP)
            changed = True
        while self._ls[-1] < ls_max and self._la[-1] < math.log(46.0):
            self._insert(self._ls[-1] + self._LN_STEP)
            changed = True
        if changed or self._spline is None:
            if len(self._ls) >= 2:
                self._spline = CubicSpline(self._ls, self._la)
            else:
                self._spline = None

    def _insert(self, ls: float) -> None:
        a = self.exponent_exact(math.exp(ls))
        la = math.log(max(a, 1e-300))
        idx = int(np.searchsorted(self._ls, ls))
        self._ls.insert(idx, ls)
        self._la.insert(idx, la)

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        scalar = s.ndim == 0
        s = np.atleast_1d(s).astype(float)
        out = np.ones_like(s)
        if self._lambda_p == 0 or self._n <= 0:
            return float(out[0]) if scalar else out
        pos = s > 0
        if np.any(pos):
            ls = np.log(s[pos])
            self._ensure(float(ls.min()), float(ls.max()))
            if self._spline is None:
                a = np.array([self.exponent_exact(float(v)) for v in s[pos]])
            else:
                lo, hi = self._ls[0], self._ls[-1]
                la = self._spline(np.clip(ls, lo, hi))
                a = np.exp(la)
                # beyond the sampled range the exponent is clamped
                a[ls > hi] = np.where(self._la[-1] >= math.log(46.0),
                                      100.0, a[ls > hi])
                a[ls < lo] = np.where(self._la[0] <= math.log(1e-9),
                                      0.0, a[ls < lo])
            out[pos] = np.exp(-a)
        return float(out[0]) if scalar else out


@lru_cache(maxsize=8)
def _inter_cache(params: SystemParams, include_nlos: bool,
                 convention: str) -> _InterLaplace:
    if convention == "n_plus_one":
        n_factor = params.n_bs
    elif convention == "n_minus_one":
        n_factor = params.n_bs - 1
    else:
        raise ValueError(f"unknown convention {convention!r}")

    def expfun(s, v, x):
        return _cluster_exponent(s, v, x, params, include_nlos)

    tail = params.r_los_ball_m + 8.0 * params.sigma_bs_m
    return _InterLaplace(expfun, params.lambda_p, n_factor, tail)


def laplace_I2_inter(s, params: SystemParams, include_nlos: bool = True,
                     convention: str = "n_plus_one"):
    """Laplace transform of the inter-cluster mmWave interference (PGFL
    over hotspot centers of the per-cluster transform)."""
    s = np.asarray(s, dtype=float)
    if np.any(s < 0):
        raise ValueError("s must be nonnegative")
    return _inter_cache(params, include_nlos, convention)(s)


# ---------------------------------------------------------------------------
# conditional coverage
# ---------------------------------------------------------------------------

def _kahan_sum(terms: np.ndarray, axis: int = 0) -> np.ndarray:
    """Compensated summation along one axis (alternating Alzer terms)."""
    total = np.zeros(np.delete(np.array(terms.shape), axis))
    comp = np.zeros_like(total)
    for t in np.moveaxis(terms, axis, 0):
        y = t - comp
        acc = total + y
        comp = (acc - total) - y
        total = acc
    return total


def _alzer_terms(n_l: int) -> tuple[np.ndarray, np.ndarray, float]:
    """Signs/binomials and the chi constant of the alternating gamma-tail
    sum; exact (single-term) for n_l == 1."""
    n = np.arange(1, n_l + 1, dtype=float)
    coeff = (-1.0) ** (n + 1.0) * binom(n_l, n)
    chi = n_l * math.gamma(n_l + 1.0) ** (-1.0 / n_l)
    return n, coeff, chi


def _cov1_unnorm(tau: float, v0: float, params: SystemParams,
                 spec: QuadSpec = DEFAULT_SPEC) -> float:
    """A1c(v0) * C1(tau; v0): Sub-6GHz-served coverage mass."""
    if params.lambda1 == 0:
        return 0.0
    b1 = params.p1_w * params.g1 * params.c1
    lam = params.lambda1
    n = params.n_bs
    sigma2 = params.noise1_w

    def f(x):
        x = np.asarray(x, dtype=float)
        s = x ** params.alpha1 * tau / b1
        bar = 1.0 - F_sl(_delta12(x, params), v0, params)
        f_r1 = 2.0 * math.pi * lam * x * np.exp(-math.pi * lam * np.square(x))
        lap = np.exp(-2.0 * math.pi * lam
                     * _ppp_tail_integral(s, b1, params.alpha1, x))
        return f_r1 * bar ** n * np.exp(-s * sigma2) * lap

    res = integrate_adaptive(f, 0.0, _r1_upper(params), spec)
    return max(res.value, 0.0)


def _cov2_unnorm(tau: float, v0: float, params: SystemParams,
                 include_nlos: bool = True,
                 convention: str = "n_plus_one",
                 spec: QuadSpec = DEFAULT_SPEC) -> float:
    """A2c(v0) * C2(tau; v0): mmWave-served coverage mass (Alzer
    approximation of the Nakagami tail)."""
    if params.lambda_p == 0 or params.n_bs == 0 or params.p_los == 0:
        return 0.0
    b2 = params.p2_w * params.g_main * params.c_los
    lam = params.lambda1
    n = params.n_bs
    sigma2 = params.noise2_w
    nvec, coeff, chi = _alzer_terms(params.n_nakagami_los)
    inter = _inter_cache(params, include_nlos, convention)

    def f(x):
        x = np.asarray(x, dtype=float)
        bar = 1.0 - F_sl(x, v0, params)
        w2 = (n * bar ** (n - 1) * f_sl(x, v0, params)
              * np.exp(-math.pi * lam * np.square(_delta21(x, params))))
        s = (x[None, :] ** params.alpha_los * tau
             * chi * nvec[:, None] / b2)                     # (N_L, nx)
        intra = np.exp(-(n - 1) * _cluster_exponent(
            s, v0, x[None, :], params, include_nlos))
        lap = intra * inter(s.ravel()).reshape(s.shape)
        terms = coeff[:, None] * np.exp(-s * sigma2) * lap
        return w2 * _kahan_sum(terms, axis=0)

    # at high thresholds the integrand concentrates on the noise-decay
    # scale; seed the adaptive rule with matching breakpoints
    x_noise = (b2 / (tau * chi * sigma2)) ** (1.0 / params.alpha_los)
    rb = params.r_los_ball_m
    cuts = sorted({0.0, min(4.0 * x_noise, rb), min(32.0 * x_noise, rb), rb})
    value = 0.0
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        value += integrate_adaptive(f, lo, hi, spec).value
    return max(value, 0.0)


def coverage_cond_sub6(tau: float, v0: float, params: SystemParams,
                       spec: QuadSpec = DEFAULT_SPEC) -> float:
    """SINR coverage given Sub-6GHz service and offset v0."""
    if tau <= 0:
        raise ValueError("tau must be positive (linear)")
    a = conditional_assoc_prob(1, v0, params, spec)
    if a <= 0:
        raise ValueError("Sub-6GHz association probability is zero")
    return min(_cov1_unnorm(tau, v0, params, spec) / a, 1.0)


def coverage_cond_mm(tau: float, v0: float, params: SystemParams,
                     include_nlos: bool = True,
                     convention: str = "n_plus_one",
                     spec: QuadSpec = DEFAULT_SPEC) -> float:
    """SINR coverage given mmWave service and offset v0."""
    if tau <= 0:
        raise ValueError("tau must be positive (linear)")
    a = conditional_assoc_prob(2, v0, params, spec)
    if a <= 0:
        raise ValueError("mmWave association probability is zero")
    return min(_cov2_unnorm(tau, v0, params, include_nlos, convention,
                            spec) / a, 1.0)


def coverage(tau: float, params: SystemParams,
             include_nlos: bool = True,
             convention: str = "n_plus_one",
             spec: QuadSpec = OUTER_SPEC,
             with_report: bool = False):
    """Overall SINR coverage probability at linear threshold tau.

    With ``lambda1 == 0`` (mmWave-only deployment) the UE is uncovered
    whenever its cluster has no LoS member, so the result saturates below
    one even for tau -> 0.
    """
    if tau <= 0:
        raise ValueError("tau must be positive (linear)")
    inner = QuadSpec(rel_tol=spec.rel_tol * 0.1, abs_tol=spec.abs_tol * 0.1)

    def f(v0):
        v0 = np.atleast_1d(np.asarray(v0, dtype=float))
        vals = np.empty_like(v0)
        for i, v in enumerate(v0):
            vals[i] = (_cov1_unnorm(tau, float(v), params, inner)
                       + _cov2_unnorm(tau, float(v), params, include_nlos,
                                      convention, inner))
        return rayleigh_pdf(v0, params.sigma_ue_m) * vals

    res = integrate_adaptive(f, 0.0, 8.5 * params.sigma_ue_m, spec)
    value = min(max(res.value, 0.0), 1.0)
    if with_report:
        return AnalyticReport(value, res.est_error, res.evaluations)
    return value


def coverage_no_nlos(tau: float, params: SystemParams,
                     convention: str = "n_plus_one",
                     spec: QuadSpec = OUTER_SPEC) -> float:
    """Coverage with mmWave NLoS interference neglected (upper bound)."""
    return coverage(tau, params, include_nlos=False, convention=convention,
                    spec=spec)


# ---------------------------------------------------------------------------
# two-tier Sub-6GHz baseline (deployment (d))
# ---------------------------------------------------------------------------

def _d_weights(params: SystemParams) -> tuple[float, float]:
    """Association weights of the baseline where small cells move to the
    Sub-6GHz band (omni antennas, Rayleigh fading, macro path loss law)."""
    w1 = params.bias1 * params.p1_w * params.g1 * params.c1
    w2 = params.bias2 * params.p2_w * params.g1 * params.c1
    return w1, w2


def _d_cluster_exponent(s, v0, x, params: SystemParams):
    """Per-member exponent of a Sub-6GHz small-cell cluster: full radial
    member density (no blockage thinning), Rayleigh kernel."""
    s = np.asarray(s, dtype=float)
    v0 = np.asarray(v0, dtype=float)
    x = np.asarray(x, dtype=float)
    s, v0, x = np.broadcast_arrays(s, v0, x)
    shape = s.shape
    s = s[..., None]
    v0 = v0[..., None]
    x = x[..., None]
    sig = params.sigma_bs_m
    b2 = params.p2_w * params.g1 * params.c1
    u, w = _GL_NODES, _GL_WEIGHTS
    lo = np.maximum(x, np.maximum(v0 - 8.0 * sig, 0.0))
    hi = np.maximum(lo, v0 + 8.0 * sig)
    half = 0.5 * (hi - lo)
    r = lo + half * (u + 1.0)
    dens = _rice_pdf_b(r, v0, sig)
    rr = np.maximum(r, 1e-9)
    ker = 1.0 - 1.0 / (1.0 + s * b2 * rr ** (-params.alpha1))
    return (half * np.sum(w * dens * ker, axis=-1, keepdims=True))[..., 0]


@lru_cache(maxsize=8)
def _inter_cache_d(params: SystemParams, convention: str) -> _InterLaplace:
    n_factor = params.n_bs if convention == "n_plus_one" else params.n_bs - 1

    def expfun(s, v, x):
        return _d_cluster_exponent(s, v, x, params)

    return _InterLaplace(expfun, params.lambda_p, n_factor,
                         8.0 * params.sigma_bs_m + 1.0)


def coverage_two_tier_sub6(tau: float, params: SystemParams,
                           convention: str = "n_plus_one",
                           spec: QuadSpec = OUTER_SPEC) -> float:
    """Coverage of the baseline two-tier network with both tiers on the
    Sub-6GHz band (cross-tier interference, Rayleigh fading)."""
    if tau <= 0:
        raise ValueError("tau must be positive (linear)")
    w1, w2 = _d_weights(params)
    alpha = params.alpha1
    b1 = params.p1_w * params.g1 * params.c1
    b2 = params.p2_w * params.g1 * params.c1
    lam = params.lambda1
    lam_p = params.lambda_p
    n = params.n_bs
    sig_ue = params.sigma_ue_m
    sig_bs = params.sigma_bs_m
    sigma2 = params.noise1_w
    ratio12 = (w2 / w1) ** (1.0 / alpha)
    ratio21 = (w1 / w2) ** (1.0 / alpha)
    inter = _inter_cache_d(params, convention)
    inner = QuadSpec(rel_tol=spec.rel_tol * 0.1, abs_tol=spec.abs_tol * 0.1)

    def rice_cdf(r, v0):
        return _rice_cdf(r, v0, sig_bs)

    def cov1(v0: float) -> float:
        if lam == 0:
            return 0.0

        def f(x):
            x = np.asarray(x, dtype=float)
            s = x ** alpha * tau / b1
            bar = 1.0 - rice_cdf(ratio12 * x, v0)
            f_r1 = (2.0 * math.pi * lam * x
                    * np.exp(-math.pi * lam * np.square(x)))
            lap1 = np.exp(-2.0 * math.pi * lam
                          * _ppp_tail_integral(s, b1, alpha, x))
            intra = np.exp(-(n - 1) * _d_cluster_exponent(
                s, v0, ratio12 * x, params))
            return (f_r1 * bar ** n * np.exp(-s * sigma2) * lap1 * intra
                    * inter(s))

        return integrate_adaptive(f, 0.0, _r1_upper(params), inner).value

    def cov2(v0: float) -> float:
        if lam_p == 0 or n == 0:
            return 0.0

        def f(x):
            x = np.asarray(x, dtype=float)
            s = x ** alpha * tau / b2
            bar = 1.0 - rice_cdf(x, v0)
            dens = rician_distance_density(x, v0, sig_bs)
            w2x = (n * bar ** (n - 1) * dens
                   * np.exp(-math.pi * lam * np.square(ratio21 * x)))
            lap1 = np.exp(-2.0 * math.pi * lam
                          * _ppp_tail_integral(s, b1, alpha, ratio21 * x))
            intra = np.exp(-(n - 1) * _d_cluster_exponent(s, v0, x, params))
            return w2x * np.exp(-s * sigma2) * lap1 * intra * inter(s)

        hi = v0 + 9.0 * sig_bs
        return integrate_adaptive(f, 0.0, hi, inner).value

    def f_outer(v0):
        v0 = np.atleast_1d(np.asarray(v0, dtype=float))
        vals = np.array([cov1(float(v)) + cov2(float(v)) for v in v0])
        return rayleigh_pdf(v0, sig_ue) * vals

    res = integrate_adaptive(f_outer, 0.0, 8.5 * sig_ue, spec)
    return min(max(res.value, 0.0), 1.0)


def assoc_prob_two_tier_sub6(k: int, v0: float,
                             params: SystemParams,
                             spec: QuadSpec = DEFAULT_SPEC) -> float:
    """Conditional association probability of the baseline deployment."""
    w1, w2 = _d_weights(params)
    alpha = params.alpha1
    lam = params.lambda1
    n = params.n_bs
    sig_bs = params.sigma_bs_m
    ratio12 = (w2 / w1) ** (1.0 / alpha)
    ratio21 = (w1 / w2) ** (1.0 / alpha)
    if k == 2:
        if params.lambda_p == 0 or n == 0:
            return 0.0

        def f(r):
            bar = 1.0 - _rice_cdf(r, v0, sig_bs)
            dens = rician_distance_density(r, v0, sig_bs)
            return (n * bar ** (n - 1) * dens
                    * np.exp(-math.pi * lam * np.square(ratio21 * r)))

        return integrate_adaptive(f, 0.0, v0 + 9.0 * sig_bs, spec).value
    if lam == 0:
        return 0.0

    def g(r):
        bar = 1.0 - _rice_cdf(ratio12 * r, v0, sig_bs)
        f_r1 = 2.0 * math.pi * lam * r * np.exp(-math.pi * lam * np.square(r))
        return f_r1 * bar ** n

    return integrate_adaptive(g, 0.0, _r1_upper(params), spec).value


# ---------------------------------------------------------------------------
# rate
# ---------------------------------------------------------------------------

def avg_rate(params: SystemParams, include_nlos: bool = True,
             convention: str = "n_plus_one",
             spec: QuadSpec = QuadSpec(rel_tol=1e-3, abs_tol=1e-6),
             tail_tol: float = 1e-5,
             with_report: bool = False):
    """Average achievable rate in bits/s: per-tier bandwidth times the
    integrated conditional coverage over the spectral-efficiency axis.

    A triple-nested quadrature; the default tolerance is deliberately
    looser than the coverage path (0.1% beats the Monte Carlo noise this
    is compared against by an order of magnitude)."""
    inner = QuadSpec(rel_tol=spec.rel_tol, abs_tol=1e-10)
    evaluations = 0

    def rho_integral(unnorm: Callable[[float], float], n_nodes: int) -> float:
        # the spectral-efficiency integrand is smooth and monotone, so a
        # fixed Gauss-Legendre rule on [0, hi] suffices once the
        # truncation point hi is bracketed
        nonlocal evaluations
        hi = 2.0
        while unnorm(2.0 ** hi - 1.0) > tail_tol and hi < 40.0:
            evaluations += 1
            hi *= 1.5
        u, w = np.polynomial.legendre.leggauss(n_nodes)
        rho = 0.5 * hi * (u + 1.0)
        vals = np.array([unnorm(2.0 ** float(r) - 1.0) for r in rho])
        evaluations += n_nodes
        return float(0.5 * hi * np.sum(w * vals))

    def total(n_rho: int, n_v0: int) -> float:
        u, w = np.polynomial.legendre.leggauss(n_v0)
        hi = 6.5 * params.sigma_ue_m
        v0s = 0.5 * hi * (u + 1.0)
        vals = np.empty(n_v0)
        for i, v0 in enumerate(v0s):
            r1 = rho_integral(
                lambda t: _cov1_unnorm(t, float(v0), params, inner), n_rho)
            r2 = rho_integral(
                lambda t: _cov2_unnorm(t, float(v0), params, include_nlos,
                                       convention, inner), n_rho)
            vals[i] = params.w1_hz * r1 + params.w2_hz * r2
        dens = rayleigh_pdf(v0s, params.sigma_ue_m)
        return float(0.5 * hi * np.sum(w * dens * vals))

    value = total(32, 24)
    if with_report:
        coarse = total(16, 12)
        return AnalyticReport(value, abs(value - coarse), evaluations)
    return value
