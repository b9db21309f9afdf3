"""Adaptive 1-D integration (Gauss-Kronrod 7/15) and monotone root finding.

Integrands must accept numpy arrays; panels are evaluated in batches so
vectorized integrands pay the numpy call overhead once per refinement
sweep, not once per node.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

# 15-point Kronrod nodes on [-1, 1] with embedded 7-point Gauss weights.
_XK = np.array([
    -0.991455371120813, -0.949107912342759, -0.864864423359769,
    -0.741531185599394, -0.586087235467691, -0.405845151377397,
    -0.207784955007898, 0.0,
    0.207784955007898, 0.405845151377397, 0.586087235467691,
    0.741531185599394, 0.864864423359769, 0.949107912342759,
    0.991455371120813,
])
_WK = np.array([
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728,
    0.204432940075298, 0.190350578064785, 0.169004726639267,
    0.140653259715525, 0.104790010322250, 0.063092092629979,
    0.022935322010529,
])
_WG = np.array([
    0.0, 0.129484966168870, 0.0, 0.279705391489277, 0.0,
    0.381830050505119, 0.0, 0.417959183673469, 0.0,
    0.381830050505119, 0.0, 0.279705391489277, 0.0,
    0.129484966168870, 0.0,
])


@dataclass(frozen=True)
class QuadSpec:
    rel_tol: float = 1e-6
    abs_tol: float = 1e-12
    max_depth: int = 60
    max_panels: int = 4000

    def __post_init__(self) -> None:
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise ValueError("tolerances must be positive")

    def tighter(self, factor: float = 0.1) -> "QuadSpec":
        """Spec with tolerances scaled down, for inner nested integrals."""
        return QuadSpec(self.rel_tol * factor, self.abs_tol * factor,
                        self.max_depth, self.max_panels)


@dataclass
class IntegrationResult:
    value: float
    est_error: float
    evaluations: int
    converged: bool

    def __float__(self) -> float:
        return self.value


def _panel_batch(f: Callable, lo: np.ndarray, hi: np.ndarray):
    """Gauss-Kronrod estimates for a batch of panels [lo_i, hi_i]."""
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    x = mid[:, None] + half[:, None] * _XK[None, :]
    fx = np.asarray(f(x.ravel()), dtype=float).reshape(x.shape)
    k15 = half * (fx @ _WK)
    g7 = half * (fx @ _WG)
    err = np.abs(k15 - g7)
    return k15, err


def integrate_adaptive(f: Callable, a: float, b: float,
                       spec: QuadSpec = QuadSpec()) -> IntegrationResult:
    """Integrate ``f`` over [a, b] by recursive panel bisection.

    Returns the best estimate with ``converged=False`` (never raises) when
    the tolerance cannot be met within the panel/depth budget.
    """
    if not (np.isfinite(a) and np.isfinite(b)):
        raise ValueError("bounds must be finite; use integrate_semi_infinite")
    if a > b:
        raise ValueError("need a <= b")
    if a == b:
        return IntegrationResult(0.0, 0.0, 0, True)

    lo = np.array([a], dtype=float)
    hi = np.array([b], dtype=float)
    vals, errs = _panel_batch(f, lo, hi)
    evaluations = 15
    # heap of (-err, lo, hi, val, err, depth)
    heap = [(-errs[0], a, b, vals[0], errs[0], 0)]
    total = vals[0]
    total_err = errs[0]

    while True:
        tol = max(spec.abs_tol, spec.rel_tol * abs(total))
        if total_err <= tol:
            return IntegrationResult(float(total), float(total_err),
                                     evaluations, True)
        if len(heap) >= spec.max_panels:
            break
        # split the worst panels (up to 16 at a time, batched)
        batch = []
        while heap and len(batch) < 16:
            batch.append(heapq.heappop(heap))
        splittable = [p for p in batch if p[5] < spec.max_depth]
        stuck = [p for p in batch if p[5] >= spec.max_depth]
        if not splittable:
            for p in stuck:
                heapq.heappush(heap, p)
            break
        mids = [(0.5 * (p[1] + p[2])) for p in splittable]
        lo = np.array([p[1] for p in splittable] + mids)
        hi = np.array(mids + [p[2] for p in splittable])
        vals, errs = _panel_batch(f, lo, hi)
        evaluations += 15 * len(lo)
        n = len(splittable)
        for i, p in enumerate(splittable):
            total += vals[i] + vals[n + i] - p[3]
            total_err += errs[i] + errs[n + i] - p[4]
            depth = p[5] + 1
            heapq.heappush(heap, (-errs[i], lo[i], hi[i], vals[i], errs[i], depth))
            heapq.heappush(heap, (-errs[n + i], lo[n + i], hi[n + i],
                                  vals[n + i], errs[n + i], depth))
        for p in stuck:
            heapq.heappush(heap, p)

    total = sum(p[3] for p in heap)
    total_err = sum(p[4] for p in heap)
    converged = total_err <= max(spec.abs_tol, spec.rel_tol * abs(total))
    return IntegrationResult(float(total), float(total_err), evaluations,
                             bool(converged))


def integrate_semi_infinite(f: Callable, a: float, scale: float,
                            spec: QuadSpec = QuadSpec()) -> IntegrationResult:
    """Integrate ``f`` over [a, inf) via the substitution
    r = a + scale*u/(1-u), which maps [0, 1) to the half-line.

    ``scale`` should match the decay length of the integrand so the
    transformed integrand is well resolved.
    """
    if scale <= 0:
        raise ValueError("scale must be positive")

    def g(u):
        u = np.asarray(u, dtype=float)
        u = np.minimum(u, 1.0 - 1e-15)
        w = 1.0 - u
        r = a + scale * u / w
        return np.asarray(f(r), dtype=float) * scale / (w * w)

    return integrate_adaptive(g, 0.0, 1.0, spec)


def find_root_monotone(f: Callable[[float], float], target: float,
                       bracket: tuple[float, float], tol: float = 1e-9,
                       max_iter: int = 200) -> float:
    """Solve ``f(x) = target`` for nonincreasing ``f`` by bisection.

    Requires ``f(lo) >= target >= f(hi)``.  On a flat segment any point of
    the segment may be returned.
    """
    lo, hi = bracket
    if lo > hi:
        raise ValueError("bracket must satisfy lo <= hi")
    flo, fhi = f(lo), f(hi)
    if not (flo >= target >= fhi):
        raise ValueError(
            f"bracket does not straddle target: f({lo})={flo}, f({hi})={fhi}, "
            f"target={target}")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if abs(fm - target) <= tol or (hi - lo) <= tol * max(1.0, abs(mid)):
            return mid
        if fm >= target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
