"""Empirical growth diagnostics for computed coefficient arrays.

Everything here is approximate by nature.  Coefficient magnitudes are taken
from exact rationals into ``mpmath`` floats with a 113-bit significand, and
only the final least-squares fit runs in double precision.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Sequence

import mpmath
import numpy as np

from .series import Series
from .solver import FormalSolution

PRECISION_BITS = 113
MIN_POINTS = 5
DEFAULT_RADIUS_FLOOR = 0.15


class InsufficientData(ValueError):
    pass


def _ctx() -> mpmath.ctx_mp.MPContext:
    ctx = mpmath.mp.clone()
    ctx.prec = PRECISION_BITS
    return ctx


def _phi(source: FormalSolution | Sequence[Series]) -> tuple[Series, ...]:
    return source.phi if isinstance(source, FormalSolution) else tuple(source)


@dataclass(frozen=True)
class GrowthProfile:
    """``maxima[d - 1]`` is the largest ``|c_k|`` over ``|k| = d``."""

    maxima: tuple
    zero_degrees: tuple[int, ...]

    @property
    def order(self) -> int:
        return len(self.maxima)

    @property
    def degenerate(self) -> bool:
        return len(self.zero_degrees) == len(self.maxima)

    def as_floats(self) -> list[float]:
        return [float(x) for x in self.maxima]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["degree", "max_abs_coeff"])
        for d, v in enumerate(self.maxima, start=1):
            # repr-style float keeps the decimal point locale-independent
            w.writerow([d, repr(float(v))])
        return buf.getvalue()


def degree_profile(source: FormalSolution | Sequence[Series]) -> GrowthProfile:
    phi = _phi(source)
    N = min(s.trunc for s in phi)
    if N < 1:
        raise ValueError("profile needs order >= 1")
    exact = [0] * (N + 1)
    for s in phi:
        for k, c in s.terms.items():
            d = sum(k)
            if 1 <= d <= N and abs(c) > exact[d]:
                exact[d] = abs(c)
    ctx = _ctx()
    maxima = tuple(ctx.mpf(v.numerator) / v.denominator if v else ctx.mpf(0) for v in exact[1:])
    zeros = tuple(d for d in range(1, N + 1) if not exact[d])
    return GrowthProfile(maxima, zeros)


@dataclass(frozen=True)
class GevreyFit:
    """``log M_d ~ log_c + d*log_a + s*log(d!)``."""

    s: float
    log_a: float
    log_c: float
    r_squared: float
    degrees: tuple[int, ...]

    def verdict(self) -> str:
        if self.s > 0.5:
            return "factorial-type growth: likely divergent"
        return "geometric growth: consistent with convergence"


def gevrey_fit(profile: GrowthProfile | Sequence) -> GevreyFit:
    maxima = profile.maxima if isinstance(profile, GrowthProfile) else tuple(profile)
    pts = [(d, v) for d, v in enumerate(maxima, start=1) if v > 0]
    if len(pts) < MIN_POINTS:
        raise InsufficientData(f"need at least {MIN_POINTS} nonzero degrees, have {len(pts)}")
    ctx = _ctx()
    d = np.array([p[0] for p in pts], dtype=float)
    y = np.array([float(ctx.log(ctx.mpf(p[1]))) for p in pts])
    X = np.column_stack([np.ones_like(d), d, [math.lgamma(x + 1) for x in d]])
    coef, *_ = np.linalg.lstsq(X, y, rcond=None)
    fitted = X @ coef
    ss_res = float(np.sum((y - fitted) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0 else 1.0 - ss_res / ss_tot
    log_c, log_a, s = (float(v) for v in coef)
    return GevreyFit(s, log_a, log_c, r2, tuple(p[0] for p in pts))


def ray_coefficients(source: FormalSolution | Sequence[Series], direction: str | int) -> list:
    """Coefficients ``a_d`` of ``phi`` restricted to a ray, as high-precision magnitudes.

    ``direction`` is an axis number (other variables set to zero) or
    ``"diagonal"`` (all variables equal).  Vector solutions take the largest
    component magnitude per degree.
    """
    phi = _phi(source)
    N = min(s.trunc for s in phi)
    m = phi[0].m
    if direction != "diagonal":
        axis = int(direction)
        if not 1 <= axis <= m:
            raise ValueError(f"axis {axis} out of range 1..{m}")
    ctx = _ctx()
    out = [ctx.mpf(0)] * (N + 1)
    for s in phi:
        sums = [0] * (N + 1)
        for k, c in s.terms.items():
            if direction == "diagonal":
                sums[sum(k)] += c
            elif all(e == 0 for i, e in enumerate(k) if i != axis - 1):
                sums[k[axis - 1]] += c
        for j, v in enumerate(sums):
            if v:
                out[j] = max(out[j], ctx.mpf(abs(v).numerator) / abs(v).denominator)
    return out


def radius_estimate(source: FormalSolution | Sequence[Series], direction: str | int = "diagonal") -> float:
    """Cauchy-Hadamard ``1 / limsup |a_d|^(1/d)`` over the last third of the degrees."""
    a = ray_coefficients(source, direction)
    N = len(a) - 1
    nonzero = [d for d in range(1, N + 1) if a[d] > 0]
    if len(nonzero) < MIN_POINTS:
        raise InsufficientData(f"ray {direction!r} has {len(nonzero)} nonzero coefficients")
    start = N - N // 3 + 1 if N >= 3 else 1
    tail = [d for d in nonzero if d >= start] or nonzero[-1:]
    ctx = _ctx()
    root = max(ctx.power(a[d], ctx.mpf(1) / d) for d in tail)
    return float(1 / root)
