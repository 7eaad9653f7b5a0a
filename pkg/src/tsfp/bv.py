"""First passage of a two-sided bounded-variation process.

Z = Z+ - Z- is the difference of two independent driftless tempered stable
subordinators.  Z can only cross an upper level at a jump of Z+, so the
first-passage triplet of Z over c is assembled from inner first-passage
triplets of Z+ over the moving level b (via the fast tempered sampler with
constant barriers) and marginals of Z- at the random inner crossing times.
A finite horizon T is mandatory here: the transience criterion that would
justify T = inf is not evaluated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .boundary import Boundary
from .errors import DomainError
from .params import DEFAULT_PRECISION, DEFAULT_QUAD, Precision, QuadratureSpec, TemperedParams
from .first_passage import tsffp_sample
from .rng import RngStream
from .samplers import sample_tempered_stable


@dataclass(frozen=True)
class BVProcessSpec:
    """Z = plus - minus, both driftless tempered stable subordinators."""

    plus: TemperedParams
    minus: TemperedParams


@dataclass(frozen=True)
class BVPassageResult:
    time: float  # min(crossing time, horizon)
    left_limit: float  # Z just before that time
    value: float  # Z at that time
    stopped_by_horizon: bool
    inner_calls: int  # number of inner first-passage rounds used


def bvfp_sample(
    spec: BVProcessSpec,
    c: float,
    horizon: float,
    rng: RngStream,
    quad: QuadratureSpec = DEFAULT_QUAD,
    precision: Precision = DEFAULT_PRECISION,
) -> BVPassageResult:
    """Triplet (min(tau_c, T), Z at its left limit, Z there) for level c > 0.

    Each round samples the next crossing of Z+ over the current adjusted
    level b and the matching Z- increment; if that crossing lands past the
    horizon, the state at T is resampled from the conditional marginals
    (for a subordinator, not having crossed a constant level by a given
    time is the same event as the endpoint lying below it).
    """
    if not (c > 0.0):
        raise DomainError("level c must be > 0")
    if not (horizon > 0.0) or math.isinf(horizon):
        raise DomainError("a finite horizon T > 0 is required")
    counters = rng.counters
    t = 0.0
    h = 0.0
    b = c
    inner = 0
    while True:
        inner += 1
        trip = tsffp_sample(spec.plus, Boundary.constant(b), rng, quad, precision)
        s, u, v = trip.tau, trip.undershoot, trip.value
        w = sample_tempered_stable(spec.minus, s, rng)
        if s + t >= horizon:
            rem = horizon - t
            while True:
                if counters is not None:
                    counters.rejections += 1
                u = sample_tempered_stable(spec.plus, rem, rng) if rem > 0 else 0.0
                if u < b:
                    break
            w = sample_tempered_stable(spec.minus, rem, rng) if rem > 0 else 0.0
            z = h + u - w
            return BVPassageResult(horizon, z, z, True, inner)
        t += s
        h += v - w
        b = b - v + w
        if b < 0.0:
            return BVPassageResult(t, h + u - v, h, False, inner)


def exp_moment_bound(tparams: TemperedParams, c: float, p: float, u: float) -> float:
    """Upper bound 1 + e**(u c)/(psi(u) - p) on E[e**(p tau_c)] for the
    crossing of a constant level c, with psi the Laplace exponent.

    Valid whenever psi(u) > p; also E[tau_c] <= e**(u c)/psi(u)."""
    if not (c > 0.0) or not (u > 0.0):
        raise DomainError("need c > 0 and u > 0")
    psi = tparams.laplace_exponent(u)
    if psi <= p:
        raise DomainError(f"psi(u) = {psi} must exceed p = {p} for a finite bound")
    return 1.0 + math.exp(u * c) / (psi - p)
