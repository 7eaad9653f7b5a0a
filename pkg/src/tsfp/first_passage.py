"""First-passage triplet samplers.

Three exact samplers for (crossing time, undershoot, value at crossing):

* ``sfp_sample`` -- stable case, conditional on the crossing happening by
  t_star (t_star = inf for the unconditional law).  The crossing time is
  B_inv of a stable unit draw, creeping is decided by a Bernoulli with the
  explicit conditional probability, and jump crossings draw the undershoot
  followed by the Pareto overshoot transform.
* ``tsfp_sample`` -- tempered case: advance on a fixed grid t_star with
  tempered marginal draws until the crossing interval is found, then
  propose stable triplets conditioned on crossing by t_star and accept via
  the Esscher test E >= q (w + v) with a fresh bridge remainder w.
* ``tsffp_sample`` -- tempered case with linear instead of exponential
  dependence on q b(0): repeatedly apply tsfp_sample to the barrier capped
  at R = (2**alpha - 1)/(2 q), shifting after each partial crossing, until
  the original barrier is crossed.  At most 1 + floor(b(0)/R) rounds.

q = 0 dispatches to the stable sampler in both tempered entry points (the
grid and cap formulas divide by powers of q).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .boundary import Boundary, creep_probability
from .errors import DomainError
from .params import (
    DEFAULT_PRECISION,
    DEFAULT_QUAD,
    Precision,
    QuadratureSpec,
    StableParams,
    TemperedParams,
)
from .rng import RngStream
from .samplers import sample_stable, sample_stable_log, sample_tempered_stable
from .undershoot import make_context, sample_undershoot_scaled


@dataclass(frozen=True)
class PassageTriplet:
    tau: float
    undershoot: float
    value: float
    crept: bool

    def __post_init__(self):
        if not (self.tau > 0.0):
            raise DomainError("crossing time must be positive")


def sfp_sample(
    params: StableParams,
    boundary: Boundary,
    t_star: float = math.inf,
    rng: RngStream = None,
    quad: QuadratureSpec = DEFAULT_QUAD,
    precision: Precision = DEFAULT_PRECISION,
) -> PassageTriplet:
    """Stable first-passage triplet, conditional on the crossing time being
    at most t_star (unconditional when t_star = inf)."""
    if rng is None:
        raise DomainError("an RngStream is required")
    if not (t_star > 0.0):
        raise DomainError("t_star must be positive (or inf)")
    alpha = params.alpha
    counters = rng.counters
    log_floor = (
        boundary.log_B(t_star, alpha) if math.isfinite(t_star) else -math.inf
    )
    while True:
        log_v1 = sample_stable_log(params, 1.0, rng)
        if log_v1 >= log_floor:
            break
        if counters is not None:
            counters.rejections += 1
    tau = boundary.B_inv(alpha, log_v=log_v1, precision=precision)
    b_tau = boundary.value(tau)
    if rng.uniform() <= creep_probability(boundary, tau, alpha):
        return PassageTriplet(tau, b_tau, b_tau, True)
    u2 = rng.uniform()
    log_s = math.log(b_tau) - math.log(params.theta * tau) / alpha
    ctx = make_context(
        alpha, log_s=log_s, quad=quad, precision=precision, counters=counters
    )
    log_zeta, _ = sample_undershoot_scaled(ctx, rng)
    under = math.exp(math.log(params.theta * tau) / alpha - log_zeta / ctx.r)
    under = min(under, math.nextafter(b_tau, 0.0))
    jump_exp = -math.log(u2) / alpha
    overshoot = (b_tau - under) * (math.exp(jump_exp) if jump_exp < 709.0 else math.inf)
    return PassageTriplet(tau, under, under + overshoot, False)


def tsfp_sample(
    tparams: TemperedParams,
    boundary: Boundary,
    rng: RngStream,
    quad: QuadratureSpec = DEFAULT_QUAD,
    precision: Precision = DEFAULT_PRECISION,
) -> PassageTriplet:
    """Tempered stable first-passage triplet via the grid loop plus the
    Esscher accept-reject on stable proposals."""
    alpha, theta, q = tparams.alpha, tparams.theta, tparams.q
    if q == 0.0:
        return sfp_sample(tparams.base, boundary, math.inf, rng, quad, precision)
    counters = rng.counters
    t_star = (2.0 * q * boundary.b0 + 1.0 - 2.0**-alpha) / (
        (2.0**alpha - 1.0) * q**alpha * theta
    )
    big_t = 0.0
    big_u = 0.0
    c = boundary
    while True:
        s = sample_tempered_stable(tparams, t_star, rng)
        if s >= c.value(t_star):
            break
        if counters is not None:
            counters.rejections += 1
        big_t += t_star
        big_u += s
        c = c.shift(t_star, s)
    while True:
        trip = sfp_sample(tparams.base, c, t_star, rng, quad, precision)
        rem = t_star - trip.tau
        w = sample_stable(tparams.base, rem, rng) if rem > 0.0 else 0.0
        e = rng.exponential()
        if e >= q * (w + trip.value):
            break
        if counters is not None:
            counters.rejections += 1
    return PassageTriplet(
        big_t + trip.tau, big_u + trip.undershoot, big_u + trip.value, trip.crept
    )


def tsffp_sample(
    tparams: TemperedParams,
    boundary: Boundary,
    rng: RngStream,
    quad: QuadratureSpec = DEFAULT_QUAD,
    precision: Precision = DEFAULT_PRECISION,
) -> PassageTriplet:
    """Fast tempered stable first-passage triplet via capped barriers.

    Applies tsfp_sample to min(c, R) with R = (2**alpha - 1)/(2 q), shifting
    the frame by each partial crossing, until the accumulated position
    clears the original barrier; the final undershoot is reconstructed from
    the last jump size v - u.
    """
    alpha, q = tparams.alpha, tparams.q
    if q == 0.0:
        return sfp_sample(tparams.base, boundary, math.inf, rng, quad, precision)
    cap_r = (2.0**alpha - 1.0) / (2.0 * q)
    big_t = 0.0
    big_u = 0.0
    c = boundary
    rounds = 0
    while True:
        rounds += 1
        trip = tsfp_sample(tparams, c.cap(cap_r), rng, quad, precision)
        big_t += trip.tau
        big_u += trip.value
        if big_u >= boundary.value(big_t):
            jump = trip.value - trip.undershoot
            return PassageTriplet(big_t, big_u - jump, big_u, trip.crept)
        c = c.shift(trip.tau, trip.value)


def tsffp_rounds_bound(boundary: Boundary, tparams: TemperedParams) -> int:
    """Worst-case number of capped-barrier rounds, 1 + floor(b(0)/R)."""
    if tparams.q == 0.0:
        return 1
    cap_r = (2.0**tparams.alpha - 1.0) / (2.0 * tparams.q)
    return 1 + int(boundary.b0 / cap_r)
