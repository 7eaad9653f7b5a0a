"""Exact sampling of the stable undershoot law.

Conditional on a stable subordinator crossing its barrier at time t, with
barrier value w and a positive jump, the position just before the jump has
density proportional to x -> (w - x)**(-alpha) g_t(x) on (0, w).  After the
scaling s = (theta t)**(-1/alpha) w and the change of variable
zeta = (x / (theta t)**(1/alpha))**(-r), sampling reduces to the pair
(zeta, Y) with density proportional to

    (s - zeta**(-1/r))**(-alpha) * sigma(Y) * exp(-sigma(Y) zeta)

on (s**-r, inf) x (0,1).  The sampler proposes from the two-component
mixture (proportions p : 1-p) whose components drop or keep the
(zeta - s**-r)**(-alpha) factor, and accepts with the ratio

    (s - zeta**(-1/r))**(-alpha)
    ----------------------------------------------------------
    (1-2**(alpha-1))**(-alpha) s**(-alpha)
        + (2r)**alpha s**(-r) (zeta - s**(-r))**(-alpha)

which lies in ((1-alpha)/2, 1], so the outer loop needs at most 2/(1-alpha)
rounds on average, uniformly in s.

Every power of s and every excess zeta - s**-r is carried in the log
domain: s is stable-distributed when called from the first-passage sampler
and r explodes as alpha -> 1, so raw doubles overflow routinely.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

from .errors import DomainError
from .params import DEFAULT_PRECISION, DEFAULT_QUAD, Precision, QuadratureSpec
from .rng import RngStream
from .rootfind import (
    half_interval_cdf_c1,
    invert_F_c1,
    invert_rho_power,
    invert_sigma,
    invert_u_sigma_alpha,
)
from .samplers import sample_gamma, sample_logconcave
from .zolotarev import (
    log_kernel_integral,
    log_region_weights,
    log_rho,
    log_rho_d1,
    log_sigma_zero,
    logaddexp,
)


def _log_sigma(y: float, alpha: float) -> float:
    return log_rho(y, alpha) / (1.0 - alpha)


def _log_ftilde(y: float, alpha: float, w: float, a_coef: float) -> float:
    """log of sigma(y)**a_coef * exp(-sigma(y) e**w), with endpoint limits."""
    if y >= 1.0:
        return -math.inf
    ls = log_sigma_zero(alpha) if y <= 0.0 else _log_sigma(y, alpha)
    arg = ls + w
    return a_coef * ls - (math.exp(arg) if arg < 709.0 else math.inf)


@dataclass(frozen=True)
class PsiSample:
    """One proposal draw: y in (0,1) and zeta > s**-r via its log excess."""

    y: float
    log_excess: float  # log(zeta - s**-r)
    log_s: float
    r: float

    @property
    def zeta(self) -> float:
        return math.exp(logaddexp(-self.r * self.log_s, self.log_excess))


@dataclass(frozen=True)
class UndershootContext:
    """Precomputed state for repeated proposals at fixed (alpha, s).

    z solves sigma(z) = alpha s**r (z = 0 when the target is below
    sigma(0+)), z_star = min(z, 1/2), the three log-masses split the second
    proposal's y-marginal over (0, z_star), (z_star, z), (z, 1), and p is
    the mixture weight of the first component.
    """

    alpha: float
    log_s: float
    z: float
    z_star: float
    log_w: tuple[float, float, float]
    p: float
    log_pprime: float
    quad: QuadratureSpec = field(default=DEFAULT_QUAD, repr=False)
    precision: Precision = field(default=DEFAULT_PRECISION, repr=False)

    @property
    def r(self) -> float:
        return self.alpha / (1.0 - self.alpha)

    @property
    def s(self) -> float:
        return math.exp(self.log_s)


def make_context(
    alpha: float,
    s: Optional[float] = None,
    log_s: Optional[float] = None,
    quad: QuadratureSpec = DEFAULT_QUAD,
    precision: Precision = DEFAULT_PRECISION,
    counters=None,
) -> UndershootContext:
    if log_s is None:
        if s is None or not (s > 0.0) or not math.isfinite(s):
            raise DomainError("provide finite positive s or log_s")
        log_s = math.log(s)
    if not (0.0 < alpha < 1.0):
        raise DomainError("alpha must lie in (0,1)")
    r = alpha / (1.0 - alpha)
    log_target = math.log(alpha) + r * log_s  # log(alpha * s**r)
    if log_target < log_sigma_zero(alpha):
        z = 0.0
    else:
        z = invert_sigma(
            alpha, log_target=log_target, precision=precision, counters=counters
        )
    z_star = min(z, 0.5)
    log_w = log_region_weights(log_s, alpha, z, z_star, quad, counters)
    # the second marginal mass is the sum of the region masses, so only the
    # first marginal integral is computed afresh for the mixture weight
    log_i2 = logaddexp(logaddexp(log_w[0], log_w[1]), log_w[2])
    log_i1 = log_kernel_integral(alpha, 0.0, -r * log_s, 0.0, 1.0, quad, counters)
    log_pp = (
        -alpha * math.log(2.0 - 2.0**alpha)
        - alpha * math.log(r)
        + alpha * r * log_s
        + log_i1
        - math.lgamma(1.0 - alpha)
        - log_i2
    )
    p = 1.0 / (1.0 + math.exp(-log_pp)) if log_pp > -709.0 else math.exp(log_pp)
    return UndershootContext(alpha, log_s, z, z_star, log_w, p, log_pp, quad, precision)


# ---------------------------------------------------------------------------
# first mixture component
# ---------------------------------------------------------------------------


def sample_psi1(ctx: UndershootContext, rng: RngStream) -> PsiSample:
    """Draw (zeta, y) with y-marginal density proportional to
    exp(-sigma(y) s**-r) and zeta - s**-r | y exponential with rate sigma(y).

    The y-marginal is rescaled to the log-concave normal form by dividing
    out its value at 0, i.e. the rejection sampler sees
    exp(-(sigma(y) - sigma(0+)) s**-r), which is 1 at 0 and nonincreasing.
    """
    alpha = ctx.alpha
    r = ctx.r
    w = -r * ctx.log_s
    ls0 = log_sigma_zero(alpha)
    scale0 = math.exp(ls0 + w)  # sigma(0+) s**-r; finite by the overflow guard

    def log_f(y: float) -> float:
        if y <= 0.0:
            return 0.0
        if y >= 1.0:
            return -math.inf
        return -scale0 * math.expm1(_log_sigma(y, alpha) - ls0)

    y, _ = sample_logconcave(rng, log_f=log_f, check_normal_form=False)
    e = rng.exponential()
    log_excess = math.log(e) - _log_sigma(y, alpha)
    return PsiSample(y, log_excess, ctx.log_s, r)


# ---------------------------------------------------------------------------
# second mixture component
# ---------------------------------------------------------------------------


def h_b(y: float, alpha: float, w: float) -> float:
    """Acceptance on (0, z_star): exp(-sigma(y) s**-r) over
    1 + alpha y sigma'(y)/sigma(y); bounded below by about 0.0823."""
    ls = _log_sigma(y, alpha)
    lprime = log_rho_d1(y, alpha) / (1.0 - alpha)
    arg = ls + w
    return math.exp(-(math.exp(arg) if arg < 709.0 else math.inf)) / (
        1.0 + alpha * y * lprime
    )


def h_c1(y: float, alpha: float, w: float) -> float:
    """Acceptance on (1/2, z) for alpha <= 1/2; bounded below by
    4/(3 pi sqrt(e)) ~ 0.25742."""
    a = math.sin(math.pi * (1.0 - alpha))
    b = math.pi * alpha * (1.0 - alpha) * math.cos(math.pi * alpha)
    r = alpha / (1.0 - alpha)
    ls = _log_sigma(y, alpha)
    arg = ls + w
    num = (
        alpha * ls
        - (math.exp(arg) if arg < 709.0 else math.inf)
        + (1.0 - alpha) * math.log(a)
        + r * math.log(2.0)
        + r * math.log1p(-y)
    )
    return math.exp(num) / (a + b * (1.0 - y))


def h_c2(y: float, alpha: float, w: float) -> float:
    """Acceptance on (1/2, z) for alpha > 1/2:
    C e**(-sigma(y) s**-r) rho(y)**2/rho'(y), C = rho'(1/2)/rho(1/2)**2."""
    c = log_rho_d1(0.5, alpha) * math.exp(-log_rho(0.5, alpha))
    ls = _log_sigma(y, alpha)
    arg = ls + w
    expo = log_rho(y, alpha) - (math.exp(arg) if arg < 709.0 else math.inf)
    return c * math.exp(expo) / log_rho_d1(y, alpha)


def sample_psi2(ctx: UndershootContext, rng: RngStream) -> PsiSample:
    """Draw (zeta, y) with y-marginal proportional to
    sigma(y)**alpha exp(-sigma(y) s**-r) and a Gamma(1-alpha, sigma(y)) excess.

    The y-marginal is split at z_star = min(z, 1/2) and z.  Region (0,
    z_star) inverts u sigma(u)**alpha and corrects by h_b; region (1/2, z)
    proposes by a closed form (alpha = 1/2), the polynomial antiderivative
    (alpha < 1/2, corrected by h_c1) or the rho**(r-1) quantile map
    (alpha > 1/2, corrected by h_c2); region (z, 1) is log-concave with
    mode z and goes through the universal rejection sampler after an affine
    rescale to [0,1].
    """
    alpha = ctx.alpha
    r = ctx.r
    w = -r * ctx.log_s
    counters = rng.counters

    lw0, lw1, lw2 = ctx.log_w
    lt = logaddexp(logaddexp(lw0, lw1), lw2)
    w0 = math.exp(lw0 - lt) if lw0 > -math.inf else 0.0
    w1 = math.exp(lw1 - lt) if lw1 > -math.inf else 0.0
    pick = rng.uniform()
    if pick <= w0:
        region = 0
    elif pick <= w0 + w1:
        region = 1
    else:
        region = 2

    if region == 2:
        z = ctx.z
        span = 1.0 - z
        lfz = _log_ftilde(z, alpha, w, alpha)

        def log_g(v: float) -> float:
            if v <= 0.0:
                return 0.0
            return _log_ftilde(z + v * span, alpha, w, alpha) - lfz

        v, _ = sample_logconcave(rng, log_f=log_g, check_normal_form=False)
        y = z + v * span
    elif region == 0:
        while True:
            if counters is not None:
                counters.rejections += 1
            y = invert_u_sigma_alpha(
                alpha, ctx.z_star, rng.uniform(), ctx.precision, counters
            )
            if rng.uniform() <= h_b(y, alpha, w):
                break
    else:
        z = ctx.z
        if alpha == 0.5:
            # the proposal density is proportional to (1-u)**-1 on (1/2, z);
            # its quantile map is closed-form, no root finding involved
            while True:
                if counters is not None:
                    counters.rejections += 1
                v = rng.uniform()
                y = 1.0 - 0.5 ** (1.0 - v) * (1.0 - z) ** v
                if rng.uniform() <= h_c1(y, alpha, w):
                    break
        elif alpha < 0.5:
            f_z = half_interval_cdf_c1(z, alpha)
            f_half = half_interval_cdf_c1(0.5, alpha)
            while True:
                if counters is not None:
                    counters.rejections += 1
                target = f_z + rng.uniform() * (f_half - f_z)
                y = invert_F_c1(alpha, z, target, ctx.precision, counters)
                if rng.uniform() <= h_c1(y, alpha, w):
                    break
        else:
            while True:
                if counters is not None:
                    counters.rejections += 1
                y = invert_rho_power(alpha, z, rng.uniform(), ctx.precision, counters)
                if rng.uniform() <= h_c2(y, alpha, w):
                    break

    e = sample_gamma(1.0 - alpha, 1.0, rng)
    log_excess = math.log(e) - _log_sigma(y, alpha)
    return PsiSample(y, log_excess, ctx.log_s, r)


# ---------------------------------------------------------------------------
# outer accept-reject against the mixture
# ---------------------------------------------------------------------------


def su_log_acceptance(log_excess: float, log_s: float, alpha: float) -> float:
    """log of the mixture acceptance ratio at zeta = s**-r + exp(log_excess).

    Stable for any magnitudes: (1 + excess s**r)**(-1/r) is taken through
    log1p/expm1, so zeta within an ulp of s**-r and astronomically large
    excesses are both fine.
    """
    r = alpha / (1.0 - alpha)
    log_dp = log_excess + r * log_s  # log(excess * s**r)
    l1p = logaddexp(0.0, log_dp)  # log(1 + excess * s**r)
    frac = -math.expm1(-l1p / r)  # (s - zeta**(-1/r)) / s in (0, 1]
    log_num = -alpha * (log_s + math.log(frac))
    log_den = logaddexp(
        -alpha * math.log(1.0 - 2.0 ** (alpha - 1.0)) - alpha * log_s,
        alpha * math.log(2.0 * r) - r * log_s - alpha * log_excess,
    )
    return log_num - log_den


def su_acceptance_ratio(zeta: float, s: float, alpha: float) -> float:
    """Acceptance ratio in [(1-alpha)/2, 1] at a raw zeta > s**-r.

    Subject to the cancellation of zeta - s**-r in doubles; the sampler
    itself carries the excess in the log domain and never loses it.
    """
    if not (s > 0.0):
        raise DomainError("s must be > 0")
    excess = zeta - s ** -(alpha / (1.0 - alpha))
    if not (excess > 0.0):
        raise DomainError("zeta must exceed s**-r")
    return math.exp(su_log_acceptance(math.log(excess), math.log(s), alpha))


def sample_undershoot_scaled(
    ctx: UndershootContext, rng: RngStream
) -> tuple[float, int]:
    """Draw log(zeta) from the scaled law; returns (log_zeta, outer rounds)."""
    counters = rng.counters
    rounds = 0
    while True:
        rounds += 1
        if counters is not None:
            counters.rejections += 1
        v1 = rng.uniform()
        v2 = rng.uniform()
        if v1 < ctx.p:
            ps = sample_psi1(ctx, rng)
        else:
            ps = sample_psi2(ctx, rng)
        if math.log(v2) <= su_log_acceptance(ps.log_excess, ctx.log_s, ctx.alpha):
            log_zeta = logaddexp(-ctx.r * ctx.log_s, ps.log_excess)
            return log_zeta, rounds


def sample_undershoot(
    t: float,
    w: float,
    params,
    rng: RngStream,
    quad: QuadratureSpec = DEFAULT_QUAD,
    precision: Precision = DEFAULT_PRECISION,
) -> float:
    """Exact draw of the undershoot conditional on crossing at time t with
    barrier value w by a jump; the output lies strictly inside (0, w)."""
    if not (t > 0.0) or not (w > 0.0):
        raise DomainError("t and w must be > 0")
    alpha = params.alpha
    log_tt = math.log(params.theta * t)
    log_s = math.log(w) - log_tt / alpha
    ctx = make_context(
        alpha, log_s=log_s, quad=quad, precision=precision, counters=rng.counters
    )
    log_zeta, _ = sample_undershoot_scaled(ctx, rng)
    out = math.exp(log_tt / alpha - log_zeta / ctx.r)
    return min(out, math.nextafter(w, 0.0))
