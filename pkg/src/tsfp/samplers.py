"""Exact variate generators.

Everything here is rejection- or inversion-based from the uniform draws of
an ``RngStream``; no approximate samplers.  The stable marginal follows the
Chambers-Mallows-Stuck / Kanter form

    S_t = (theta t)**(1/alpha) * (sigma(U) / E)**((1-alpha)/alpha),

and the tempered stable marginal uses the four-branch rejection scheme with
proposal constants Psi_1..Psi_4 (branch picked by the smallest constant) and
truncated-normal auxiliaries; its expected number of rejection rounds is
uniformly bounded (about 4.2154) over all parameter values.  The
log-concave sampler is Devroye's universal rejection method for a
nonincreasing log-concave density on [0,1] in normal form (mode 0,
value 1 at 0).
"""

from __future__ import annotations

import math
from typing import Callable, Optional

from scipy.special import erf, erfinv

from .errors import DomainError, TsfpError
from .params import StableParams, TemperedParams
from .rng import RngStream
from .zolotarev import log_rho, log_rho_zero

_LOG_QUARTER = math.log(0.25)


# ---------------------------------------------------------------------------
# primitive laws
# ---------------------------------------------------------------------------


def sample_uniform(rng: RngStream) -> float:
    return rng.uniform()


def sample_exponential(rng: RngStream) -> float:
    return rng.exponential()


def sample_gamma(shape: float, rate: float, rng: RngStream) -> float:
    """Gamma(shape, rate) by exact rejection.

    shape < 1 uses the Ahrens-Dieter GS rejection; shape >= 1 uses the
    Marsaglia-Tsang squeeze.  Both accept-reject loops are exact.
    """
    if not (shape > 0.0) or not (rate > 0.0):
        raise DomainError("gamma shape and rate must be > 0")
    counters = rng.counters
    if shape < 1.0:
        b = 1.0 + shape / math.e
        while True:
            if counters is not None:
                counters.rejections += 1
            p = b * rng.uniform()
            v = rng.uniform()
            if p <= 1.0:
                x = p ** (1.0 / shape)
                if v <= math.exp(-x):
                    return x / rate
            else:
                x = -math.log((b - p) / shape)
                if x > 0.0 and v <= x ** (shape - 1.0):
                    return x / rate
    d = shape - 1.0 / 3.0
    c = 1.0 / math.sqrt(9.0 * d)
    while True:
        if counters is not None:
            counters.rejections += 1
        x = rng.normal()
        t = 1.0 + c * x
        if t <= 0.0:
            continue
        v = t * t * t
        u = rng.uniform()
        x2 = x * x
        if u < 1.0 - 0.0331 * x2 * x2:
            return d * v / rate
        if math.log(u) < 0.5 * x2 + d * (1.0 - v + math.log(v)):
            return d * v / rate


def sample_truncated_normal(scale: float, rng: RngStream) -> float:
    """N(0, scale**2) restricted to [0,1], by inverse-CDF with erf inversion."""
    if not (scale > 0.0):
        raise DomainError("scale must be > 0")
    v = rng.uniform()
    c = erf(1.0 / (scale * math.sqrt(2.0)))
    return float(scale * math.sqrt(2.0) * erfinv(v * c))


# ---------------------------------------------------------------------------
# stable marginal (S-Alg)
# ---------------------------------------------------------------------------


def sample_stable_log(params: StableParams, t: float, rng: RngStream) -> float:
    """log S_t for the stable subordinator; never overflows.

    S = (theta t)**(1/alpha) (sigma(U)/E)**((1-alpha)/alpha) and
    sigma**(1-alpha) = rho, so
    log S = (log(theta t) + log rho(U)) / alpha - ((1-alpha)/alpha) log E.
    """
    if not (t > 0.0):
        raise DomainError("t must be > 0")
    alpha = params.alpha
    u = rng.uniform()
    e = rng.exponential()
    return (math.log(params.theta * t) + log_rho(u, alpha)) / alpha - (
        (1.0 - alpha) / alpha
    ) * math.log(e)


def sample_stable(params: StableParams, t: float, rng: RngStream) -> float:
    """Exact draw of S_t under the stable law; constant work per draw.

    The law is heavy tailed (index alpha): for small alpha the draw can
    exceed the double range, in which case inf is returned.
    """
    lv = sample_stable_log(params, t, rng)
    return math.exp(lv) if lv < 709.78 else math.inf


# ---------------------------------------------------------------------------
# tempered stable marginal (TS-Alg, four-branch rejection)
# ---------------------------------------------------------------------------


def _log_psi0(a: float, x: float) -> float:
    g = a * (1.0 - a) * x
    return math.log(erf(math.sqrt(g * math.pi**2 / 2.0))) - 0.5 * math.log(
        2.0 * math.pi * g
    )


def _log_psi1(a: float, x: float) -> float:
    bx = (1.0 - a) * x
    return (
        math.lgamma(a * x)
        + a * x
        - 1.0
        + (1.0 + bx) * math.log(a / (1.0 - a) + a * x)
        - x * math.log(a * x)
    )


def _log_psi2(a: float, x: float) -> float:
    bx = (1.0 - a) * x
    return math.lgamma(1.0 + bx) + bx - bx * math.log(bx)


def _log_psi3(a: float, x: float) -> float:
    bx = (1.0 - a) * x
    return (
        math.lgamma(1.0 + a * x)
        + a * x
        - 1.0
        + (1.0 + bx) * math.log(1.0 + 1.0 / bx)
        - a * x * math.log(a * x)
        - 0.5 * math.log(2.0 * math.pi * a * bx)
    )


def _log_psi4(a: float, x: float) -> float:
    return _log_psi2(a, x) - 0.5 * math.log(2.0 * math.pi * a * (1.0 - a) * x)


def sample_tempered_stable(tparams: TemperedParams, t: float, rng: RngStream) -> float:
    """Exact draw of S_t under the tempered law; q = 0 falls back to S-Alg.

    Note: the truncated-normal branches tilt the acceptance by
    exp(+pi**2 alpha (1-alpha) xi U**2 / 2), the reciprocal of the
    truncated-normal density kernel (so the pair (U, X) is accepted against
    the same uniform-U target as the first two branches).
    """
    if not (t > 0.0):
        raise DomainError("t must be > 0")
    alpha, theta, q = tparams.alpha, tparams.theta, tparams.q
    if q == 0.0:
        return sample_stable(tparams.base, t, rng)
    r = tparams.r
    xi = theta * t * q**alpha
    log_lam = math.log(theta * t) / alpha + math.log(q)
    log_xi = alpha * log_lam
    counters = rng.counters

    lc = (
        _log_psi1(alpha, xi),
        _log_psi2(alpha, xi),
        _log_psi3(alpha, xi),
        _log_psi4(alpha, xi),
    )
    branch = min(range(4), key=lambda i: lc[i])
    log_c = lc[branch]
    gauss_scale = (
        1.0 / math.sqrt(math.pi**2 * alpha * (1.0 - alpha) * xi)
        if branch >= 2
        else 0.0
    )
    lpsi0 = _log_psi0(alpha, xi) if branch >= 2 else 0.0
    tilt = math.pi**2 * alpha * (1.0 - alpha) * xi / 2.0

    while True:
        if counters is not None:
            counters.rejections += 1
        if branch in (0, 2):
            u = (
                rng.uniform()
                if branch == 0
                else sample_truncated_normal(gauss_scale, rng)
            )
            v = rng.uniform()
            x = sample_gamma(alpha * xi, 1.0, rng)
            if x <= 0.0 or u <= 0.0 or u >= 1.0:
                continue
            lsig_lam = (r + 1.0) * (log_rho(u, alpha) + log_xi)
            arg = lsig_lam - r * math.log(x)
            log_b = (
                math.log(r)
                + xi
                + math.lgamma(alpha * xi)
                + lsig_lam
                - (r + alpha * xi) * math.log(x)
                - (math.exp(arg) if arg < 709.0 else math.inf)
            )
            if branch == 2:
                log_b += lpsi0 + tilt * u * u
            if math.log(v) <= log_b - log_c:
                log_s = math.log(x) - log_lam
                break
        else:
            u = (
                rng.uniform()
                if branch == 1
                else sample_truncated_normal(gauss_scale, rng)
            )
            v = rng.uniform()
            x = sample_gamma(1.0 + (1.0 - alpha) * xi, 1.0, rng)
            if x <= 0.0 or u <= 0.0 or u >= 1.0:
                continue
            log_s = log_rho(u, alpha) / alpha - math.log(x) / r
            lam_s = math.exp(log_lam + log_s) if log_lam + log_s < 709.0 else math.inf
            log_b = (
                xi
                + math.lgamma(1.0 + (1.0 - alpha) * xi)
                - (1.0 - alpha) * xi * math.log(x)
                - lam_s
            )
            if branch == 3:
                log_b += lpsi0 + tilt * u * u
            if math.log(v) <= log_b - log_c:
                break
    out = math.log(theta * t) / alpha + log_s
    return math.exp(out) if out < 709.78 else math.inf


# ---------------------------------------------------------------------------
# log-concave rejection sampling (LC-Alg)
# ---------------------------------------------------------------------------


def sample_logconcave(
    rng: RngStream,
    f: Optional[Callable[[float], float]] = None,
    log_f: Optional[Callable[[float], float]] = None,
    check_normal_form: bool = True,
) -> tuple[float, int]:
    """Draw from a density proportional to f on [0,1]; returns (x, setup steps).

    f must be log-concave and nonincreasing with f(0) = 1 (normal form);
    callers rescale arbitrary targets.  Pass ``log_f`` for targets whose
    linear-space values under/overflow.  The dominating envelope is flat 1 up
    to a_1, flat f(a_1) up to 2 a_1 and exponential beyond, where a_1 is the
    largest dyadic 2**-k with f(a_1) >= 1/4 (f is treated as 0 at and beyond
    the right endpoint when locating a_1, so the envelope always exists on
    the compact domain; the acceptance test X <= 1 keeps the law exact).
    """
    if log_f is None:
        if f is None:
            raise DomainError("provide f or log_f")
        g = f

        def log_f(x: float, _g=g) -> float:
            v = _g(x)
            return math.log(v) if v > 0.0 else -math.inf

    if check_normal_form:
        lf0 = log_f(0.0)
        if not (abs(lf0) <= 1e-9):
            raise TsfpError(
                f"log-concave target not in normal form: f(0) = {math.exp(lf0)}"
            )

    counters = rng.counters
    a1 = 0.5
    steps = 1
    while log_f(a1) < _LOG_QUARTER:
        a1 *= 0.5
        steps += 1
        if a1 < 2.0**-1080:
            raise TsfpError("log-concave setup failed: target vanished near 0")
    if counters is not None:
        counters.logconcave_steps += steps

    lf1 = log_f(a1)
    lf2 = log_f(2.0 * a1) if 2.0 * a1 < 1.0 else -math.inf
    m1 = a1
    m2 = a1 * math.exp(lf1)
    m3 = a1 * math.exp(lf2) / (lf1 - lf2) if lf2 > -math.inf else 0.0
    a0 = m1 + m2 + m3

    def log_h(x: float) -> float:
        if x <= a1:
            return 0.0
        if x <= 2.0 * a1:
            return lf1
        return ((2.0 * a1 - x) * lf1 + (x - a1) * lf2) / a1

    while True:
        if counters is not None:
            counters.rejections += 1
        v1 = rng.uniform()
        v2 = rng.uniform()
        v3 = rng.uniform()
        pick = a0 * v2
        if pick <= m1:
            x = a1 * v1
        elif pick <= m1 + m2:
            x = a1 + a1 * v1
        else:
            x = 2.0 * a1 - a1 * math.log(v1) / (lf1 - lf2)
        if x <= 1.0 and math.log(v3) <= log_f(x) - log_h(x):
            return x, steps
