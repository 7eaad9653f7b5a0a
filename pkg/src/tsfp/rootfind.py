"""Certified numerical inversion.

``nr_invert`` finds the root of an increasing f on (0,1): a bisection phase
starting from x0 = 1 halves the step until the auxiliary bound M certifies
a quadratic-convergence basin (2**(1-k) * M(x0, k) < 1/2), then Newton
iterates until successive steps differ by at most 2**-N.  The M callback
must dominate sup|f''| / (2 inf|f'|) over [root, x0] whenever
|root - x0| <= 2**(1-k); a nonpositive M value means the bound's
precondition is not met yet and bisection continues.

Failure is always explicit: if the basin cannot be certified within N
bisection steps, or Newton fails to settle, a ``RootFindError`` is raised
rather than silently degrading to slow bisection.

The specific inverters used by the undershoot sampler (sigma,
u * sigma**alpha, the two half-interval proposal CDFs) rescale their natural
interval onto (0,1); their M bounds remain valid because rescaling only
shrinks the curvature ratio.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

from .errors import DomainError, RootFindError
from .params import DEFAULT_PRECISION, Precision
from .zolotarev import (
    log_rho,
    log_rho_d1,
    log_sigma_zero,
    logaddexp,
    sigma,
    sigma_prime,
    sigma_second,
    sigma_zero,
)


@dataclass(frozen=True)
class RootResult:
    root: float
    bisect_steps: int
    newton_steps: int


def nr_invert(
    f: Callable[[float], float],
    f_prime: Callable[[float], float],
    M: Callable[[float, int], float],
    precision: Precision = DEFAULT_PRECISION,
    counters=None,
) -> RootResult:
    """Guarded Newton-Raphson for increasing f on (0,1) with f(1-) > 0."""
    x0 = 1.0
    k = 1
    while True:
        probe = x0 - 2.0**-k
        if probe > 0.0 and f(probe) > 0.0:
            x0 = probe
        k += 1
        if counters is not None:
            counters.newton_iters += 1
        m = M(x0, k)
        if m >= 0.0 and 2.0 ** (1 - k) * m < 0.5:
            break
        if k > precision.bits + 1:
            # the bracket is already below 2**-N: the bisection itself has
            # produced the root to the requested precision (roots very close
            # to an endpoint need more halvings than the basin bound allows)
            return RootResult(x0, k - 1, 0)
        if not math.isfinite(x0):
            raise RootFindError("bisection produced a non-finite iterate")
    bisect_steps = k - 1

    x = x0
    cap = 8 * max(1, math.ceil(math.log2(max(2, precision.bits)))) + 24
    prev_step = math.inf
    for n in range(1, cap + 1):
        fx = f(x)
        if fx == 0.0:
            return RootResult(x, bisect_steps, n)
        x_new = x - fx / f_prime(x)
        if counters is not None:
            counters.newton_iters += 1
        if not (0.0 < x_new < 1.0) or not math.isfinite(x_new):
            raise RootFindError(f"Newton iterate left (0,1) at step {n}: {x_new}")
        step = abs(x_new - x)
        # 2**-N target, floored at a few ulps of x; evaluation noise makes
        # the iteration cycle at that scale rather than land exactly, so a
        # stalled tiny step also counts as converged
        if step <= max(precision.eps, 16.0 * 2.3e-16 * abs(x_new)) or (
            step <= 1e-13 and step >= 0.25 * prev_step
        ):
            return RootResult(x_new, bisect_steps, n)
        prev_step = step
        x = x_new
    raise RootFindError(f"Newton failed to settle within {cap} iterations")


def householder4_invert(
    g3: Callable[[float], float],
    g4: Callable[[float], float],
    x0: float,
    precision: Precision = DEFAULT_PRECISION,
    counters=None,
    lo: float = 0.0,
    hi: float = 1.0,
) -> RootResult:
    """Householder order-4 iteration x <- x + 4 g3(x)/g4(x).

    g3 and g4 are the third and fourth derivatives of 1/f where f is the
    (increasing) function whose zero is sought; the caller supplies the
    initial guess.  Only termination is promised; divergence trips the step
    cap and raises.
    """
    x = x0
    cap = max(precision.bits, 64)
    for n in range(1, cap + 1):
        try:
            denom = g4(x)
            if denom == 0.0 or not math.isfinite(denom):
                raise RootFindError("Householder derivative evaluation degenerate")
            x_new = x + 4.0 * g3(x) / denom
        except ZeroDivisionError:
            # 1/f blew up: the iterate landed exactly on the root
            return RootResult(x, 0, n)
        if counters is not None:
            counters.newton_iters += 1
        if not (lo < x_new < hi) or not math.isfinite(x_new):
            raise RootFindError(f"Householder iterate left ({lo},{hi}): {x_new}")
        if abs(x_new - x) <= max(precision.eps, 4.0 * 2.3e-16 * abs(x_new)):
            return RootResult(x_new, 0, n)
        x = x_new
    raise RootFindError(f"Householder failed to settle within {cap} iterations")


def householder4_derivatives(
    f: Callable[[float], float],
    d1: Callable[[float], float],
    d2: Callable[[float], float],
    d3: Callable[[float], float],
    d4: Callable[[float], float],
) -> tuple[Callable[[float], float], Callable[[float], float]]:
    """(1/f)''' and (1/f)'''' assembled from f and its first four derivatives."""

    def g3(x: float) -> float:
        v, a, b, c = f(x), d1(x), d2(x), d3(x)
        return (-6.0 * a**3 + 6.0 * v * a * b - v * v * c) / v**4

    def g4(x: float) -> float:
        v, a, b, c, d = f(x), d1(x), d2(x), d3(x), d4(x)
        return (
            24.0 * a**4
            - 36.0 * v * a * a * b
            + 6.0 * v * v * b * b
            + 8.0 * v * v * a * c
            - v**3 * d
        ) / v**5

    return g3, g4


# ---------------------------------------------------------------------------
# specific inverters
# ---------------------------------------------------------------------------


def sigma_basin_bound(alpha: float) -> Callable[[float, int], float]:
    """M for inverting log sigma (or any increasing power of rho)."""

    def M(x: float, k: int) -> float:
        gap = x - 2.0 ** (1 - k)
        if gap <= 0.0 or x >= 1.0:
            return math.inf
        return 1.0 / (
            2.0 * math.pi * alpha * (1.0 - alpha) * gap * x * x * (1.0 - x) ** 2
        )

    return M


def invert_sigma(
    alpha: float,
    target: Optional[float] = None,
    log_target: Optional[float] = None,
    precision: Precision = DEFAULT_PRECISION,
    counters=None,
) -> float:
    """z in (0,1) with sigma(z) = target, via the increasing log objective.

    Accepts the target in the log domain so callers can pass alpha * s**r
    without materialising it.  Targets at or below sigma(0+) are a caller
    error (the convention there is z = 0, which the caller applies).
    """
    if log_target is None:
        if target is None or not (target > 0.0):
            raise DomainError("provide a positive target or log_target")
        log_target = math.log(target)
    if log_target <= log_sigma_zero(alpha):
        raise DomainError("target <= sigma(0+); take z = 0 instead of inverting")
    lt_rho = (1.0 - alpha) * log_target  # log rho at the root

    def f(x: float) -> float:
        return log_rho(x, alpha) - lt_rho

    def fp(x: float) -> float:
        return log_rho_d1(x, alpha)

    return nr_invert(f, fp, sigma_basin_bound(alpha), precision, counters).root


def invert_u_sigma_alpha(
    alpha: float,
    z_star: float,
    y: float,
    precision: Precision = DEFAULT_PRECISION,
    counters=None,
) -> float:
    """u in (0, z_star) solving u sigma(u)**alpha = y z_star sigma(z_star)**alpha.

    z_star must not exceed 1/2; the objective is convex increasing there and
    the basin bound uses the curvature of sigma at the probe point.
    """
    if not (0.0 < z_star <= 0.5):
        raise DomainError("z_star must lie in (0, 1/2]")
    if not (0.0 < y < 1.0):
        raise DomainError("y must lie in (0,1)")
    target = y * z_star * sigma(z_star, alpha) ** alpha
    ratio0 = (sigma(0.5, alpha) / sigma_zero(alpha)) ** alpha

    def f(x: float) -> float:
        u = z_star * x
        return u * sigma(u, alpha) ** alpha - target

    def fp(x: float) -> float:
        u = z_star * x
        s = sigma(u, alpha)
        return z_star * (
            s**alpha + alpha * u * sigma_prime(u, alpha) * s ** (alpha - 1.0)
        )

    def M(x: float, k: int) -> float:
        u = min(z_star * x, 0.5)
        if u <= 0.0:
            return math.inf
        s = sigma(u, alpha)
        sp = sigma_prime(u, alpha)
        ss = sigma_second(u, alpha)
        bracket = 1.0 + 0.5 * u * alpha * (ss / s + (alpha - 1.0) * (sp / s) ** 2)
        return ratio0 * bracket

    return z_star * nr_invert(f, fp, M, precision, counters).root


def _c1_constants(alpha: float) -> tuple[float, float]:
    return (
        math.sin(math.pi * (1.0 - alpha)),
        math.pi * alpha * (1.0 - alpha) * math.cos(math.pi * alpha),
    )


def half_interval_cdf_c1(x: float, alpha: float) -> float:
    """Decreasing antiderivative for the alpha < 1/2 half-interval proposal:
    F(x) = a (1-r)^-1 (1-x)^(1-r) + b (2-r)^-1 (1-x)^(2-r)."""
    r = alpha / (1.0 - alpha)
    a, b = _c1_constants(alpha)
    omx = 1.0 - x
    return a / (1.0 - r) * omx ** (1.0 - r) + b / (2.0 - r) * omx ** (2.0 - r)


def invert_F_c1(
    alpha: float,
    z: float,
    y: float,
    precision: Precision = DEFAULT_PRECISION,
    counters=None,
) -> float:
    """x in (1/2, z) with F(x) = y, for alpha < 1/2 (F decreasing in x)."""
    if not (0.0 < alpha < 0.5):
        raise DomainError("this branch requires alpha < 1/2")
    if not (0.5 < z < 1.0):
        raise DomainError("z must lie in (1/2, 1)")
    r = alpha / (1.0 - alpha)
    a, b = _c1_constants(alpha)
    f_lo = half_interval_cdf_c1(z, alpha)
    f_hi = half_interval_cdf_c1(0.5, alpha)
    if not (f_lo <= y <= f_hi):
        raise DomainError(f"y = {y} outside [F(z), F(1/2)] = [{f_lo}, {f_hi}]")
    span = z - 0.5
    m_const = ((1.0 - z) ** -(r + 1.0) * (r * a + b * (1.0 - r))) / (
        0.5**-r * (a + b * (1.0 - z))
    )

    def f(t: float) -> float:
        return y - half_interval_cdf_c1(0.5 + span * t, alpha)

    def fp(t: float) -> float:
        x = 0.5 + span * t
        return span * (1.0 - x) ** -r * (a + b * (1.0 - x))

    def M(t: float, k: int) -> float:
        return m_const

    return 0.5 + span * nr_invert(f, fp, M, precision, counters).root


def invert_rho_power(
    alpha: float,
    z: float,
    v: float,
    precision: Precision = DEFAULT_PRECISION,
    counters=None,
) -> float:
    """u in (1/2, z) with rho(u)**(r-1) at the v-quantile between its
    endpoint values rho(1/2)**(r-1) and rho(z)**(r-1).

    For alpha > 1/2 (r > 1) the map is increasing; the target is combined in
    the log domain (rho(z)**(r-1) overflows for heavy s) and the inversion
    runs on the increasing log rho objective.
    """
    if not (0.5 < alpha < 1.0):
        raise DomainError("this branch requires alpha > 1/2")
    if not (0.5 < z < 1.0):
        raise DomainError("z must lie in (1/2, 1)")
    if not (0.0 < v < 1.0):
        raise DomainError("v must lie in (0,1)")
    r = alpha / (1.0 - alpha)
    la = (r - 1.0) * log_rho(0.5, alpha)
    lb = (r - 1.0) * log_rho(z, alpha)
    log_target = logaddexp(la + math.log1p(-v), lb + math.log(v))
    lt_rho = log_target / (r - 1.0)
    span = z - 0.5

    def f(t: float) -> float:
        return log_rho(0.5 + span * t, alpha) - lt_rho

    def fp(t: float) -> float:
        return span * log_rho_d1(0.5 + span * t, alpha)

    basin = sigma_basin_bound(alpha)

    def M(t: float, k: int) -> float:
        return basin(0.5 + span * t, k)

    return 0.5 + span * nr_invert(f, fp, M, precision, counters).root
