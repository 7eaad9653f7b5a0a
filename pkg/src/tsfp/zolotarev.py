"""Special functions of the Zolotarev integral representation.

For alpha in (0,1) and u in (0,1) define

    rho(u)     = sin(alpha*pi*u)**alpha * sin((1-alpha)*pi*u)**(1-alpha) / sin(pi*u)
    sigma(u)   = rho(u)**(1/(1-alpha)) = rho(u)**(r+1),   r = alpha/(1-alpha)

The density of the normalised stable variable S_{1/theta} is

    phi_alpha(x) = r * int_0^1 sigma(u) x**(-r-1) exp(-sigma(u) x**(-r)) du

and the density of S_t follows by the scaling g_t(x) =
phi_alpha((theta t)**(-1/alpha) x) * (theta t)**(-1/alpha).

log(rho) is analytic on (0,1) with positive derivatives of every order;
near u = 0 the individual cotangents cancel, so all derivatives are
evaluated by the zeta power series

    (log rho)'(u) = 2 * sum_{n>=1} zeta(2n) (1 - a^{2n+1} - (1-a)^{2n+1}) u^{2n-1}

below ``_SERIES_CUT`` and by reflection-safe trigonometry elsewhere.

All integrals use adaptive Gauss-Legendre quadrature with node doubling;
integrands are evaluated at interior nodes only and in the log domain, then
exponentiated (sigma blows up at u = 1, the exponential factor wins).
"""

from __future__ import annotations

import math
from functools import lru_cache
from typing import Callable, Optional

import numpy as np

from .errors import DomainError, NumericOverflowError, QuadratureError
from .params import DEFAULT_QUAD, QuadratureSpec, StableParams

_PI = math.pi

# zeta(2n) for n = 1..10; enough for ~1e-22 truncation error at u = 0.05
_ZETA_EVEN = (
    1.6449340668482264,
    1.0823232337111382,
    1.0173430619844491,
    1.0040773561979443,
    1.0009945751278181,
    1.0002460865533080,
    1.0000612481350587,
    1.0000152822594087,
    1.0000038172932650,
    1.0000009539620338,
)
_SERIES_CUT = 0.05

# ---------------------------------------------------------------------------
# reflection-safe trigonometry on (0,1) in units of pi
# ---------------------------------------------------------------------------


def _sinpi(x: float) -> float:
    return math.sin(_PI * (x if x <= 0.5 else 1.0 - x))


def _cotpi(x: float) -> float:
    if x > 0.5:
        return -_cotpi(1.0 - x)
    s = math.sin(_PI * x)
    return math.cos(_PI * x) / s


def _cscpi2(x: float) -> float:
    s = _sinpi(x)
    return 1.0 / (s * s)


def _series_coeffs(alpha: float) -> tuple[float, ...]:
    return tuple(
        z * (1.0 - alpha ** (2 * n + 3) - (1.0 - alpha) ** (2 * n + 3))
        for n, z in enumerate(_ZETA_EVEN)
    )


def _check_u(u: float) -> None:
    if not (0.0 < u < 1.0):
        raise DomainError(f"u must lie in (0,1), got {u}")


def _check_alpha(alpha: float) -> None:
    if not (0.0 < alpha < 1.0):
        raise DomainError(f"alpha must lie in (0,1), got {alpha}")


# ---------------------------------------------------------------------------
# log rho and its first four derivatives (scalar)
# ---------------------------------------------------------------------------


def log_rho_zero(alpha: float) -> float:
    """Limit of log rho at 0+, i.e. log(alpha**alpha * (1-alpha)**(1-alpha))."""
    _check_alpha(alpha)
    return alpha * math.log(alpha) + (1.0 - alpha) * math.log1p(-alpha)


def log_rho(u: float, alpha: float) -> float:
    _check_u(u)
    _check_alpha(alpha)
    if u < _SERIES_CUT:
        acc = 0.0
        u2 = u * u
        p = u2
        for n, c in enumerate(_series_coeffs(alpha), start=1):
            acc += c * p / n
            p *= u2
        return log_rho_zero(alpha) + acc
    b = 1.0 - alpha
    return (
        alpha * math.log(_sinpi(alpha * u))
        + b * math.log(_sinpi(b * u))
        - math.log(_sinpi(u))
    )


def log_rho_d1(u: float, alpha: float) -> float:
    _check_u(u)
    if u < _SERIES_CUT:
        acc = 0.0
        p = u
        u2 = u * u
        for c in _series_coeffs(alpha):
            acc += c * p
            p *= u2
        return 2.0 * acc
    b = 1.0 - alpha
    return _PI * (
        alpha * alpha * _cotpi(alpha * u) + b * b * _cotpi(b * u) - _cotpi(u)
    )


def log_rho_d2(u: float, alpha: float) -> float:
    _check_u(u)
    if u < _SERIES_CUT:
        acc = 0.0
        p = 1.0
        u2 = u * u
        for n, c in enumerate(_series_coeffs(alpha), start=1):
            acc += c * (2 * n - 1) * p
            p *= u2
        return 2.0 * acc
    b = 1.0 - alpha
    return (_PI * _PI) * (
        _cscpi2(u) - alpha**3 * _cscpi2(alpha * u) - b**3 * _cscpi2(b * u)
    )


def log_rho_d3(u: float, alpha: float) -> float:
    _check_u(u)
    if u < _SERIES_CUT:
        acc = 0.0
        for n, c in enumerate(_series_coeffs(alpha), start=1):
            if n == 1:
                continue
            acc += c * (2 * n - 1) * (2 * n - 2) * u ** (2 * n - 3)
        return 2.0 * acc
    b = 1.0 - alpha
    return 2.0 * _PI**3 * (
        alpha**4 * _cscpi2(alpha * u) * _cotpi(alpha * u)
        + b**4 * _cscpi2(b * u) * _cotpi(b * u)
        - _cscpi2(u) * _cotpi(u)
    )


def log_rho_d4(u: float, alpha: float) -> float:
    _check_u(u)
    if u < _SERIES_CUT:
        acc = 0.0
        for n, c in enumerate(_series_coeffs(alpha), start=1):
            if n < 2:
                continue
            acc += c * (2 * n - 1) * (2 * n - 2) * (2 * n - 3) * u ** (2 * n - 4)
        return 2.0 * acc
    b = 1.0 - alpha

    def term(a: float) -> float:
        c2 = _cscpi2(a * u)
        ct = _cotpi(a * u)
        return a**5 * c2 * (2.0 * ct * ct + c2)

    return -2.0 * _PI**4 * (term(alpha) + term(b) - term(1.0))


# ---------------------------------------------------------------------------
# rho / sigma and companions
# ---------------------------------------------------------------------------


def rho(u: float, alpha: float) -> float:
    """sin(a*pi*u)**a * sin((1-a)*pi*u)**(1-a) / sin(pi*u)."""
    _check_u(u)
    _check_alpha(alpha)
    if u < _SERIES_CUT:
        return math.exp(log_rho(u, alpha))
    b = 1.0 - alpha
    return (
        _sinpi(alpha * u) ** alpha * _sinpi(b * u) ** b / _sinpi(u)
    )


def log_sigma(u: float, alpha: float) -> float:
    return log_rho(u, alpha) / (1.0 - alpha)


def sigma(u: float, alpha: float) -> float:
    """rho(u)**(1/(1-alpha)); log-domain path for alpha close to 1."""
    if (1.0 - alpha) < 2.0**-6:
        return math.exp(log_sigma(u, alpha))
    return rho(u, alpha) ** (1.0 / (1.0 - alpha))


def sigma_zero(alpha: float) -> float:
    """sigma(0+) = (1-alpha) * alpha**(alpha/(1-alpha))."""
    _check_alpha(alpha)
    return math.exp(log_sigma_zero(alpha))


def log_sigma_zero(alpha: float) -> float:
    _check_alpha(alpha)
    r = alpha / (1.0 - alpha)
    return math.log1p(-alpha) + r * math.log(alpha)


def sigma_prime(u: float, alpha: float) -> float:
    """d sigma / du, from sigma' = sigma * (log sigma)'."""
    k = 1.0 / (1.0 - alpha)
    return sigma(u, alpha) * k * log_rho_d1(u, alpha)


def sigma_second(u: float, alpha: float) -> float:
    """d^2 sigma / du^2 via (log sigma)'' + ((log sigma)')^2."""
    k = 1.0 / (1.0 - alpha)
    ls1 = k * log_rho_d1(u, alpha)
    ls2 = k * log_rho_d2(u, alpha)
    return sigma(u, alpha) * (ls2 + ls1 * ls1)


# ---------------------------------------------------------------------------
# vectorised log rho (for quadrature integrands)
# ---------------------------------------------------------------------------


def _v_sinpi(x: np.ndarray) -> np.ndarray:
    return np.sin(_PI * np.where(x <= 0.5, x, 1.0 - x))


def v_log_rho(u: np.ndarray, alpha: float) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    b = 1.0 - alpha
    out = np.empty_like(u)
    small = u < _SERIES_CUT
    if np.any(small):
        us = u[small]
        acc = np.zeros_like(us)
        u2 = us * us
        p = u2.copy()
        for n, c in enumerate(_series_coeffs(alpha), start=1):
            acc += c * p / n
            p *= u2
        out[small] = log_rho_zero(alpha) + acc
    big = ~small
    if np.any(big):
        ub = u[big]
        out[big] = (
            alpha * np.log(_v_sinpi(alpha * ub))
            + b * np.log(_v_sinpi(b * ub))
            - np.log(_v_sinpi(ub))
        )
    return out


def v_log_sigma(u: np.ndarray, alpha: float) -> np.ndarray:
    return v_log_rho(u, alpha) / (1.0 - alpha)


def log_rho_one_minus(delta: float, alpha: float) -> float:
    """log rho(1 - delta) computed from delta, usable for delta below 1e-16."""
    if not (0.0 < delta < 1.0):
        raise DomainError("delta must lie in (0,1)")
    b = 1.0 - alpha
    u = 1.0 - delta
    a1 = alpha * u if alpha * u <= 0.5 else b + alpha * delta
    a2 = b * u if b * u <= 0.5 else alpha + b * delta
    return (
        alpha * math.log(math.sin(_PI * a1))
        + b * math.log(math.sin(_PI * a2))
        - math.log(math.sin(_PI * min(u, delta)))
    )


@lru_cache(maxsize=512)
def _kernel_peak(
    alpha: float, a_coef: float, w: float
) -> Optional[tuple[float, float]]:
    """Mode (in t = log(1-u)) and width scale of the sigma-kernel integrand.

    The mode solves log sigma(u*) = log(a_coef) - w; below sigma(0+) the
    kernel is nonincreasing and no interior peak exists.  The width is the
    t-distance over which the integrand drops a few hundred e-folds, from
    the flank slope a_coef * d log sigma / dt at the mode.
    """
    if a_coef <= 0.0:
        return None
    l_star = math.log(a_coef) - w
    if l_star <= log_sigma_zero(alpha):
        return None
    target = (1.0 - alpha) * l_star  # log rho at the mode
    t_lo, t_hi = _T_FLOOR, math.log1p(-1e-12)
    if log_rho_one_minus(math.exp(t_lo), alpha) < target:
        return None  # mode closer to 1 than representable
    for _ in range(48):
        mid = 0.5 * (t_lo + t_hi)
        if log_rho_one_minus(math.exp(mid), alpha) > target:
            t_lo = mid
        else:
            t_hi = mid
    t_star = 0.5 * (t_lo + t_hi)
    delta = math.exp(t_star)
    # |d log sigma / dt| = delta * sigma'(u)/sigma(u); ~1/(1-alpha) near u=1
    eval_u = min(max(1.0 - delta, 1e-12), 1.0 - 1e-15)
    slope = delta * log_rho_d1(eval_u, alpha) / (1.0 - alpha)
    if not (slope > 0.0) or not math.isfinite(slope):
        slope = 1.0 / (1.0 - alpha)
    width = math.sqrt(520.0 / a_coef) / max(slope, 1e-2)
    return t_star, width


def _v_log_rho_from_tdelta(t: np.ndarray, alpha: float) -> np.ndarray:
    """Vectorised log rho(u) at u = 1 - e**t for t < 0.

    u = -expm1(t) and delta = e**t are each computed to full relative
    accuracy, and every sine argument uses whichever of the pair (u, delta)
    avoids cancellation, so the evaluation stays accurate within an ulp of
    either endpoint.
    """
    d = np.exp(t)
    u = -np.expm1(t)
    b = 1.0 - alpha
    # sin(pi*a*u) evaluated via the complement 1 - a*u = (1-a) + a*delta
    # whenever a*u > 1/2
    arg1 = np.where(alpha * u <= 0.5, alpha * u, b + alpha * d)
    arg2 = np.where(b * u <= 0.5, b * u, alpha + b * d)
    arg3 = np.minimum(u, d)
    return (
        alpha * np.log(np.sin(_PI * arg1))
        + b * np.log(np.sin(_PI * arg2))
        - np.log(np.sin(_PI * arg3))
    )


def _np_log_kernel_t(
    t: np.ndarray, alpha: float, a_coef: float, w: float
) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    out = np.full(t.shape, -math.inf)
    ok = (t < 0.0) & np.isfinite(t)
    if np.any(ok):
        tk = t[ok]
        ls = _v_log_rho_from_tdelta(tk, alpha) / (1.0 - alpha)
        with np.errstate(over="ignore"):
            val = a_coef * ls - np.exp(ls + w) + tk
        val[~np.isfinite(ls)] = -math.inf
        out[ok] = val
    return out


try:  # compiled fast path; the numpy route is semantically identical
    import numba as _numba

    @_numba.njit(cache=True, fastmath=False)
    def _nb_log_kernel_t(t, alpha, a_coef, w):  # pragma: no cover
        n = t.shape[0]
        out = np.empty(n)
        b = 1.0 - alpha
        pi = math.pi
        for i in range(n):
            ti = t[i]
            if not (ti < 0.0) or math.isinf(ti):
                out[i] = -math.inf
                continue
            d = math.exp(ti)
            u = -math.expm1(ti)
            a1 = alpha * u if alpha * u <= 0.5 else b + alpha * d
            a2 = b * u if b * u <= 0.5 else alpha + b * d
            a3 = u if u < d else d
            s1 = math.sin(pi * a1)
            s2 = math.sin(pi * a2)
            s3 = math.sin(pi * a3)
            if s1 <= 0.0 or s2 <= 0.0 or s3 <= 0.0:
                out[i] = -math.inf
                continue
            ls = (alpha * math.log(s1) + b * math.log(s2) - math.log(s3)) / b
            if math.isinf(ls):
                out[i] = -math.inf
                continue
            arg = ls + w
            ew = math.exp(arg) if arg < 709.0 else math.inf
            out[i] = a_coef * ls - ew + ti
        return out

    def _v_log_kernel_t(t, alpha, a_coef, w):
        return _nb_log_kernel_t(
            np.ascontiguousarray(t, dtype=np.float64), alpha, a_coef, w
        )

except Exception:  # pragma: no cover
    _v_log_kernel_t = _np_log_kernel_t

_v_log_kernel_t.__doc__ = """log of the sigma-kernel integrand after the
substitution u = 1 - e**t: a_coef*log sigma(u) - sigma(u)*e**w + t (the +t
is the Jacobian).  Points where sigma is not finite evaluate to -inf: the
exponential factor always wins at the endpoints."""


_T_FLOOR = -745.0  # e**t below this underflows; u is 1 to double precision


def log_kernel_integral(
    alpha: float,
    a_coef: float,
    w: float,
    u_lo: float = 0.0,
    u_hi: float = 1.0,
    quad: QuadratureSpec = DEFAULT_QUAD,
    counters=None,
) -> float:
    """log of int_{u_lo}^{u_hi} sigma(u)**a_coef exp(-sigma(u) e**w) du.

    Integrated in t = log(1-u), where both the u -> 1 blow-up and the u -> 0
    corner are resolvable in doubles and the interior peak (if any) has
    width of order (1-alpha) instead of ulp-scale slivers.
    """
    _check_alpha(alpha)
    if not (0.0 <= u_lo < u_hi <= 1.0):
        if u_lo >= u_hi:
            return -math.inf
        raise DomainError("integration limits must satisfy 0 <= u_lo < u_hi <= 1")
    t_hi = math.log1p(-u_lo) if u_lo > 0.0 else 0.0
    t_lo = math.log1p(-u_hi) if u_hi < 1.0 else _T_FLOOR
    t_lo = max(t_lo, _T_FLOOR)
    if t_lo >= t_hi:
        return -math.inf
    peak = _kernel_peak(alpha, a_coef, w)
    if peak is not None and not (t_lo < peak[0] < t_hi):
        peak = None

    def integrand(t: np.ndarray) -> np.ndarray:
        return _v_log_kernel_t(t, alpha, a_coef, w)

    return log_gl_integral(integrand, t_lo, t_hi, quad, counters, peak=peak)


# ---------------------------------------------------------------------------
# adaptive Gauss-Legendre quadrature
# ---------------------------------------------------------------------------


def logaddexp(x: float, y: float) -> float:
    """log(e**x + e**y) without overflow; tolerates -inf arguments."""
    if x == -math.inf:
        return y
    if y == -math.inf:
        return x
    if x < y:
        x, y = y, x
    return x + math.log1p(math.exp(y - x))


_MAX_SINGLE_PANEL = 4096


@lru_cache(maxsize=32)
def _gl_nodes(n: int) -> tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(n)


def _nodes_for(a: float, b: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes/weights for (a,b) with n total nodes; composite panels past the
    single-panel limit to avoid monster eigenproblems."""
    if n <= _MAX_SINGLE_PANEL:
        x, w = _gl_nodes(n)
        half = 0.5 * (b - a)
        return a + half * (x + 1.0), half * w
    panels = n // _MAX_SINGLE_PANEL
    x, w = _gl_nodes(_MAX_SINGLE_PANEL)
    edges = np.linspace(a, b, panels + 1)
    xs, ws = [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        half = 0.5 * (hi - lo)
        xs.append(lo + half * (x + 1.0))
        ws.append(half * w)
    return np.concatenate(xs), np.concatenate(ws)


def _tol(quad: QuadratureSpec, n: int) -> float:
    # requested tolerance floored at the accumulated-roundoff scale of an
    # n-point rule in doubles; demanding less than that loops forever
    return max(quad.rtol, 25.0 * n * 2.2e-16)


def gl_integral(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    quad: QuadratureSpec = DEFAULT_QUAD,
    counters=None,
    atol: float = 0.0,
) -> float:
    """Integral of ``f`` over (a,b), doubling nodes until converged."""
    if b <= a:
        return 0.0
    prev = None
    n = quad.initial_nodes
    while n <= quad.max_nodes:
        x, w = _nodes_for(a, b, n)
        val = float(np.dot(w, f(x)))
        if counters is not None:
            counters.quad_evals += n
        if prev is not None and abs(val - prev) <= _tol(quad, n) * abs(val) + atol:
            return val
        prev = val
        n *= 2
    raise QuadratureError(
        f"quadrature did not converge within {quad.max_nodes} nodes on ({a},{b})"
    )


# relative offsets used to probe for the mass window of a peaked integrand;
# geometric spacing reaches decays as steep as exp(-s**-r) with s**-r ~ e^700
_PROBE_OFFSETS = np.concatenate(
    [
        10.0 ** np.array([-300.0, -250.0, -200.0, -160.0, -130.0, -100.0, -80.0,
                          -60.0, -45.0, -35.0, -25.0, -18.0, -12.0, -8.0, -5.0,
                          -3.0, -2.0, -1.3, -1.0, -0.7, -0.4]),
        np.linspace(0.5, 0.95, 4),
    ]
)
_NEGLIGIBLE = 130.0  # e-folds below the dominant panel at which a panel is noise
_LOG_ZERO = -1e6  # log-values below this cannot be resolved, only bounded
# (exp(-745) already underflows to 0.0, so only order-of-magnitude bounds
# are ever needed this deep)


_PEAK_MULTS = np.array(
    [-60.0, -12.0, -2.5, -0.6, 0.0, 0.6, 2.5, 12.0, 60.0]
)


def _probe_points(
    a: float, b: float, peak: Optional[tuple[float, float]] = None
) -> np.ndarray:
    width = b - a
    left = a + width * _PROBE_OFFSETS
    right = b - width * _PROBE_OFFSETS
    parts = [left, right]
    if peak is not None:
        u_star, scale = peak
        parts.append(u_star + scale * _PEAK_MULTS)
    pts = np.unique(np.concatenate(parts))
    return pts[(pts > a) & (pts < b)]


def _log_gl_panel(
    log_f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    quad: QuadratureSpec,
    counters,
    floor: float,
    budget: list[int],
    depth: int = 0,
) -> float:
    """Log-integral over one panel; stops early once provably below ``floor``.

    If node doubling stalls (panel straddles too many scales), the panel is
    bisected and both halves are integrated recursively.  Total node
    evaluations are limited by ``budget``; exhaustion raises.
    """
    prev = None
    n = quad.initial_nodes
    single_cap = min(512, quad.max_nodes)
    # the integrand is unimodal, so on a panel not containing the mode its
    # sup sits at an edge; include the edges in every sup bound, otherwise
    # a mass sliver hugging an edge can be declared negligible unseen
    edges = log_f(np.array([a, b]))
    edge_sup = float(np.max(edges))
    while True:
        if budget[0] <= 0:
            raise QuadratureError(
                f"log-quadrature exceeded its {quad.max_nodes}-node budget on ({a},{b})"
            )
        x, w = _nodes_for(a, b, n)
        ly = log_f(x)
        budget[0] -= n
        if counters is not None:
            counters.quad_evals += n
        m = float(ly.max())
        sup = max(m, edge_sup)
        if sup == -math.inf:
            return -math.inf
        if sup < _LOG_ZERO:
            # the panel is zero beyond any doubt; the sup bound is plenty
            return sup + math.log(b - a)
        if m == -math.inf:
            m = sup  # mass hugs an edge; fall through to the split path
            val = sup + math.log(b - a)
            spread = math.inf
            break
        val = m + math.log(float(np.dot(w, np.exp(ly - m))))
        if val < floor and sup + math.log(b - a) < floor:
            return val
        # evaluating log f involves terms of magnitude ~|values| amplified by
        # 1/(1-alpha) through log sigma, so the log-integral cannot be
        # resolved below that roundoff scale
        finite = ly[np.isfinite(ly)]
        spread = min(float(m - finite.min()), 2.0 * _NEGLIGIBLE)
        tol = max(_tol(quad, n), 4000.0 * 2.2e-16 * (8.0 + abs(m) + spread))
        if prev is not None and abs(val - prev) <= tol:
            return val
        prev = val
        if n >= single_cap:
            break
        n *= 2
    if (
        depth >= 60
        or spread < 10.0  # flat but noise-limited: splitting cannot improve it
        or (b - a) < 1e-15 * max(abs(a), abs(b), 1e-300)
    ):
        return val
    mid = 0.5 * (a + b)
    left = _log_gl_panel(log_f, a, mid, quad, counters, floor, budget, depth + 1)
    right_floor = max(floor, left - _NEGLIGIBLE)
    right = _log_gl_panel(log_f, mid, b, quad, counters, right_floor, budget, depth + 1)
    return logaddexp(left, right)


def log_gl_integral(
    log_f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    quad: QuadratureSpec = DEFAULT_QUAD,
    counters=None,
    peak: Optional[tuple[float, float]] = None,
) -> float:
    """log of the integral of exp(log_f) over (a,b); -inf for empty ranges.

    The integrand is assumed unimodal in the log domain (all integrands here
    are).  A geometrically refined probe grid locates the window carrying
    the mass -- possibly a sliver near either endpoint -- and the window is
    cut into graded panels wherever the integrand moves by a few e-folds
    between probes, which tames power-law boundary layers spanning many
    decades.  Interior maxima can be arbitrarily narrow, so callers that
    know the mode pass ``peak = (location, width scale)`` and probes are
    planted around it.  Panels are integrated by Gauss-Legendre node
    doubling, most important first, so negligible panels exit early.
    Everything stays in the log domain: peaks of height exp(700) are
    routine.
    """
    if b <= a:
        return -math.inf
    pts = _probe_points(a, b, peak)
    vals = np.asarray(log_f(pts), dtype=float)
    if counters is not None:
        counters.quad_evals += pts.size
    imax = int(np.argmax(vals))
    vmax = float(vals[imax])
    if vmax == -math.inf:
        return -math.inf
    if vmax < _LOG_ZERO:
        return vmax + math.log(b - a)

    thr = vmax - 2.0 * _NEGLIGIBLE
    i0 = imax
    while i0 > 0 and vals[i0 - 1] >= thr:
        i0 -= 1
    i1 = imax
    while i1 < pts.size - 1 and vals[i1 + 1] >= thr:
        i1 += 1

    breaks = [float(pts[i0])]
    level = {float(pts[i0]): float(vals[i0])}
    last = float(vals[i0])
    for i in range(i0 + 1, i1 + 1):
        if i == i1 or i == imax or abs(float(vals[i]) - last) > 40.0:
            breaks.append(float(pts[i]))
            level[float(pts[i])] = float(vals[i])
            last = float(vals[i])
    panels = [
        (lo_i, hi_i, max(level[lo_i], level[hi_i]))
        for lo_i, hi_i in zip(breaks[:-1], breaks[1:])
        if hi_i > lo_i
    ]
    if pts[i0] > a:
        panels.append((a, float(pts[i0]), float(vals[i0])))
    if pts[i1] < b:
        panels.append((float(pts[i1]), b, float(vals[i1])))
    panels.sort(key=lambda p: -p[2])

    total = -math.inf
    budget = [2 * quad.max_nodes]
    for lo_i, hi_i, _ in panels:
        floor = total - _NEGLIGIBLE if total > -math.inf else -math.inf
        part = _log_gl_panel(log_f, lo_i, hi_i, quad, counters, floor, budget)
        total = logaddexp(total, part)
    return total


# ---------------------------------------------------------------------------
# stable density / CDF / quantile via the integral representation
# ---------------------------------------------------------------------------


def log_phi_alpha(
    x: float,
    alpha: float,
    quad: QuadratureSpec = DEFAULT_QUAD,
    counters=None,
) -> float:
    """log of the density of S_{1/theta} at x > 0."""
    _check_alpha(alpha)
    if not (x > 0.0):
        raise DomainError(f"x must be > 0, got {x}")
    r = alpha / (1.0 - alpha)
    lx = math.log(x)
    li = log_kernel_integral(alpha, 1.0, -r * lx, 0.0, 1.0, quad, counters)
    return math.log(r) - (r + 1.0) * lx + li


def phi_alpha(
    x: float,
    alpha: float,
    quad: QuadratureSpec = DEFAULT_QUAD,
    counters=None,
) -> float:
    return math.exp(log_phi_alpha(x, alpha, quad, counters))


def stable_density(
    x: float,
    t: float,
    params: StableParams,
    quad: QuadratureSpec = DEFAULT_QUAD,
    counters=None,
) -> float:
    """Density of S_t at x, by self-similar scaling of phi_alpha."""
    if not (t > 0.0):
        raise DomainError("t must be > 0")
    scale = (params.theta * t) ** (-1.0 / params.alpha)
    return phi_alpha(x * scale, params.alpha, quad, counters) * scale


def stable_cdf(
    x: float,
    t: float,
    params: StableParams,
    quad: QuadratureSpec = DEFAULT_QUAD,
    counters=None,
) -> float:
    """P(S_t <= x) = int_0^1 exp(-sigma(u) (x / (theta t)^{1/alpha})**(-r)) du."""
    if not (t > 0.0):
        raise DomainError("t must be > 0")
    if x <= 0.0:
        return 0.0
    alpha = params.alpha
    r = params.r
    ly = math.log(x) - math.log(params.theta * t) / alpha
    val = math.exp(log_kernel_integral(alpha, 0.0, -r * ly, 0.0, 1.0, quad, counters))
    return min(1.0, max(0.0, val))


def stable_quantile(
    p: float,
    t: float,
    params: StableParams,
    quad: QuadratureSpec = DEFAULT_QUAD,
) -> float:
    """Inverse of stable_cdf in (0,1), bisection on log x then Brent polish."""
    if not (0.0 < p < 1.0):
        raise DomainError("p must lie in (0,1)")
    from scipy.optimize import brentq

    scale = (params.theta * t) ** (1.0 / params.alpha)
    lo, hi = math.log(scale) - 2.0, math.log(scale) + 2.0
    while stable_cdf(math.exp(lo), t, params, quad) > p:
        lo -= 4.0
    while stable_cdf(math.exp(hi), t, params, quad) < p:
        hi += 4.0
    lx = brentq(
        lambda l: stable_cdf(math.exp(l), t, params, quad) - p, lo, hi, xtol=1e-13
    )
    return math.exp(lx)


# ---------------------------------------------------------------------------
# Levy tail and Mellin moments
# ---------------------------------------------------------------------------


def levy_tail(x: float, params: StableParams) -> float:
    """nu((x, inf)) = x**(-alpha) * theta / Gamma(1-alpha)."""
    if not (x > 0.0):
        raise DomainError("x must be > 0")
    return x ** (-params.alpha) * params.theta / math.gamma(1.0 - params.alpha)


def mellin_moment(eta: float, t: float, params: StableParams) -> float:
    """E[S_t**eta] = (t*theta)**(eta/alpha) Gamma(1-eta/alpha) / Gamma(1-eta).

    Finite precisely for eta < alpha; larger eta raises (moment infinite).
    """
    if not (t > 0.0):
        raise DomainError("t must be > 0")
    if eta >= params.alpha:
        raise DomainError(f"moment infinite for eta={eta} >= alpha={params.alpha}")
    a = params.alpha
    val = (eta / a) * math.log(t * params.theta)
    val += math.lgamma(1.0 - eta / a) - math.lgamma(1.0 - eta)
    if val > 709.0:
        raise NumericOverflowError("Mellin moment exceeds double range")
    return math.exp(val)


# ---------------------------------------------------------------------------
# mixture weight p' and the region weights of the second proposal density
# ---------------------------------------------------------------------------


def log_marginal_integrals(
    log_s: float,
    alpha: float,
    quad: QuadratureSpec = DEFAULT_QUAD,
    counters=None,
) -> tuple[float, float]:
    """(log I1, log I2) with I1 = int_0^1 exp(-sigma(y) s**-r) dy and
    I2 = int_0^1 sigma(y)**alpha exp(-sigma(y) s**-r) dy."""
    _check_alpha(alpha)
    r = alpha / (1.0 - alpha)
    w = -r * log_s
    if w > 700.0:
        raise NumericOverflowError(
            "s**(-r) exceeds double range; the y-marginal is numerically degenerate"
        )

    return (
        log_kernel_integral(alpha, 0.0, w, 0.0, 1.0, quad, counters),
        log_kernel_integral(alpha, alpha, w, 0.0, 1.0, quad, counters),
    )


def log_mixture_pprime(
    log_s: float,
    alpha: float,
    quad: QuadratureSpec = DEFAULT_QUAD,
    counters=None,
) -> float:
    """log p' = -alpha log(2 - 2**alpha) - alpha log r + alpha r log s
    + log I1 - log Gamma(1-alpha) - log I2."""
    r = alpha / (1.0 - alpha)
    li1, li2 = log_marginal_integrals(log_s, alpha, quad, counters)
    return (
        -alpha * math.log(2.0 - 2.0**alpha)
        - alpha * math.log(r)
        + alpha * r * log_s
        + li1
        - math.lgamma(1.0 - alpha)
        - li2
    )


def mixture_weight_pprime(
    s: float,
    alpha: float,
    quad: QuadratureSpec = DEFAULT_QUAD,
    counters=None,
) -> tuple[float, float]:
    """Return (p', p) with p = p'/(p'+1).

    p is computed from log p' and is always finite in (0,1); p' itself may
    overflow to inf for extreme s, which is reported as float('inf').
    """
    if not (s > 0.0):
        raise DomainError("s must be > 0")
    lp = log_mixture_pprime(math.log(s), alpha, quad, counters)
    pprime = math.exp(lp) if lp < 709.0 else math.inf
    p = 1.0 / (1.0 + math.exp(-lp)) if lp > -709.0 else math.exp(lp)
    return pprime, p


def log_region_weights(
    log_s: float,
    alpha: float,
    z: float,
    z_star: float,
    quad: QuadratureSpec = DEFAULT_QUAD,
    counters=None,
) -> tuple[float, float, float]:
    """Log-masses of f~(y) = sigma(y)**alpha exp(-sigma(y) s**-r) over
    (0, z_star), (z_star, z) and (z, 1); empty intervals give -inf."""
    if not (0.0 <= z_star <= z <= 1.0):
        raise DomainError("need 0 <= z_star <= z <= 1")
    r = alpha / (1.0 - alpha)
    w = -r * log_s
    if w > 700.0:
        raise NumericOverflowError("s**(-r) exceeds double range")

    return (
        log_kernel_integral(alpha, alpha, w, 0.0, z_star, quad, counters),
        log_kernel_integral(alpha, alpha, w, z_star, z, quad, counters),
        log_kernel_integral(alpha, alpha, w, z, 1.0, quad, counters),
    )


def psi2_region_weights(
    s: float,
    alpha: float,
    z: float,
    z_star: float,
    quad: QuadratureSpec = DEFAULT_QUAD,
    counters=None,
) -> tuple[float, float, float]:
    """Raw region masses (W0, W1, W2); degenerate intervals yield exact 0."""
    if not (s > 0.0):
        raise DomainError("s must be > 0")
    lw = log_region_weights(math.log(s), alpha, z, z_star, quad, counters)
    return tuple(math.exp(v) if v > -math.inf else 0.0 for v in lw)  # type: ignore[return-value]
