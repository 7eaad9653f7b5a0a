"""Statistical validation and complexity benchmarking.

* ``ks_two_sample``: exact two-sample Kolmogorov-Smirnov statistic via a
  merged sort, p-value from the asymptotic Kolmogorov distribution at the
  effective size n m/(n + m).
* ``direct_psi_marginal_sampler``: reference sampler for the y-marginals of
  the two proposal densities by direct numerical inversion of their
  quadrature CDFs with Householder's order-4 method.  It exists to
  cross-check the rejection samplers distributionally (and to measure how
  much slower direct inversion is); the initial guess comes from a
  precomputed mass-balanced grid.
* ``bench_sweep``: runs a named sampler across a parameter grid collecting
  work counters (the machine-independent complexity proxy) and wall time
  (reported, never asserted).
* ``invariant_grid_suite``: the deterministic inequality checks -- the
  acceptance-ratio sandwich, the convexity/concavity and envelope bounds on
  sigma and rho, and the pointwise floors of the regional acceptance
  probabilities.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .boundary import Boundary
from .errors import DomainError
from .first_passage import sfp_sample, tsffp_sample
from .params import (
    DEFAULT_PRECISION,
    DEFAULT_QUAD,
    Precision,
    QuadratureSpec,
    StableParams,
    TemperedParams,
)
from .rng import RngStream, WorkCounters
from .rootfind import householder4_invert
from .undershoot import UndershootContext, h_b, h_c1, h_c2, su_log_acceptance
from .zolotarev import (
    log_gl_integral,
    log_kernel_integral,
    log_rho,
    log_rho_d1,
    log_rho_d2,
    log_rho_d3,
    log_rho_zero,
    log_sigma_zero,
    logaddexp,
    rho,
    sigma,
    sigma_prime,
    sigma_second,
    sigma_zero,
    v_log_sigma,
)

# ---------------------------------------------------------------------------
# two-sample Kolmogorov-Smirnov
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class KsResult:
    statistic: float
    pvalue: float
    n: int
    m: int

    def passes(self, level: float = 0.001) -> bool:
        return self.pvalue >= level


def _kolmogorov_sf(lam: float) -> float:
    """P(K > lam) = 2 sum_k (-1)**(k-1) exp(-2 k**2 lam**2)."""
    if lam <= 0.0:
        return 1.0
    total = 0.0
    for k in range(1, 200):
        term = 2.0 * (-1.0) ** (k - 1) * math.exp(-2.0 * k * k * lam * lam)
        total += term
        if abs(term) < 1e-14:
            break
    return min(1.0, max(0.0, total))


def ks_two_sample(xs: Sequence[float], ys: Sequence[float]) -> KsResult:
    """Exact D via a merged sweep of both sorted samples."""
    xs = np.sort(np.asarray(xs, dtype=float))
    ys = np.sort(np.asarray(ys, dtype=float))
    n, m = len(xs), len(ys)
    if n == 0 or m == 0:
        raise DomainError("both samples must be nonempty")
    pooled = np.concatenate([xs, ys])
    cdf_x = np.searchsorted(xs, pooled, side="right") / n
    cdf_y = np.searchsorted(ys, pooled, side="right") / m
    d = float(np.max(np.abs(cdf_x - cdf_y)))
    en = math.sqrt(n * m / (n + m))
    return KsResult(d, _kolmogorov_sf(d * en), n, m)


# ---------------------------------------------------------------------------
# direct inversion of the proposal y-marginals
# ---------------------------------------------------------------------------


class DirectPsiMarginal:
    """Quadrature CDF of a proposal y-marginal plus its Householder inverter.

    which = 1: density proportional to exp(-sigma(y) s**-r);
    which = 2: density proportional to sigma(y)**alpha exp(-sigma(y) s**-r).
    """

    def __init__(
        self,
        which: int,
        ctx: UndershootContext,
        quad: QuadratureSpec = DEFAULT_QUAD,
        cells: int = 128,
    ):
        if which not in (1, 2):
            raise DomainError("which must be 1 or 2")
        self.alpha = ctx.alpha
        self.a_coef = 0.0 if which == 1 else ctx.alpha
        self.w = -ctx.r * ctx.log_s
        self.quad = quad
        # mass-balanced grid: split any cell holding more than ~1/cells of
        # the total so the within-cell quadrature below stays trivial
        edges = [0.0, 1.0]
        masses = [self._log_mass(0.0, 1.0)]
        total = masses[0]
        budget = math.log(2.0 / cells)
        for _ in range(4 * cells):
            i = int(np.argmax(masses))
            if masses[i] - total <= budget or edges[i + 1] - edges[i] < 1e-12:
                break
            mid = 0.5 * (edges[i] + edges[i + 1])
            left = self._log_mass(edges[i], mid)
            right = self._log_mass(mid, edges[i + 1])
            edges.insert(i + 1, mid)
            masses[i : i + 1] = [left, right]
        self.edges = np.array(edges)
        cum = [-math.inf]
        for lm in masses:
            cum.append(logaddexp(cum[-1], lm))
        self.log_total = cum[-1]
        self.cum = np.exp(np.array(cum) - self.log_total)
        self.cum[-1] = 1.0

    def _log_mass(self, a: float, b: float) -> float:
        return log_kernel_integral(
            self.alpha, self.a_coef, self.w, a, b, self.quad
        )

    def cdf(self, y: float) -> float:
        if y <= 0.0:
            return 0.0
        if y >= 1.0:
            return 1.0
        i = int(np.searchsorted(self.edges, y, side="right")) - 1
        i = min(max(i, 0), len(self.edges) - 2)
        seg = self._log_mass(self.edges[i], y)
        lo = math.log(self.cum[i]) if self.cum[i] > 0.0 else -math.inf
        return math.exp(logaddexp(lo + self.log_total, seg) - self.log_total)

    # density and its first three derivatives, for the Householder steps
    def _density_pack(self, y: float) -> tuple[float, float, float, float]:
        alpha = self.alpha
        ll = log_rho(y, alpha) / (1.0 - alpha)
        l1 = log_rho_d1(y, alpha) / (1.0 - alpha)
        l2 = log_rho_d2(y, alpha) / (1.0 - alpha)
        l3 = log_rho_d3(y, alpha) / (1.0 - alpha)
        e = math.exp(ll + self.w) if ll + self.w < 709.0 else math.inf
        g = self.a_coef * ll - e
        g1 = l1 * (self.a_coef - e)
        g2 = l2 * (self.a_coef - e) - l1 * l1 * e
        g3 = l3 * (self.a_coef - e) - 3.0 * l1 * l2 * e - l1**3 * e
        f = math.exp(g - self.log_total)
        return f, f * g1, f * (g2 + g1 * g1), f * (g3 + 3.0 * g1 * g2 + g1**3)

    def invert(
        self,
        v: float,
        precision: Precision = DEFAULT_PRECISION,
        counters=None,
    ) -> float:
        """Quantile by Householder order 4, seeded from the cell grid."""
        if not (0.0 < v < 1.0):
            raise DomainError("v must lie in (0,1)")
        i = int(np.searchsorted(self.cum, v, side="right")) - 1
        i = min(max(i, 0), len(self.edges) - 2)
        lo, hi = self.edges[i], self.edges[i + 1]
        clo, chi = self.cum[i], self.cum[i + 1]
        frac = (v - clo) / (chi - clo) if chi > clo else 0.5
        x0 = lo + frac * (hi - lo)

        def g3(x: float) -> float:
            fv = self.cdf(x) - v
            d1, d2, d3, _ = self._density_pack(x)
            return (-6.0 * d1**3 + 6.0 * fv * d1 * d2 - fv * fv * d3) / fv**4

        def g4(x: float) -> float:
            fv = self.cdf(x) - v
            d1, d2, d3, d4 = self._density_pack(x)
            return (
                24.0 * d1**4
                - 36.0 * fv * d1 * d1 * d2
                + 6.0 * fv * fv * d2 * d2
                + 8.0 * fv * fv * d1 * d3
                - fv**3 * d4
            ) / fv**5

        try:
            res = householder4_invert(
                g3, g4, x0, precision, counters, lo=0.0, hi=1.0
            )
            return res.root
        except Exception:
            # fall back to bisection on the cdf within the bracketing cell
            a, b = lo, hi
            for _ in range(precision.bits + 10):
                mid = 0.5 * (a + b)
                if self.cdf(mid) < v:
                    a = mid
                else:
                    b = mid
            return 0.5 * (a + b)

    def sample(
        self,
        rng: RngStream,
        precision: Precision = DEFAULT_PRECISION,
    ) -> float:
        return self.invert(rng.uniform(), precision, rng.counters)


def direct_psi_marginal_sampler(
    which: int,
    ctx: UndershootContext,
    rng: RngStream,
    precision: Precision = DEFAULT_PRECISION,
) -> float:
    """One reference draw; for repeated draws build DirectPsiMarginal once."""
    return DirectPsiMarginal(which, ctx).sample(rng, precision)


# ---------------------------------------------------------------------------
# complexity benchmarking
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BenchRow:
    target: str
    param_name: str
    param: float
    n: int
    mean_counters: dict
    walltime_s_per_1e4: float


def bench_sweep(
    target: str,
    grid: Sequence[float],
    n: int,
    seed: int,
    barrier: Optional[Boundary] = None,
    alpha: float = 0.55,
    theta: float = 1.0,
    quad: QuadratureSpec = DEFAULT_QUAD,
    precision: Precision = DEFAULT_PRECISION,
) -> list[BenchRow]:
    """Counter-instrumented sweep; targets: 'sfp-alpha' (stable first
    passage over alpha) and 'tsffp-q' (fast tempered sweep over q)."""
    if n < 100:
        raise DomainError("bench runs need n >= 100")
    if target not in ("sfp-alpha", "tsffp-q"):
        raise DomainError("target must be 'sfp-alpha' or 'tsffp-q'")
    b = barrier if barrier is not None else Boundary.constant(1.0)
    rows = []
    for j, g in enumerate(grid):
        counters = WorkCounters()
        rng = RngStream(seed, stream=j + 1)
        rng.attach(counters)
        t0 = time.perf_counter()
        if target == "sfp-alpha":
            params = StableParams(g, theta)
            for _ in range(n):
                sfp_sample(params, b, math.inf, rng, quad, precision)
        else:
            tparams = TemperedParams.of(alpha, theta, g)
            for _ in range(n):
                tsffp_sample(tparams, b, rng, quad, precision)
        wall = time.perf_counter() - t0
        mean = {k: v / n for k, v in counters.as_dict().items()}
        rows.append(
            BenchRow(
                target,
                "alpha" if target == "sfp-alpha" else "q",
                g,
                n,
                mean,
                wall / n * 1e4,
            )
        )
    return rows


# ---------------------------------------------------------------------------
# deterministic inequality suite
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    margin: float
    detail: str


def invariant_grid_suite(
    alphas: Sequence[float] = (0.1, 0.5, 0.9),
    grid_points: int = 1000,
    log_sigma_d1: Callable[[float, float], float] = None,
    log_sigma_d2: Callable[[float, float], float] = None,
) -> list[CheckResult]:
    """Deterministic grid checks of the structural inequalities.

    Analytic derivative callbacks are injectable so a corrupted surface
    fails loudly (mutation sanity); defaults are the production ones.
    """
    d1 = log_sigma_d1 or (lambda u, a: log_rho_d1(u, a) / (1.0 - a))
    d2 = log_sigma_d2 or (lambda u, a: log_rho_d2(u, a) / (1.0 - a))
    out: list[CheckResult] = []
    us = np.linspace(1.0 / (grid_points + 1), 1.0 - 1.0 / (grid_points + 1), grid_points)
    h = 1e-5

    def record(name: str, margin: float, detail: str = "") -> None:
        out.append(CheckResult(name, bool(margin >= 0.0), float(margin), detail))

    for a in alphas:
        ls = lambda u: log_rho(u, a) / (1.0 - a)
        # positivity of the first three derivatives of log sigma, both
        # analytically and by centered finite differences
        interior = us[(us > 2 * h) & (us < 1 - 2 * h)]
        fd1 = [(ls(u + h) - ls(u - h)) / (2 * h) for u in interior]
        fd2 = [(ls(u + h) - 2 * ls(u) + ls(u - h)) / h**2 for u in interior]
        fd3 = [
            (ls(u + 2 * h) - 2 * ls(u + h) + 2 * ls(u - h) - ls(u - 2 * h))
            / (2 * h**3)
            for u in interior
        ]
        record(f"log-sigma-d1-positive[a={a}]", min(fd1))
        record(f"log-sigma-d2-positive[a={a}]", min(fd2))
        record(f"log-sigma-d3-positive[a={a}]", min(fd3) + 1e-6)
        an1 = [d1(u, a) for u in interior]
        an2 = [d2(u, a) for u in interior]
        rel1 = max(
            abs(f - an) / max(abs(an), 1e-12) for f, an in zip(fd1, an1)
        )
        rel2 = max(
            abs(f - an) / max(abs(an), 1e-12) for f, an in zip(fd2, an2)
        )
        record(f"log-sigma-d1-analytic-vs-fd[a={a}]", 1e-3 - rel1, f"rel {rel1:.2e}")
        record(f"log-sigma-d2-analytic-vs-fd[a={a}]", 1e-2 - rel2, f"rel {rel2:.2e}")

        # concavity of 1/rho: finite-difference second derivative <= 1e-12
        inv_rho = lambda u: 1.0 / rho(u, a)
        fd2r = max(
            (inv_rho(u + h) - 2 * inv_rho(u) + inv_rho(u - h)) / h**2
            for u in interior
        )
        record(f"one-over-rho-concave[a={a}]", 1e-12 - fd2r, f"max fd2 {fd2r:.2e}")

        # envelope bounds on sigma
        lo_margin = math.inf
        hi_margin = math.inf
        for u in us:
            s_val = sigma(u, a)
            lo = (math.sin(math.pi * a) / 4.0) ** (1.0 / (1.0 - a)) * (1.0 - u) ** (
                -1.0 / (1.0 - a)
            )
            hi = a ** (a / (1.0 - a)) * (1.0 - a) * (1.0 - u) ** (-1.0 / (1.0 - a))
            lo_margin = min(lo_margin, s_val - lo)
            hi_margin = min(hi_margin, hi - s_val)
        record(f"sigma-lower-envelope[a={a}]", lo_margin)
        record(f"sigma-upper-envelope[a={a}]", hi_margin)

        # near-0 linear bound: 0 <= sigma(x) - sigma(0+) <= (pi - 2/e)(1-a) x
        s0 = sigma_zero(a)
        cslope = (math.pi - 2.0 / math.e) * (1.0 - a)
        m_lin = math.inf
        m_pos = math.inf
        for u in us[us < 0.5]:
            gap = sigma(u, a) - s0
            m_pos = min(m_pos, gap)
            m_lin = min(m_lin, cslope * u - gap)
        record(f"sigma-linear-upper[a={a}]", m_lin)
        record(f"sigma-gap-nonneg[a={a}]", m_pos + 1e-15)

        # derivative envelope: sigma' <= a**r (1-a)(r+1)(1-x)**-(r+2)
        r = a / (1.0 - a)
        m_der = math.inf
        for u in us:
            cap = a**r * (1.0 - a) * (r + 1.0) * (1.0 - u) ** -(r + 2.0)
            m_der = min(m_der, cap - sigma_prime(u, a))
        record(f"sigma-prime-envelope[a={a}]", m_der)

    # acceptance-ratio sandwich over (excess, alpha, s)
    alphas_fine = np.linspace(0.02, 0.98, 50)
    log_dp = np.linspace(-14.0, 14.0, 200)  # log of excess * s**r
    worst_hi = math.inf
    worst_lo = math.inf
    for a in alphas_fine:
        r = a / (1.0 - a)
        for s in (0.1, 1.0, 10.0):
            lsv = math.log(s)
            for ld in log_dp:
                la = su_log_acceptance(ld - r * lsv, lsv, a)
                worst_hi = min(worst_hi, -la)
                worst_lo = min(worst_lo, la - math.log((1.0 - a) / 2.0))
    record("acceptance-ratio-upper", worst_hi + 1e-12, f"min log gap {worst_hi:.2e}")
    record("acceptance-ratio-lower", worst_lo, f"min log gap {worst_lo:.2e}")

    # pointwise floors of the regional acceptance probabilities
    floor_c1 = 4.0 / (3.0 * math.pi * math.sqrt(math.e))
    m_c1 = math.inf
    m_b = math.inf
    m_c2 = math.inf
    c2_floor = math.exp(-1.0) * (math.pi / 4.0 + math.sqrt(2.0)) / math.pi
    for a in alphas_fine:
        r = a / (1.0 - a)
        for s in (0.5, 1.0, 5.0, 50.0):
            w = -r * math.log(s)
            log_target = math.log(a) + r * math.log(s)
            if log_target < log_sigma_zero(a):
                continue
            from .rootfind import invert_sigma

            z = invert_sigma(a, log_target=log_target)
            for y in np.linspace(1e-4, min(z, 0.5) - 1e-4, 40):
                if y <= 0:
                    continue
                m_b = min(m_b, h_b(y, a, w) - 0.0823 * 0.99)
            if z > 0.5 + 1e-6:
                for y in np.linspace(0.5 + 1e-6, z - 1e-9, 40):
                    if a <= 0.5:
                        m_c1 = min(m_c1, h_c1(y, a, w) - floor_c1)
                    else:
                        m_c2 = min(m_c2, h_c2(y, a, w) / (1.0 - a) ** 2 - c2_floor)
    record("h-b-floor", m_b)
    record("h-c1-floor", m_c1)
    record("h-c2-scaled-floor", m_c2)

    # log-concavity of the tail target with mode at z
    for a in (0.3, 0.7, 0.9):
        r = a / (1.0 - a)
        s = 2.0
        w = -r * math.log(s)
        from .rootfind import invert_sigma

        z = invert_sigma(a, log_target=math.log(a) + r * math.log(s))
        lf = lambda y: a * log_rho(y, a) / (1.0 - a) - math.exp(
            log_rho(y, a) / (1.0 - a) + w
        )
        hh = (1.0 - z) * 1e-4
        m_cc = math.inf
        for y in np.linspace(z + 2 * hh, 1.0 - 2 * hh, 50):
            fd2v = (lf(y + hh) - 2 * lf(y) + lf(y - hh)) / hh**2
            m_cc = min(m_cc, 1e-10 - fd2v * hh * hh)  # scaled slack
        record(f"tail-target-log-concave[a={a}]", m_cc)

    return out


def suite_report(results: Sequence[CheckResult]) -> str:
    lines = []
    for rr in results:
        status = "PASS" if rr.passed else "FAIL"
        extra = f"  ({rr.detail})" if rr.detail else ""
        lines.append(f"{status}  {rr.name}  margin={rr.margin:.3e}{extra}")
    n_bad = sum(0 if rr.passed else 1 for rr in results)
    lines.append(f"{len(results) - n_bad}/{len(results)} checks passed")
    return "\n".join(lines)
