"""Non-increasing barriers and their scaling transform.

A barrier is a non-increasing absolutely continuous b on [0, inf) with
b(0) > 0.  The samplers need b(t), its derivative (with the convention -1
at points of non-differentiability), the first zero T_b, and the inverse of
the strictly decreasing scaling transform B(t) = t**(-1/alpha) b(t) on
(0, T_b).

Four shapes are supported: constant level, linear a0 - a1 t truncated at 0,
piecewise-linear knot lists (with constant extension beyond the last knot),
and programmatic callbacks.  Composition state -- accumulated time shift,
vertical translate and an optional cap level -- is kept lazily so the
first-passage loops can shift and cap without resampling the underlying
function:

    value(t) = min(base(t + t_shift) - v_shift, cap)

Monotonicity is grid-checked at construction.  B_inv uses an analytic
inverse when the shape provides one and otherwise brackets in log t and
polishes with safeguarded Newton using
B'(t) = -t**(-1/alpha-1) b(t)/alpha + t**(-1/alpha) b'(t).
"""

from __future__ import annotations

import bisect
import math
from typing import Callable, Optional

from .errors import DomainError
from .params import DEFAULT_PRECISION, Precision

_CHECK_GRID = 257


class Boundary:
    def __init__(
        self,
        kind: str,
        data: dict,
        t_shift: float = 0.0,
        v_shift: float = 0.0,
        cap_level: Optional[float] = None,
        _checked: bool = False,
    ):
        self.kind = kind
        self.data = data
        self.t_shift = t_shift
        self.v_shift = v_shift
        self.cap_level = cap_level
        if self.value(0.0) <= 0.0:
            raise DomainError("barrier must start strictly positive")
        if not _checked:
            self._check_monotone()

    # -- constructors -------------------------------------------------------

    @staticmethod
    def constant(level: float) -> "Boundary":
        if not (level > 0.0):
            raise DomainError("constant barrier level must be > 0")
        return Boundary("const", {"c": float(level)}, _checked=True)

    @staticmethod
    def linear(a0: float, a1: float) -> "Boundary":
        """b(t) = max(a0 - a1 t, 0); a1 = 0 is a constant barrier."""
        if not (a0 > 0.0) or a1 < 0.0:
            raise DomainError("need a0 > 0 and a1 >= 0")
        return Boundary("linear", {"a0": float(a0), "a1": float(a1)}, _checked=True)

    @staticmethod
    def piecewise(knots_t, knots_b) -> "Boundary":
        ts = [float(t) for t in knots_t]
        bs = [float(b) for b in knots_b]
        if len(ts) != len(bs) or len(ts) < 1:
            raise DomainError("need equally many t and b knots, at least one")
        if ts[0] != 0.0:
            raise DomainError("the first knot must be at t = 0 (b(0) on the first line)")
        if any(t2 <= t1 for t1, t2 in zip(ts[:-1], ts[1:])):
            raise DomainError("knot times must be strictly increasing")
        if any(b2 > b1 for b1, b2 in zip(bs[:-1], bs[1:])):
            raise DomainError("knot values must be nonincreasing")
        if any(b <= 0.0 for b in bs):
            raise DomainError("knot values must be strictly positive")
        return Boundary("pwl", {"t": ts, "b": bs}, _checked=True)

    @staticmethod
    def from_callback(
        b: Callable[[float], float],
        b_prime: Callable[[float], float],
        T_b: float = math.inf,
        B_inv: Optional[Callable[[float, float], float]] = None,
    ) -> "Boundary":
        """Programmatic barrier; T_b is caller-declared and B_inv, if given,
        maps (v, alpha) to the analytic inverse of the scaling transform."""
        return Boundary("callback", {"b": b, "bp": b_prime, "Tb": T_b, "Binv": B_inv})

    @staticmethod
    def from_file(path: str) -> "Boundary":
        """Text barrier: header 't,b', one comma-separated pair per line,
        strictly increasing t starting at 0, nonincreasing positive b."""
        ts: list[float] = []
        bs: list[float] = []
        with open(path, "r", encoding="utf-8") as fh:
            header = fh.readline().strip()
            if header.replace(" ", "") != "t,b":
                raise DomainError(f"barrier file must start with 't,b' header, got {header!r}")
            for line_no, line in enumerate(fh, start=2):
                line = line.strip()
                if not line:
                    continue
                parts = line.split(",")
                if len(parts) != 2:
                    raise DomainError(f"line {line_no}: expected 't,b' pair, got {line!r}")
                ts.append(float(parts[0]))
                bs.append(float(parts[1]))
        return Boundary.piecewise(ts, bs)

    @staticmethod
    def from_spec(spec: str) -> "Boundary":
        """Mini-grammar: const:<b>, linear:<a0>,<a1>, file:<path>."""
        kind, _, rest = spec.partition(":")
        if kind == "const":
            return Boundary.constant(float(rest))
        if kind == "linear":
            a0, a1 = rest.split(",")
            return Boundary.linear(float(a0), float(a1))
        if kind == "file":
            return Boundary.from_file(rest)
        raise DomainError(f"unknown barrier spec {spec!r} (use const:, linear:, file:)")

    # -- base evaluations ----------------------------------------------------

    def _base_value(self, t: float) -> float:
        k = self.kind
        if k == "const":
            return self.data["c"]
        if k == "linear":
            return max(self.data["a0"] - self.data["a1"] * t, 0.0)
        if k == "pwl":
            ts, bs = self.data["t"], self.data["b"]
            if t >= ts[-1]:
                return bs[-1]
            i = bisect.bisect_right(ts, t) - 1
            t0, t1 = ts[i], ts[i + 1]
            b0, b1 = bs[i], bs[i + 1]
            return b0 + (b1 - b0) * (t - t0) / (t1 - t0)
        return self.data["b"](t)

    def _base_derivative(self, t: float) -> float:
        k = self.kind
        if k == "const":
            return 0.0
        if k == "linear":
            tb = self.data["a0"] / self.data["a1"] if self.data["a1"] > 0 else math.inf
            if t == tb:
                return -1.0
            return -self.data["a1"] if t < tb else 0.0
        if k == "pwl":
            ts, bs = self.data["t"], self.data["b"]
            if t > ts[-1]:
                return 0.0
            if t in ts:
                return -1.0  # kink convention; a Lebesgue-null set
            i = bisect.bisect_right(ts, t) - 1
            return (bs[i + 1] - bs[i]) / (ts[i + 1] - ts[i])
        return self.data["bp"](t)

    def _base_Tb(self) -> float:
        k = self.kind
        if k == "const":
            return math.inf
        if k == "linear":
            a1 = self.data["a1"]
            return self.data["a0"] / a1 if a1 > 0.0 else math.inf
        if k == "pwl":
            return math.inf  # knot values strictly positive, constant tail
        return self.data["Tb"]

    # -- public surface ------------------------------------------------------

    def value(self, t: float) -> float:
        if t < 0.0:
            raise DomainError("t must be >= 0")
        v = self._base_value(t + self.t_shift) - self.v_shift
        if self.cap_level is not None:
            v = min(v, self.cap_level)
        return max(v, 0.0)

    def derivative(self, t: float) -> float:
        if t < 0.0:
            raise DomainError("t must be >= 0")
        raw = self._base_value(t + self.t_shift) - self.v_shift
        if self.cap_level is not None:
            if raw > self.cap_level:
                return 0.0
            if raw == self.cap_level:
                return -1.0  # crossover kink
        if raw <= 0.0:
            return 0.0
        return self._base_derivative(t + self.t_shift)

    @property
    def b0(self) -> float:
        return self.value(0.0)

    @property
    def T_b(self) -> float:
        """First zero of the shifted/capped barrier (cap never creates one)."""
        base_tb = self._base_Tb()
        tb = max(base_tb - self.t_shift, 0.0)
        if self.v_shift > 0.0:
            tb = min(tb, self._first_level_hit(self.v_shift))
        return tb

    def _first_level_hit(self, level: float) -> float:
        """First t >= 0 with base(t + t_shift) <= level, by shape."""
        k = self.kind
        if k == "const":
            return math.inf if self.data["c"] > level else 0.0
        if k == "linear":
            a0, a1 = self.data["a0"], self.data["a1"]
            if a1 == 0.0:
                return math.inf if a0 > level else 0.0
            return max((a0 - level) / a1 - self.t_shift, 0.0)
        if k == "pwl":
            ts, bs = self.data["t"], self.data["b"]
            if bs[-1] > level:
                return math.inf
            for i in range(len(ts) - 1):
                if bs[i + 1] <= level < bs[i]:
                    frac = (bs[i] - level) / (bs[i] - bs[i + 1])
                    return max(ts[i] + frac * (ts[i + 1] - ts[i]) - self.t_shift, 0.0)
            return max(ts[0] - self.t_shift, 0.0)
        # callback: bisection against the declared horizon
        lo, hi = 0.0, 1.0
        if self.value(0.0) <= 0.0:
            return 0.0
        tb = self._base_Tb()
        horizon = tb - self.t_shift if math.isfinite(tb) else None
        while self._base_value(hi + self.t_shift) - level > 0.0:
            hi *= 2.0
            if horizon is not None and hi >= horizon:
                hi = horizon
                break
            if hi > 1e300:
                return math.inf
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if self._base_value(mid + self.t_shift) - level > 0.0:
                lo = mid
            else:
                hi = mid
        return hi

    def shift(self, dt: float, dv: float) -> "Boundary":
        """Lazy t -> value(t + dt) - dv; requires the shifted start positive."""
        if dt < 0.0 or dv < 0.0:
            raise DomainError("shifts must be nonnegative")
        cap = self.cap_level - dv if self.cap_level is not None else None
        return Boundary(
            self.kind,
            self.data,
            self.t_shift + dt,
            self.v_shift + dv,
            cap,
            _checked=True,
        )

    def cap(self, level: float) -> "Boundary":
        """Pointwise minimum with a flat level."""
        if not (level > 0.0):
            raise DomainError("cap level must be > 0")
        cap = level if self.cap_level is None else min(self.cap_level, level)
        return Boundary(
            self.kind, self.data, self.t_shift, self.v_shift, cap, _checked=True
        )

    def _check_monotone(self) -> None:
        """Grid check that the callback shape is nonincreasing (the closed
        shapes are nonincreasing by construction)."""
        if self.kind != "callback":
            return
        tb = self._base_Tb()
        horizon = tb if math.isfinite(tb) else max(8.0, 8.0 * self.b0)
        prev = self.value(0.0)
        for i in range(1, _CHECK_GRID):
            t = horizon * i / (_CHECK_GRID - 1)
            cur = self.value(t)
            if cur > prev * (1.0 + 1e-12) + 1e-15:
                raise DomainError(f"barrier increases near t = {t}")
            prev = cur

    # -- scaling transform ---------------------------------------------------

    def log_B(self, t: float, alpha: float) -> float:
        """log of B(t) = t**(-1/alpha) value(t); -inf at or beyond T_b."""
        if t == math.inf:
            return -math.inf
        if not (t > 0.0):
            raise DomainError("t must be > 0")
        v = self.value(t)
        if v <= 0.0:
            return -math.inf
        return -math.log(t) / alpha + math.log(v)

    def B(self, t: float, alpha: float) -> float:
        return math.exp(self.log_B(t, alpha))

    def B_inv(
        self,
        alpha: float,
        v: Optional[float] = None,
        log_v: Optional[float] = None,
        precision: Precision = DEFAULT_PRECISION,
    ) -> float:
        """The unique t in (0, T_b) with B(t) = v, to N relative bits.

        Accepts log_v directly because the stable draws feeding this can
        overflow doubles for small alpha.
        """
        if log_v is None:
            if v is None or not (v > 0.0):
                raise DomainError("provide positive v or log_v")
            log_v = math.log(v)
        if self.kind == "const" and self.cap_level is None and self.v_shift == 0.0:
            c = self.data["c"]
            return math.exp(alpha * (math.log(c) - log_v))
        if self.kind == "callback" and self.data.get("Binv") is not None:
            if self.t_shift == 0.0 and self.v_shift == 0.0 and self.cap_level is None:
                return self.data["Binv"](math.exp(log_v), alpha)
        return self._b_inv_numeric(alpha, log_v, precision)

    def _b_inv_numeric(self, alpha: float, log_v: float, precision: Precision) -> float:
        tb = self.T_b
        # bracket in w = log t; log B(e^w) is strictly decreasing in w
        start = alpha * (math.log(self.b0) - log_v)  # exact for a constant barrier
        if math.isfinite(tb):
            start = min(start, math.log(tb) - 1e-6)
        lo = hi = start
        while self.log_B(math.exp(lo), alpha) < log_v:
            lo -= 4.0
            if lo < -1490.0:
                raise DomainError("no crossing time bracket found (v too large)")
        if math.isfinite(tb):
            # approach T_b geometrically; log B drops to -inf there
            gap = tb - math.exp(hi)
            while self.log_B(math.exp(hi), alpha) >= log_v:
                gap *= 0.5
                if gap < 1e-15 * tb:
                    return math.exp(hi)
                hi = math.log(tb - gap)
        else:
            while self.log_B(math.exp(hi), alpha) >= log_v:
                hi += 4.0
                if hi > 1400.0:
                    raise DomainError("no crossing time bracket found (v too small)")
        for _ in range(70):
            mid = 0.5 * (lo + hi)
            if self.log_B(math.exp(mid), alpha) >= log_v:
                lo = mid
            else:
                hi = mid
        t = math.exp(0.5 * (lo + hi))
        # Newton polish in w = log t: the objective log B(e^w) - log_v has
        # derivative -1/alpha + t b'(t)/b(t), bounded away from 0
        for _ in range(4):
            bt = self.value(t)
            if bt <= 0.0:
                break
            g = -math.log(t) / alpha + math.log(bt) - log_v
            dg = -1.0 / alpha + t * self.derivative(t) / bt
            step = max(min(g / dg, 0.5), -0.5)
            t_new = t * math.exp(-step)
            if not (t_new > 0.0) or not math.isfinite(t_new):
                break
            t = t_new
        return t


def creep_probability(boundary: Boundary, t: float, alpha: float) -> float:
    """-b'(t) / (-b'(t) + b(t)/(alpha t)), the chance of a continuous crossing
    conditional on the crossing happening at time t."""
    if not (0.0 < t < boundary.T_b):
        raise DomainError(f"t must lie in (0, T_b), got {t}")
    bp = boundary.derivative(t)
    bt = boundary.value(t)
    denom = -bp + bt / (alpha * t)
    return -bp / denom
