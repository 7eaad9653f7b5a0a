"""Process characteristics and numeric policy objects.

``StableParams`` fixes the stability index alpha in (0,1) and the intensity
theta > 0 of a driftless stable subordinator with Laplace exponent
``u -> theta * u**alpha``.  ``TemperedParams`` adds the tempering rate q >= 0
(Levy density multiplied by exp(-q x)).  Derived constants used everywhere:

    r       = alpha / (1 - alpha)              (so r / alpha = r + 1)
    w_alpha = Gamma(1 - alpha) / alpha         (Levy tail normalisation)
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import DomainError


@dataclass(frozen=True)
class StableParams:
    """Characteristics (alpha, theta) of a driftless stable subordinator."""

    alpha: float
    theta: float = 1.0

    def __post_init__(self) -> None:
        if not (0.0 < self.alpha < 1.0):
            raise DomainError(f"alpha must lie in (0,1), got {self.alpha}")
        if not (self.theta > 0.0) or not math.isfinite(self.theta):
            raise DomainError(f"theta must be positive and finite, got {self.theta}")

    @property
    def r(self) -> float:
        return self.alpha / (1.0 - self.alpha)

    @property
    def w_alpha(self) -> float:
        return math.gamma(1.0 - self.alpha) / self.alpha


@dataclass(frozen=True)
class TemperedParams:
    """Stable characteristics plus a tempering rate q >= 0 (q = 0 is stable)."""

    base: StableParams
    q: float = 0.0

    def __post_init__(self) -> None:
        if self.q < 0.0 or not math.isfinite(self.q):
            raise DomainError(f"q must be finite and >= 0, got {self.q}")

    @property
    def alpha(self) -> float:
        return self.base.alpha

    @property
    def theta(self) -> float:
        return self.base.theta

    @property
    def r(self) -> float:
        return self.base.r

    @staticmethod
    def of(alpha: float, theta: float = 1.0, q: float = 0.0) -> "TemperedParams":
        return TemperedParams(StableParams(alpha, theta), q)

    def laplace_exponent(self, u: float) -> float:
        """psi(u) = ((u+q)**alpha - q**alpha) * theta, so E[e^{-u S_t}] = e^{-t psi(u)}."""
        if u < 0:
            raise DomainError("u must be >= 0")
        return ((u + self.q) ** self.alpha - self.q**self.alpha) * self.theta


@dataclass(frozen=True)
class QuadratureSpec:
    """Adaptive Gauss-Legendre policy: double nodes until two successive
    estimates agree to ``rtol`` (relative), starting from ``initial_nodes``
    and giving up at ``max_nodes``."""

    initial_nodes: int = 64
    max_nodes: int = 1 << 16
    rtol: float = 1e-12

    def __post_init__(self) -> None:
        if self.rtol <= 0.0:
            raise DomainError("rtol must be > 0")
        if self.initial_nodes < 2:
            raise DomainError("initial_nodes must be >= 2")
        if self.max_nodes < self.initial_nodes:
            raise DomainError("max_nodes must be >= initial_nodes")


DEFAULT_QUAD = QuadratureSpec()


@dataclass(frozen=True)
class Precision:
    """Number of output precision bits N; inversions stop at |dx| <= 2**-N."""

    bits: int = 53

    def __post_init__(self) -> None:
        if self.bits < 1:
            raise DomainError("precision bits must be >= 1")

    @property
    def eps(self) -> float:
        return 2.0 ** (-min(self.bits, 1074))


DEFAULT_PRECISION = Precision()
