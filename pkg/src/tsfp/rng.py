"""Seeded, splittable random streams and work accounting.

``RngStream`` wraps a counter-based Philox generator keyed on
``(seed, stream)``: identical pairs replay identical draw sequences, and
distinct stream ids give statistically independent substreams by
construction of the generator.  All derived variates (exponential, normal)
are built from the uniform draws of the stream, so the ``draws`` counter is
an exact account of consumed randomness.

A ``WorkCounters`` object can be attached to a stream; instrumented
algorithms then record uniforms, rejection-loop iterations, Newton steps,
quadrature node evaluations and log-concave preprocessing steps.  Counter
values are reproducible under fixed seeds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.random import Generator, Philox

_BUF = 1024


@dataclass
class WorkCounters:
    uniforms: int = 0
    rejections: int = 0
    newton_iters: int = 0
    quad_evals: int = 0
    logconcave_steps: int = 0

    def total(self) -> int:
        return (
            self.uniforms
            + self.rejections
            + self.newton_iters
            + self.quad_evals
            + self.logconcave_steps
        )

    def merged(self, other: "WorkCounters") -> "WorkCounters":
        return WorkCounters(
            self.uniforms + other.uniforms,
            self.rejections + other.rejections,
            self.newton_iters + other.newton_iters,
            self.quad_evals + other.quad_evals,
            self.logconcave_steps + other.logconcave_steps,
        )

    def as_dict(self) -> dict[str, int]:
        return {
            "uniforms": self.uniforms,
            "rejections": self.rejections,
            "newton_iters": self.newton_iters,
            "quad_evals": self.quad_evals,
            "logconcave_steps": self.logconcave_steps,
            "total": self.total(),
        }


class RngStream:
    """Reproducible uniform source: one Philox stream per (seed, stream) pair."""

    __slots__ = ("seed", "stream", "draws", "counters", "_gen", "_buf", "_pos")

    def __init__(self, seed: int, stream: int = 0):
        self.seed = int(seed)
        self.stream = int(stream)
        self.draws = 0
        self.counters: WorkCounters | None = None
        self._gen = Generator(Philox(key=[self.seed & (2**64 - 1), self.stream & (2**64 - 1)]))
        self._buf = self._gen.random(_BUF)
        self._pos = 0

    def spawn(self, stream: int) -> "RngStream":
        """Independent substream of the same seed."""
        return RngStream(self.seed, stream)

    def attach(self, counters: WorkCounters | None) -> None:
        self.counters = counters

    def uniform(self) -> float:
        """U(0,1), open at both ends."""
        while True:
            if self._pos >= _BUF:
                self._buf = self._gen.random(_BUF)
                self._pos = 0
            u = self._buf[self._pos]
            self._pos += 1
            self.draws += 1
            if self.counters is not None:
                self.counters.uniforms += 1
            if u > 0.0:
                return float(u)

    def exponential(self) -> float:
        """Exp(1) via inversion of a single uniform."""
        return -math.log(self.uniform())

    def normal(self) -> float:
        """Standard normal via Box-Muller (two uniforms, no caching)."""
        u1 = self.uniform()
        u2 = self.uniform()
        return math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)

    def __repr__(self) -> str:  # pragma: no cover
        return f"RngStream(seed={self.seed}, stream={self.stream}, draws={self.draws})"
