"""Exact simulation of first-passage events of tempered stable subordinators.

The package provides:

* ``tsfp.zolotarev`` -- the deterministic special functions behind the
  Zolotarev integral representation of the positive stable density;
* ``tsfp.rootfind`` -- guarded Newton-Raphson and Householder inversion;
* ``tsfp.rng`` / ``tsfp.samplers`` -- seeded splittable streams and exact
  variate generators (stable, tempered stable, log-concave rejection);
* ``tsfp.undershoot`` -- exact sampling of the stable undershoot law;
* ``tsfp.boundary`` / ``tsfp.first_passage`` -- barriers and the three
  first-passage samplers (stable, tempered, fast tempered);
* ``tsfp.bv`` -- first passage of two-sided bounded-variation processes;
* ``tsfp.applications`` -- barrier-option pricing and fractional-PDE
  Monte Carlo estimators;
* ``tsfp.validation`` -- KS tests, direct-inversion reference samplers and
  the complexity benchmarking harness;
* ``tsfp.service`` / ``tsfp.cli`` -- a FastAPI front end and a thin CLI.
"""

from .params import Precision, QuadratureSpec, StableParams, TemperedParams
from .rng import RngStream, WorkCounters
from .boundary import Boundary
from .first_passage import PassageTriplet, sfp_sample, tsfp_sample, tsffp_sample
from .samplers import sample_stable, sample_tempered_stable
from .undershoot import sample_undershoot

__all__ = [
    "Precision",
    "QuadratureSpec",
    "StableParams",
    "TemperedParams",
    "RngStream",
    "WorkCounters",
    "Boundary",
    "PassageTriplet",
    "sfp_sample",
    "tsfp_sample",
    "tsffp_sample",
    "sample_stable",
    "sample_tempered_stable",
    "sample_undershoot",
]

__version__ = "0.1.0"
