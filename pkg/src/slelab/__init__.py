"""slelab: Monte Carlo laboratory for SLE return estimates, Brownian excursion
measures and crosscut inequalities in planar domains."""

__version__ = "0.1.0"

from .geometry import CircleSpec, PolylineCurve  # noqa: E402,F401
from .rng import RngStream  # noqa: E402,F401
