"""Dynamic copulas of reflected Brownian motions and spread analytics.

The package is organized in five modules:

``kernels``
    Gaussian distribution kernels and closed-form Brownian joint laws.
``copulas``
    Closed-form dynamic copula families (reflection, correlated
    reflection, random barrier, patchwork, Gaussian and the Frechet
    bounds), surface grids, axiom checking and empirical copulas.
``spread``
    Survival probabilities of the spread between coupled Brownian
    motions: Gaussian baseline, reflection bound, exponential random
    barriers, and the multi-barrier switching model with its series
    expansion and correlation calibration.
``simulate``
    Path simulators (reflection coupling, multi-barrier switching,
    local correlation, two-factor commodity curves) with deterministic
    substreams, plus exact hitting-time sampling and empirical survival
    curves.
``cli``
    A small command line front end writing CSV artifacts and run
    manifests.
"""

from __future__ import annotations

from .errors import (
    DomainError,
    InfiniteQuantileError,
    NumericalError,
    RangeError,
    ReflcopError,
)

__version__ = "0.1.0"

__all__ = [
    "DomainError",
    "InfiniteQuantileError",
    "NumericalError",
    "RangeError",
    "ReflcopError",
    "__version__",
]
