"""Numerical solver and verification harness for p-Laplacian diffusion with a
nonlocal source, gradient absorption/source, reaction and absorption terms."""

from .model import Interval, ProblemParams, RadialBall, classify_regime, validate
from .kernels import BACKEND

__all__ = ["BACKEND", "Interval", "ProblemParams", "RadialBall", "classify_regime", "validate"]
__version__ = "0.1.0"
