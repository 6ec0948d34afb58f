"""Drift detectors operating on prediction-bit streams."""

from .base import DriftDetector, Verdict
from .baselines import ADWIN, CUSUM, DDM, EDDM, RDDM, PageHinkley
from .mddm import (
    MDDM,
    Arithmetic,
    Euler,
    Geometric,
    Uniform,
    WeightScheme,
    build_weights,
    compute_epsilon,
    fhddm,
)

__all__ = [
    "ADWIN",
    "Arithmetic",
    "CUSUM",
    "DDM",
    "DriftDetector",
    "EDDM",
    "Euler",
    "Geometric",
    "MDDM",
    "PageHinkley",
    "RDDM",
    "Uniform",
    "Verdict",
    "WeightScheme",
    "build_weights",
    "compute_epsilon",
    "fhddm",
]
