"""Bayesian localisation of a continuous release from binary sensor readings."""

from binloc.dispersion import Environment, ParameterVector
from binloc.errors import (
    BinlocError,
    DegeneratePosteriorError,
    DomainError,
    ModelValidityError,
    SamplingError,
    ValidationError,
)
from binloc.geometry import Disc, Point, Polygon, PriorRegion
from binloc.inference import WeightedEnsemble, importance_sample, resample, summarize
from binloc.measurement import Reading, ReadingSet
from binloc.prior import PriorSpec
from binloc.rng import random_stream

__all__ = [
    "BinlocError",
    "DegeneratePosteriorError",
    "Disc",
    "DomainError",
    "Environment",
    "ModelValidityError",
    "ParameterVector",
    "Point",
    "Polygon",
    "PriorRegion",
    "PriorSpec",
    "Reading",
    "ReadingSet",
    "SamplingError",
    "ValidationError",
    "WeightedEnsemble",
    "importance_sample",
    "random_stream",
    "resample",
    "summarize",
]

__version__ = "0.1.0"
