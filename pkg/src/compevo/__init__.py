"""Random weak integer compositions: models, patterns, closed forms, oracles."""

from .core import (Composition, EstimateResult, GeometricModel, GuardExceeded,
                   PatternKind, PatternSpec, UniformModel, UnsupportedProperty,
                   composition_size, count_compositions)
from .patterns import (MatchReport, PatternSyntaxError, match, match_consecutive,
                       match_nonconsecutive, match_vincular, parse_pattern)
from .properties import Property
from .rng import RngStream
from .samplers import (evolve_step, sample_bridge, sample_geometric,
                       sample_uniform_bars, sample_uniform_chain)
from .theory import TheoryPrediction, poisson_limit, threshold_location

__version__ = "0.1.0"

__all__ = [
    "Composition", "EstimateResult", "GeometricModel", "GuardExceeded",
    "MatchReport", "PatternKind", "PatternSpec", "PatternSyntaxError",
    "Property", "RngStream", "TheoryPrediction", "UniformModel",
    "UnsupportedProperty", "composition_size", "count_compositions",
    "evolve_step", "match", "match_consecutive", "match_nonconsecutive",
    "match_vincular", "parse_pattern", "poisson_limit", "sample_bridge",
    "sample_geometric", "sample_uniform_bars", "sample_uniform_chain",
    "threshold_location",
]
