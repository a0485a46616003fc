"""Symbolic dynamics toolkit: shift languages, entropy and pressure, Markov and
empirical measures, specification checks and the beta transformation."""

__version__ = "0.1.0"

from .errors import (ArgumentError, ConfigError, ConsistencyError, ConstructionError, InsufficientDataError,
                     ResourceError, SymdynError)
from .language import Language, OrbitCollection, enumerate_language
from .models import (BetaModel, SFTModel, SGapModel, SoficModel, beta_membership, even_shift, full_shift,
                     golden_mean, sft_from_matrix)

__all__ = [
    "ArgumentError", "ConfigError", "ConsistencyError", "ConstructionError", "InsufficientDataError",
    "ResourceError", "SymdynError", "Language", "OrbitCollection", "enumerate_language", "BetaModel", "SFTModel",
    "SGapModel", "SoficModel", "beta_membership", "even_shift", "full_shift", "golden_mean", "sft_from_matrix",
]
