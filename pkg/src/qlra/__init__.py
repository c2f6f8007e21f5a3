"""Hilbert-space representations reconstructed from contextual probability data."""
__version__ = "0.1.0"

from .binary import represent
from .contextual import (
    BinaryObservable,
    ContextualDistribution,
    ContextualModel,
    TransitionMatrix,
    validate_model,
)
from .continuous import Grid, ContinuousModel, recover_phase_field, synthesize_model
from .errors import QLRAError
from .kolmogorov import FiniteSpace, derive_contextual_model
from .triple import represent_triple, spin_representation

__all__ = [
    "__version__",
    "BinaryObservable",
    "ContextualDistribution",
    "ContextualModel",
    "TransitionMatrix",
    "validate_model",
    "represent",
    "represent_triple",
    "spin_representation",
    "Grid",
    "ContinuousModel",
    "synthesize_model",
    "recover_phase_field",
    "FiniteSpace",
    "derive_contextual_model",
    "QLRAError",
]
