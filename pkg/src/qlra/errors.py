"""Exception hierarchy shared by every qlra module."""


class QLRAError(Exception):
    """Base class for all errors raised by qlra."""


class ModelError(QLRAError, ValueError):
    """Malformed or inconsistent input data (shapes, labels, missing fields)."""


class DegenerateContext(QLRAError, ZeroDivisionError):
    """A probability that must be strictly positive is zero."""


# Name used for the lambda-coefficient denominator failure.
ZeroDenominator = DegenerateContext


class ZeroConditioning(DegenerateContext):
    """Conditioning on an event of probability zero."""


class NonTrigonometricContext(QLRAError, ValueError):
    """A normalized interference coefficient falls outside [-1, 1]."""


# Continuous-module spelling.
NonTrigonometric = NonTrigonometricContext


class SymmetricConditioningRequired(QLRAError, ValueError):
    """The construction needs P(b|a) = P(a|b) and the data does not satisfy it."""


class ConstraintViolated(QLRAError, ValueError):
    """The angle constraint between two QLRA pairs does not hold."""


class OracleFailure(QLRAError, RuntimeError):
    """A user supplied probability oracle raised or returned unusable output."""


class EmbeddingError(ModelError):
    """Auxiliary transition densities do not reproduce the contextual densities."""
