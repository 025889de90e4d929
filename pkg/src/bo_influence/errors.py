"""Exception hierarchy.

Errors split into two families so the CLI can map them to exit codes:
``ValidationError`` (bad input, exit 1) and ``ComputationError`` (a
computation that cannot proceed, exit 2).
"""


class InfluenceError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(InfluenceError):
    pass


class ComputationError(InfluenceError):
    pass


# dataset
class ParseError(ValidationError):
    pass


class ConflictingLabel(ValidationError):
    pass


class EmptyDataset(ValidationError):
    pass


class NonBinaryResponse(ValidationError):
    pass


class InsufficientClassMass(ValidationError):
    pass


class NotABijection(ValidationError):
    pass


# partition
class NotAPartition(ValidationError):
    pass


class UnknownFeature(ValidationError):
    pass


class InvalidDependency(ValidationError):
    pass


class NegativeSignOnNonBinary(ValidationError):
    pass


class LengthMismatch(ValidationError):
    pass


class NonBinaryColumn(ValidationError):
    pass


class NonBinaryFeature(ValidationError):
    pass


class BadClusterCount(ValidationError):
    pass


# games
class InvalidGame(ValidationError):
    pass


class NonBinary(ValidationError):
    pass


class IncompleteCoverage(ValidationError):
    pass


class NonZeroEmpty(ValidationError):
    pass


class EnumerationBoundExceeded(ComputationError):
    pass


# influence
class ConstantVector(ComputationError):
    pass


class PreconditionUnmet(ValidationError):
    pass


class FeatureSetMismatch(ValidationError):
    pass


class SelfTestFailure(InfluenceError):
    pass
