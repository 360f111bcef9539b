"""Exception types raised by the engine."""


class OrbcalcError(ValueError):
    """Base class for every domain error."""


class InvalidWeight(OrbcalcError):
    pass


# handle assembly
class MismatchedWeight(OrbcalcError):
    pass


class Disconnected(OrbcalcError):
    pass


class InvalidVertex(OrbcalcError):
    pass


class SiteConflict(OrbcalcError):
    """A puncture slot is used by more than one weighted 1-handle end, or does not exist."""


# decompositions
class InvalidDecomposition(OrbcalcError):
    pass


class BadScale(OrbcalcError):
    pass


class NotASphere(OrbcalcError):
    pass


class TooManyPunctures(OrbcalcError):
    pass


class InvalidCap(OrbcalcError):
    """Capping a scar would create a vertex with nonnegative characteristic."""


# moves
class MoveError(OrbcalcError):
    pass


class WouldIncreaseNetX(MoveError):
    pass


class UnknownSurface(MoveError):
    pass


class MissingPunctures(MoveError):
    pass


class NotAProduct(MoveError):
    pass


class BoundaryMismatch(MoveError):
    pass


class IdentityViolated(MoveError):
    pass


class AcyclicityBroken(MoveError):
    pass


class NotAGhostArc(MoveError):
    pass


class NotAmalgable(MoveError):
    pass


class NotAdjacent(MoveError):
    pass


class NoWitness(MoveError):
    """The handle structures carry no configuration realising the requested move."""


class ReplayMismatch(MoveError):
    pass


# bounds and examples
class HypothesisFailed(OrbcalcError):
    pass


class NoDegeneration(OrbcalcError):
    pass


class UnknownExample(OrbcalcError):
    pass


class SchemaError(OrbcalcError):
    """A file does not match the strict on-disk format."""
