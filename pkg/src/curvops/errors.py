"""Exception hierarchy shared by all curvops modules."""


class CurvopsError(Exception):
    """Base class for all errors raised by this package."""


class ModeMismatch(CurvopsError):
    """Operands live in different operad flavours (planar vs symmetric)."""


class PositionError(CurvopsError):
    """A composition slot or leaf index is out of range."""


class UnknownGenerator(CurvopsError):
    """An expression mentions a generator absent from the presentation."""


class DegreeError(CurvopsError):
    """An element or map violates degree homogeneity."""


class NameCollision(CurvopsError):
    """Two generators in one presentation share a name."""


class TruncationExceeded(CurvopsError):
    """An operation needs generators above the recorded arity bound."""


class NonMixedDifferential(CurvopsError):
    """A differential has a weight component other than 0 or 1."""


class NotClosed(CurvopsError):
    """A solver input fails its closedness precondition."""


class NotSolvable(CurvopsError):
    """A bracket-peeling problem has inconsistent slot components."""


class NotInImage(CurvopsError):
    """A solver input is not a boundary (or a nonzero weight-0 cycle)."""


class ConsistencyFailure(CurvopsError):
    """A verified identity failed during an inductive construction."""


class ImageEscapesSlice(CurvopsError):
    """A linear map produced a basis tree outside the declared codomain slice."""


class NotAComplex(CurvopsError):
    """Two matrices fed to a homology computation do not compose to zero."""


class NilpotencyExceeded(CurvopsError):
    """A twisting sum needs composites beyond the declared nilpotency bound."""


class ParseError(CurvopsError):
    """An expression or manifest fails to parse."""
