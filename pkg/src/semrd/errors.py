"""Exception hierarchy shared by every module in the package."""


class SemrdError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatch(SemrdError, ValueError):
    """Operands have incompatible alphabet sizes or shapes."""


class DomainError(SemrdError, ValueError):
    """A scalar argument lies outside its mathematical domain."""


class ZeroMassSymbol(SemrdError):
    """Conditioning on an input symbol x with p_X(x) = 0."""


class ZeroMassOutput(SemrdError):
    """Conditioning on an output symbol y with p_Y(y) = 0."""


class HypothesisViolated(SemrdError):
    """Closed-form operation called outside the doubly symmetric binary family."""


class LengthMismatch(SemrdError, ValueError):
    """Sequence arguments have different lengths."""


class EmptySequence(SemrdError, ValueError):
    """Sequence arguments are empty where at least one position is required."""


class IndexOutOfRange(SemrdError, IndexError):
    """A symbol index falls outside its alphabet."""


class NonfiniteDistortion(SemrdError):
    """Every candidate channel evaluates to an infinite semantic distortion."""


class DegenerateChannel(SemrdError):
    """No code proposal ever had a finite selection score."""


class IndexBeyondTruncation(SemrdError, IndexError):
    """Decoder asked for a proposal index past the truncation cap."""
