"""Exception types shared across the library.

Every error raised on purpose derives from AlgebraError, so callers (and the
command line driver) can tell deliberate rejections from genuine bugs.
"""


class AlgebraError(Exception):
    """Base class for all deliberate errors raised by this package."""


class MixedBackends(AlgebraError):
    """Two operands belong to different coefficient field backends."""


class DivisionByZero(AlgebraError, ZeroDivisionError):
    """Division (or inversion) of a zero element or polynomial."""


class CapabilityError(AlgebraError):
    """The backend cannot perform the requested operation exactly.

    Typical case: inverse Frobenius over plain F_q(T), which is not
    perfect; or a deterministic subfield embedding that would require
    searching a field too large to enumerate.
    """


class DomainError(AlgebraError, ValueError):
    """Input is well-formed but outside the operation's domain."""


class NotAMorphismInto(DomainError):
    """The given matrix does not map the domain into the codomain."""


class NotASubvariety(DomainError):
    """The claimed inclusion of varieties does not hold."""


class NotASubmodule(DomainError):
    """The subvariety is not stable under the module action."""


class NoSplittingFound(CapabilityError):
    """No extension within the search cap contains the requested kernel."""


class InsufficientPrimes(DomainError):
    """The torsion-majority rank vote produced no majority."""


class ParseError(AlgebraError):
    """Script text rejected, with a 1-based position and expectation."""

    def __init__(self, message, line=None, col=None):
        self.message = message
        self.line = line
        self.col = col
        if line is not None:
            message = f"line {line}, col {col}: {message}"
        super().__init__(message)
