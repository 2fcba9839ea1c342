"""Exception types shared across the package."""


class L1RecError(Exception):
    """Base class for all package errors."""


class NoConvergence(L1RecError):
    """Adaptive fitting hit its degree cap without coefficient tail decay."""


class SubdivisionLimit(L1RecError):
    """Rootfinding exceeded its subdivision budget."""


class TooLarge(L1RecError):
    """A brute-force enumeration guard was violated."""


class NotFound(L1RecError):
    """An enumeration finished without a feasible answer."""


class DomainError(L1RecError):
    """An input is outside the mathematical domain of an operation."""


class ParseError(L1RecError):
    """Expression text failed to parse.

    Attributes:
        position: 0-based index into the source text where parsing failed.
    """

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class CertificateUnavailable(L1RecError):
    """A dual certificate was requested for a non-optimal LP solution."""


class StepFailure(L1RecError):
    """Newton step halving was exhausted without an acceptable step."""


class ExchangeStalled(L1RecError):
    """The minimax exchange iteration failed to make progress."""
