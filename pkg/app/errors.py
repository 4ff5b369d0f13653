"""
Exception types shared by the math modules, the services and the CLI.
The CLI maps them to exit codes (see app/main.py).
"""


class StaircaseError(Exception):
    """Base class for all library errors."""


class InputError(StaircaseError, ValueError):
    """Input outside an operation's contract (empty set, f = 0, bad gcd...)."""


class UnsupportedError(StaircaseError):
    """Operation requested for an order or arity it does not support."""


class WitnessInsufficientError(StaircaseError):
    """The supplied witness does not reach sqrt(2 vol(P))."""


class VerificationError(StaircaseError):
    """A verification clause failed."""

    def __init__(self, clause: str, detail: str = ""):
        self.clause = clause
        self.detail = detail
        message = f"verification failed: {clause}"
        if detail:
            message += f" ({detail})"
        super().__init__(message)
