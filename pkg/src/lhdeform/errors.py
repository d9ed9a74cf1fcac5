"""Exception types shared across the package."""


class LhdeformError(Exception):
    """Base class for package errors."""


class DomainError(LhdeformError):
    """Evaluation at a point outside a function's chart, or non-finite input."""


class RangeOverflowError(LhdeformError):
    """Argument of exp/sh/ch past the overflow guard (|x| > 700)."""


class SingularFormError(LhdeformError):
    """Symplectic density vanishing (|W| at or below the domain margin)."""


class BranchError(LhdeformError):
    """Point on the wrong half-plane for the selected chart-map branch."""


class CoeffParseError(LhdeformError):
    """Syntax error in a coefficient expression.

    `offset` is the byte offset of the offending token in the source string.
    """

    def __init__(self, message, offset):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


class CoeffEvalError(LhdeformError):
    """Failure while evaluating a coefficient expression.

    `location` is the byte offset of the subexpression at fault.
    """

    def __init__(self, message, location=None):
        super().__init__(message)
        self.location = location


class StiffnessError(LhdeformError):
    """Step size underflow during adaptive integration.

    The partial trajectory accumulated so far is attached as `trajectory`.
    """

    def __init__(self, message, trajectory=None):
        super().__init__(message)
        self.trajectory = trajectory


class ConfigError(LhdeformError):
    """Invalid run configuration.  `errors` lists every problem found."""

    def __init__(self, errors):
        super().__init__("; ".join(errors))
        self.errors = list(errors)
