"""Exception types shared across the package.

PreconditionError signals a rejected input (CLI exit code 2);
NumericalError signals a computation that failed to converge or
validate (CLI exit code 3).
"""


class PreconditionError(ValueError):
    """An operation was invoked outside its admissible domain."""


class NumericalError(RuntimeError):
    """A numerical procedure failed to reach its accuracy target."""
