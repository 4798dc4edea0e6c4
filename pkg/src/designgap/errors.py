"""Error types shared across the package.

Validation errors signal bad parameters or inconsistent inputs; budget errors
signal requests that would exceed the configured dense-simulation caps. The
command-line tool maps them to exit codes 1 and 2 respectively.
"""


class ValidationError(ValueError):
    """A parameter or input fails a precondition."""


class BudgetError(RuntimeError):
    """A request exceeds a size cap meant to prevent runaway computation."""
