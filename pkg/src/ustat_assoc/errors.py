"""Exception types raised across the package."""


class InvalidArgumentError(ValueError):
    """An argument violates an operation's precondition."""


class UnsupportedOperationError(NotImplementedError):
    """The requested combination of inputs has no implementation."""


class ResourceLimitError(RuntimeError):
    """The computation would exceed a fixed size budget."""


class RequiresOracleError(LookupError):
    """A true long-run scale is unknown for the scheme.

    Pass ``two_sigma_u`` explicitly, or estimate it with
    :func:`ustat_assoc.montecarlo.long_run_two_sigma_u`.
    """
