class DimensionError(ValueError):
    """Array shapes of set operands do not line up."""


class EmptySetError(ValueError):
    """An operation that needs a nonempty set received an empty one."""


class LPIterationLimitError(RuntimeError):
    """The simplex kernel hit its iteration cap."""


class NoActiveSectorError(RuntimeError):
    """No ring sector intersects the prior set."""


class WindowTooWideError(ValueError):
    """A sector window spans a quarter turn or more; the wedge bound breaks down."""


class FilterInconsistencyError(RuntimeError):
    """A measurement update produced an empty posterior."""


class ConfigError(ValueError):
    """Invalid or incomplete simulation configuration."""
