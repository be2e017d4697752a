class UsageError(ValueError):
    """A caller broke an operation's precondition."""


class DatasetError(Exception):
    """A dataset document does not conform to the schema."""


class DegenerateDataError(ValueError):
    """Statistics are undefined for the given data (zero variance, one class, ...)."""
