from click import ClickException

from qclscape.constants import EXIT_DATA, EXIT_NOT_FOUND, EXIT_USAGE


class QclError(ClickException):
    exit_code = EXIT_DATA

    def __init__(self, message, *args):
        super().__init__(message, *args)


class InvalidArgumentError(QclError, ValueError):
    exit_code = EXIT_USAGE

    def __init__(self, name, value, reason, *args):
        message = f"Invalid {name} `{value}`: {reason}."
        super().__init__(message, *args)


class GridTooLargeError(QclError):
    exit_code = EXIT_USAGE

    def __init__(self, size, budget, *args):
        message = (
            f"Grid of {size} points exceeds the in-memory budget of {budget} points, "
            f"stream it to a CSV sink instead."
        )
        super().__init__(message, *args)


class DimensionMismatchError(QclError):
    def __init__(self, expected, actual, *args):
        message = f"Dimension mismatch: expected {expected} parameters, got {actual}."
        super().__init__(message, *args)


class DegenerateInputError(QclError):
    def __init__(self, reason, *args):
        message = f"Degenerate input: {reason}."
        super().__init__(message, *args)


class SchemaValidationError(QclError):
    def __init__(self, field, reason, *args):
        self.field = field
        message = f"Invalid field `{field}`: {reason}."
        super().__init__(message, *args)


class RecordMismatchError(QclError):
    def __init__(self, run, stored, derived, *args):
        message = f"Run {run} stores fidelity {stored!r} but its amplitudes give {derived!r}."
        super().__init__(message, *args)


class MissingForwardCacheError(QclError):
    def __init__(self, *args):
        message = "Backward pass requested before a forward pass was cached."
        super().__init__(message, *args)


class EpisodeFinishedError(QclError):
    def __init__(self, *args):
        message = "The episode is finished, reset the environment before stepping."
        super().__init__(message, *args)


class SpeedLimitNotFoundError(QclError):
    exit_code = EXIT_NOT_FOUND

    def __init__(self, max_time, threshold, *args):
        message = f"No scanned time up to {max_time:g} reached fidelity {threshold:g}."
        super().__init__(message, *args)
