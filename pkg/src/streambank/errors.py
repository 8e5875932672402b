"""Exception taxonomy. Exit codes follow the CLI contract: 2 for
configuration/usage problems, 3 for data or format problems, 4 for
numerical failures."""


class StreambankError(Exception):
    exit_code = 1


class ConfigError(StreambankError):
    """Invalid parameters, invalid flag combinations, misuse of an API."""

    exit_code = 2


class DataError(StreambankError):
    """Bad input data: non-finite values, malformed files, inconsistencies."""

    exit_code = 3


class ShapeError(DataError):
    """Dimension mismatch between arrays."""


class NumericalError(StreambankError):
    """A numerical routine failed (e.g. SVD non-convergence)."""

    exit_code = 4
