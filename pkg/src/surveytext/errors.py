"""Error taxonomy shared by the library and the command line front end.

The split mirrors the process exit codes: configuration problems (1),
malformed or inconsistent input data (2), and computations that cannot
produce a defined result (3).
"""


class SurveyTextError(Exception):
    """Base class for all library errors."""


class ConfigError(SurveyTextError):
    """Invalid configuration or unusable run setup."""

    exit_code = 1


class DataError(SurveyTextError):
    """Malformed, inconsistent or out-of-contract input data."""

    exit_code = 2


class ComputationError(SurveyTextError):
    """A computation whose result is undefined for the given input."""

    exit_code = 3
