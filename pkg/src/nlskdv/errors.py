"""Exception hierarchy shared by every module of the package."""


class NlsKdvError(Exception):
    """Base class for all errors raised by nlskdv."""


class ArgumentError(NlsKdvError, ValueError):
    """Malformed or mismatched input (lengths, grids, spacings)."""


class UnsupportedError(NlsKdvError, ValueError):
    """A requested option exists in principle but is not implemented."""


class DegenerateInputError(NlsKdvError, ValueError):
    """Input makes a ratio or normalisation meaningless (e.g. zero denominator)."""


class DivergentInputError(NlsKdvError, ValueError):
    """Exponents at or below the convergence threshold of an integral or series."""


class PreconditionError(NlsKdvError, ValueError):
    """Parameters outside the region where an estimate is asserted."""


class BlowUpError(NlsKdvError, RuntimeError):
    """Non-finite or runaway values during time integration.

    ``time`` is the simulation time of the offending step and ``partial``
    carries whatever diagnostics were collected before the failure.
    """

    def __init__(self, message, time, partial=None):
        super().__init__(message)
        self.time = time
        self.partial = partial


class NoContractionError(NlsKdvError, RuntimeError):
    """Picard iteration distances grew for several consecutive iterates."""

    def __init__(self, message, report):
        super().__init__(message)
        self.report = report


class ConfigError(NlsKdvError):
    """Base class for configuration ingestion failures."""


class ConfigMissingError(ConfigError, FileNotFoundError):
    pass


class ConfigParseError(ConfigError, ValueError):
    pass


class UnknownKeyError(ConfigError, KeyError):
    def __init__(self, keys):
        self.keys = sorted(keys)
        super().__init__(f"unknown configuration keys: {', '.join(self.keys)}")

    def __str__(self):
        return self.args[0]


class ConfigValueError(ConfigError, ValueError):
    pass
