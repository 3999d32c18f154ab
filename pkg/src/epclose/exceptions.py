"""Exception hierarchy shared by the mining, ingestion and evaluation code."""


class EPCloseError(Exception):
    """Base class for all errors raised by this package."""


class InvalidDatasetError(EPCloseError, ValueError):
    """A dataset pair is unusable, e.g. one side has no transactions."""


class NoSupportError(EPCloseError, ValueError):
    """A pattern is contained in no transaction of the dataset."""


class IngestError(EPCloseError, ValueError):
    """An input file could not be parsed under its schema.

    ``rows`` carries the 1-based line numbers of the offending records, when
    they are known.
    """

    def __init__(self, message, rows=()):
        super().__init__(message)
        self.rows = tuple(rows)


class LabelingError(EPCloseError, ValueError):
    """A target transaction needed for evaluation has no label."""


class ConsistencyError(EPCloseError, RuntimeError):
    """Two independently computed quantities that must agree did not."""


class OracleGuardError(EPCloseError, ValueError):
    """The brute-force enumerator refused an instance that is too large."""
