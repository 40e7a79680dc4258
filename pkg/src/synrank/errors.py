"""Exception types shared across the package."""


class SynrankError(Exception):
    """Base class for all package-specific errors."""


class ParseError(SynrankError):
    """Malformed input file. Carries the 1-based line number when known."""

    def __init__(self, message, line=None, path=None):
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}:"
        if line is not None:
            where += f"{line}: "
        super().__init__(f"{where}{message}")


class EmptyCorpus(SynrankError):
    """A corpus source yielded no documents."""


class DuplicateDocId(SynrankError):
    """The same document id occurred twice in one corpus."""


class IncompatibleIndexes(SynrankError):
    """Attempted to merge indexes built with different settings."""


class FormatVersionMismatch(SynrankError):
    """A serialized artifact has an unknown magic, version, or layout."""


class DimensionMismatch(SynrankError):
    """An embedding row does not match the declared dimension."""


class DegenerateLabels(SynrankError):
    """Training data is missing a label class."""


class TooFewQueries(SynrankError):
    """Fewer ranking queries than the training method requires."""


class TooFewTargets(SynrankError):
    """Fewer targets than requested cross-validation folds."""


class EmptyEval(SynrankError):
    """An evaluation was run with no trials."""


class NoRelevant(SynrankError):
    """A ranked list contains no relevant item."""


class UnknownTarget(SynrankError):
    """Requested target term is not in the loaded rankings."""


class UnknownPair(SynrankError):
    """Requested (target, candidate) pair is not in the loaded rankings."""


class RevisionConflict(SynrankError):
    """A write carried a stale store revision."""

    def __init__(self, expected, current):
        self.expected = expected
        self.current = current
        super().__init__(
            f"stale revision {expected}, store is at {current}; refetch and retry"
        )


class NotLoaded(SynrankError):
    """The curation store has no rankings loaded."""


class MissingInput(SynrankError):
    """A pipeline command's input artifact does not exist."""


class ConfigError(SynrankError):
    """The pipeline configuration is invalid."""
