"""Exception types shared across the package."""


class SynthGraphError(Exception):
    """Base class for all package errors."""


class InputError(SynthGraphError, ValueError):
    """Invalid argument: out-of-range node id, unknown task, empty training set, ..."""


class UndefinedMetricError(SynthGraphError, ValueError):
    """A metric is not defined for the given input (e.g. a graph without edges)."""


class DegenerateDistributionError(UndefinedMetricError):
    """Class degree mass is concentrated on a single class, so a normalizer is zero."""


class ZeroEntropyError(UndefinedMetricError):
    """The discretized feature is constant, so its entropy is zero."""


class AmbiguousLabelError(SynthGraphError, ValueError):
    """phi has more than one optimum and refuses to break the tie."""


class GenerationError(SynthGraphError, RuntimeError):
    """A generator could not satisfy a task constraint."""


class UnsupportedTaskError(InputError):
    """The operation has no rule for this task id."""


class DatasetFormatError(SynthGraphError, ValueError):
    """A dataset directory is corrupt or has an unsupported format."""

    def __init__(self, message: str, path=None, line: int | None = None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}"
            if line is not None:
                where += f":{line}"
            where += ": "
        super().__init__(where + message)
