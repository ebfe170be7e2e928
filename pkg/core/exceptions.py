class EntropyToolkitError(ValueError):
    """Base class for every domain error raised by the toolkit."""


class DimensionError(EntropyToolkitError):
    """Matrix widths, vector lengths or partitions do not line up."""


class ParameterError(EntropyToolkitError):
    """Illegal code-construction or sampling parameters."""


class WeightError(EntropyToolkitError):
    """A column is too heavy to be read as an incidence matrix."""


class OracleSizeError(EntropyToolkitError):
    """The dense oracle was asked for more qubits than it can hold."""


class ClassificationError(EntropyToolkitError):
    """A qubit transfer does not meet the preconditions of the requested regime."""


class CodeFormatError(EntropyToolkitError):
    """Malformed matrix, code, graph or configuration text."""
