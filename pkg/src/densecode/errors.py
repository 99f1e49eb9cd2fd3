"""Exception hierarchy shared across the toolkit."""


class DensecodeError(Exception):
    """Base class for all toolkit errors."""


class SizeLimitError(DensecodeError):
    """A requested object exceeds the configured dense-storage caps."""


class LayoutError(DensecodeError):
    """Slot indices or subsystem dimensions are inconsistent."""


class NumericalError(DensecodeError):
    """A numerical contract was violated (non-Hermitian input, bad spectrum, ...)."""


class ProbabilityError(DensecodeError):
    """A probability vector or tensor fails nonnegativity/normalization."""


class ParameterError(DensecodeError):
    """A scalar parameter is outside its admissible range."""


class ChannelError(DensecodeError):
    """A channel specification is invalid (e.g. Kraus completeness violated)."""


class NonCovariantChannelError(DensecodeError):
    """Covariance certification failed for a channel passed to a capacity routine."""


class OptimizerDivergedError(DensecodeError):
    """No optimizer restart produced a converged result."""
