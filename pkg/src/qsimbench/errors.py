"""Exception hierarchy shared by all qsimbench modules."""


class QsimError(Exception):
    """Base class for every error raised by this package."""


class QubitCountOutOfRange(QsimError):
    """Requested qubit count outside the supported range."""


class MemoryBudgetExceeded(QsimError):
    """State-vector allocation would exceed the configured memory budget."""


class QubitIndexOutOfRange(QsimError):
    """Gate references a qubit index >= n (or negative)."""


class DuplicateQubit(QsimError):
    """Gate references the same qubit more than once."""


class MissingParameter(QsimError):
    """Parameterized gate requested without its angle."""


class UnknownGateKind(QsimError):
    """Gate kind not in the supported set."""


class DenseCapExceeded(QsimError):
    """Dense operator requested above the qubit cap (O(4^n) blow-up)."""


class NonPositiveMachineParameter(QsimError):
    """Peak compute or peak bandwidth must be > 0."""


class AllocationFailure(QsimError):
    """Probe buffers could not be allocated."""


class TimerResolutionTooCoarse(QsimError):
    """Measured interval too short for the timer's resolution."""


class MissingQubitCount(QsimError):
    """Analysis input does not cover the required qubit counts."""


class EmptySeries(QsimError):
    """Plot requested with no data series."""


class NonPositiveLogValue(QsimError):
    """Log-scale plot received a value <= 0."""
