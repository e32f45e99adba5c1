"""Exception hierarchy shared by the simulator, analysis and CLI layers."""


class InfoflowError(Exception):
    """Base class for every error raised by this package."""


class StructuralError(InfoflowError, ValueError):
    """State and lattice disagree on shape or layout."""


class ArgumentError(InfoflowError, ValueError):
    """An argument is outside its admissible range."""


class UndefinedMomentError(InfoflowError, ArithmeticError):
    """Position moments requested for a state with zero norm."""


class InformationHaltError(InfoflowError, ArithmeticError):
    """Quantity diverges because propagation stops (mu == 1)."""


class MeasurementInvalidError(InfoflowError, RuntimeError):
    """A dynamical measurement was spoiled, e.g. by the packet wrapping."""


class GeometryError(InfoflowError, ValueError):
    """A clock or rod does not fit inside the causal network.

    ``required`` holds the minimal (rows, cols) extent that would fit.
    """

    def __init__(self, message, required=None):
        super().__init__(message)
        self.required = required
