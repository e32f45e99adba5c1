"""Discrete information-flow models: a two-component lattice automaton,
its dispersion analysis, and Lorentz-like measurements on causal networks."""

__version__ = "0.1.0"

from .errors import (  # noqa: F401
    ArgumentError,
    GeometryError,
    InfoflowError,
    InformationHaltError,
    MeasurementInvalidError,
    StructuralError,
    UndefinedMomentError,
)
from .lattice import (  # noqa: F401
    FieldState,
    LatticeParams,
    MassCoupling,
    WavepacketSpec,
    evolve,
    make_wavepacket,
    step_finite_difference,
    step_massless,
    step_unitary,
)
