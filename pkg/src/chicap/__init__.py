"""Certified Holevo chi-capacity of classical-quantum channels."""

from .channel import (
    CqChannel,
    Ensemble,
    apply,
    chi_function,
    chi_of_ensemble,
    hhat_function,
    spectral_truncation,
    truncate_channel,
)
from .errors import ChicapError, NotConverged, ValidationError
from .orbit import FourierState, OrbitChannel, discontinuity_demo, fourier_capacity, group_average, orbit_capacity
from .qfamily import FamilyAnalysis, QSequence, classify, F_value
from .solver import CapacityReport, solve_capacity, verify_maximal_distance
from .spectral import (
    decrease_coefficient,
    density,
    relative_entropy,
    trace_distance,
    von_neumann_entropy,
)

__version__ = "0.1.0"
