"""Steady-state entanglement and entropy production of driven-dissipative two-qubit machines."""

from .concurrence import TwoQubitState, concurrence, concurrence_x, spin_flip
from .diamond import (
    DiamondSpec,
    analytic_concurrence,
    betas_from_rates,
    build_diamond,
    collective_ops,
    concurrence_vs_numeric,
    rates_from_betas,
)
from .lindblad import LindbladChannel, OpenSystem, SteadyState, apply_liouvillian, steady_state, superoperator
from .thermo import ThermoReport, entropy_rate, heat_current
from .cavity import CavitySpec, adiabatic_map, build_tavis_cummings, converged_steady_state, qubits_reduced_state

__version__ = "0.1.0"
