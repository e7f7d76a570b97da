"""Simulator and analysis toolkit for a programmable photonic time-bin emulator.

The device stores a train of photon pulses in a fiber loop, one lattice site
per time bin, and programs arbitrary lattice couplings by routing pulses
through a tunable two-mode interferometer via a one-bin register loop.  This
package compiles lattice graphs into the device's pass schedules, simulates
the resulting discrete-time multi-boson dynamics, compares them against exact
continuous-time evolution, and extracts band structures, correlations, and
wavepacket observables.
"""

from .analysis import (
    BandPoint,
    effective_hamiltonian,
    extract_band_structure,
    gaussian_packet,
    occupations_and_correlations,
    single_particle_block,
    wavepacket_stats,
)
from .device import (
    EmulationConfig,
    attach_register,
    diagonal_phase_step,
    iteration_unitary,
    mzi_pass_unitary,
    run_emulation,
    strip_register,
)
from .errors import (
    BranchCutError,
    ConfigError,
    GraphFormatError,
    KrylovError,
    NumericalError,
    ResourceCapError,
    ScheduleError,
    TimebinError,
)
from .exact import exact_propagate, exact_trajectory, fidelity, trotter_error_norm
from .fock import FockBasis, StateIndex, dimension, enumerate_basis
from .lattice import (
    Edge,
    LatticeGraph,
    build_lattice,
    chain,
    grid2d,
    hall_ladder,
    hypercube,
    is_connected,
    load_graph,
    save_graph,
)
from .operators import (
    SparseOperator,
    annihilation_operator,
    build_hamiltonian,
    commutator_norm,
    creation_operator,
    kappa_u_error_operator,
    number_operator,
    spectral_norm,
    total_number_operator,
)
from .schedule import MziSetting, PassSchedule, compile_schedule, dump_schedule
from .state import Snapshot, StateVector, Trajectory, fock_state

__version__ = "0.1.0"

__all__ = [
    "BandPoint",
    "BranchCutError",
    "ConfigError",
    "Edge",
    "EmulationConfig",
    "FockBasis",
    "GraphFormatError",
    "KrylovError",
    "LatticeGraph",
    "MziSetting",
    "NumericalError",
    "PassSchedule",
    "ResourceCapError",
    "ScheduleError",
    "Snapshot",
    "SparseOperator",
    "StateIndex",
    "StateVector",
    "TimebinError",
    "Trajectory",
    "annihilation_operator",
    "attach_register",
    "build_hamiltonian",
    "build_lattice",
    "chain",
    "commutator_norm",
    "compile_schedule",
    "creation_operator",
    "diagonal_phase_step",
    "dimension",
    "dump_schedule",
    "effective_hamiltonian",
    "enumerate_basis",
    "exact_propagate",
    "exact_trajectory",
    "extract_band_structure",
    "fidelity",
    "fock_state",
    "gaussian_packet",
    "grid2d",
    "hall_ladder",
    "hypercube",
    "is_connected",
    "iteration_unitary",
    "kappa_u_error_operator",
    "load_graph",
    "mzi_pass_unitary",
    "number_operator",
    "occupations_and_correlations",
    "run_emulation",
    "save_graph",
    "single_particle_block",
    "spectral_norm",
    "strip_register",
    "total_number_operator",
    "trotter_error_norm",
    "wavepacket_stats",
]
