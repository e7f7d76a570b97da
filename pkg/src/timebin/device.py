"""Simulates the emulator hardware: interferometer passes over time bins.

Two execution modes share one algebra.  Tick mode plays back a compiled pass
schedule literally, routing amplitudes through the register bin exactly as the
physical device would (the register is bin index ``L``, appended after the
storage bins).  Fast mode skips the register bookkeeping and applies the
composed two-bin coupling per edge directly; the swap/interact/swap sandwich
makes the two algebraically identical on register-empty states, which the
test suite checks to near machine precision.

Interleaved with the passes, the per-boson energy ``mu`` and the on-site
pairing energy ``U`` advance the state by a diagonal phase, by default once
per iteration with a unit time step.

No global matrices are materialized during a run; every pass is applied as a
vectorized gather/rotate/scatter on the amplitude array.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fock import FockBasis
from .operators import (
    SparseOperator,
    apply_two_mode,
    diagonal_energies,
    two_mode_unitary,
)
from .schedule import INTERACT, PassSchedule
from .state import Snapshot, StateVector, Trajectory

__all__ = [
    "EmulationConfig",
    "mzi_pass_unitary",
    "diagonal_phase_step",
    "run_emulation",
    "iteration_unitary",
    "attach_register",
    "strip_register",
]

NORM_TOL = 1e-6


@dataclass(frozen=True)
class EmulationConfig:
    """Run parameters for :func:`run_emulation`.

    ``diagonal_placement`` selects whether the mu/U phase advances once per
    iteration (dt = 1, the default) or after every clock cycle (dt = 1/|E|),
    which is useful for studying placement sensitivity.
    """

    mu: float = 0.0
    U: float = 0.0
    iterations: int = 0
    mode: str = "tick"
    snapshot_policy: str = "per-iteration"
    diagonal_placement: str = "per-iteration"

    def __post_init__(self):
        if self.iterations < 0:
            raise ValueError(f"iterations must be >= 0, got {self.iterations}")
        if self.mode not in ("tick", "fast"):
            raise ValueError(f"mode must be 'tick' or 'fast', got {self.mode!r}")
        if self.snapshot_policy not in ("per-pass", "per-cycle", "per-iteration"):
            raise ValueError(f"unknown snapshot_policy {self.snapshot_policy!r}")
        if self.diagonal_placement not in ("per-iteration", "per-cycle"):
            raise ValueError(f"unknown diagonal_placement {self.diagonal_placement!r}")
        if not (np.isfinite(self.mu) and np.isfinite(self.U)):
            raise ValueError("mu and U must be finite")


def mzi_pass_unitary(
    basis: FockBasis, bin_a: int, bin_b: int, theta: float, phi: float
) -> SparseOperator:
    """Two-bin interferometer unitary on the full occupancy basis.

    ``exp[i (theta/2) (e^{i phi} adag_a a_b + e^{-i phi} adag_b a_a)]``,
    nontrivial only on the joint occupation ladder of the two bins.
    """
    return two_mode_unitary(basis, bin_a, bin_b, theta, phi)


def diagonal_phase_step(
    state: StateVector, mu: float, U: float, dt: float
) -> StateVector:
    """Advance by the diagonal part: each basis state gains a pure phase.

    The phase of state ``|k_1 ... k_L>`` is
    ``exp[-i dt sum_m (mu k_m + U k_m (k_m - 1))]``; occupation probabilities
    are untouched and the norm is preserved exactly.
    """
    energies = diagonal_energies(state.basis, mu, U)
    return StateVector(
        state.basis, state.amplitudes * np.exp(-1j * dt * energies), copy=False
    )


def attach_register(state: StateVector) -> StateVector:
    """Embed an L-bin state into the (L+1)-bin tick basis with an empty register."""
    basis = state.basis
    work = FockBasis(basis.num_sites + 1, basis.max_bosons)
    mapping = _register_empty_indices(work)
    amps = np.zeros(work.dim, dtype=np.complex128)
    amps[mapping] = state.amplitudes
    return StateVector(work, amps, copy=False)


def strip_register(state: StateVector) -> StateVector:
    """Project an (L+1)-bin state onto the register-empty subspace as an L-bin state.

    Amplitude on register-occupied states is discarded (it should be zero at
    iteration boundaries); the result is not renormalized.
    """
    work = state.basis
    if work.num_sites < 2:
        raise ValueError("state has no storage bins to keep")
    mapping = _register_empty_indices(work)
    small = FockBasis(work.num_sites - 1, work.max_bosons)
    return StateVector(small, state.amplitudes[mapping], copy=True)


def _register_empty_indices(work: FockBasis) -> np.ndarray:
    """Tick-basis indices of register-empty states, in L-bin global-index order.

    Restricted to states with an empty last bin, the label ordering agrees
    with the L-bin ordering: growing the site count shifts every digit of the
    label's combinatorial decomposition by one, which preserves comparisons.
    """
    occs = work.occupancy_matrix()
    return np.nonzero(occs[:, work.num_sites - 1] == 0)[0]


def _check_initial(initial: StateVector) -> None:
    if abs(initial.norm() - 1.0) > NORM_TOL:
        raise ValueError(
            f"initial state norm {initial.norm():.9f} deviates from 1 by more "
            f"than {NORM_TOL}"
        )


def _as_schedule_list(schedule, iterations: int) -> list[PassSchedule]:
    if isinstance(schedule, PassSchedule):
        return [schedule] * iterations
    schedules = list(schedule)
    if len(schedules) < iterations:
        raise ValueError(
            f"{len(schedules)} schedules supplied for {iterations} iterations"
        )
    return schedules[:iterations]


def run_emulation(
    initial: StateVector, schedule, config: EmulationConfig
) -> Trajectory:
    """Evolve a state through repeated iterations of a pass schedule.

    `schedule` is a single :class:`PassSchedule` (repeated every iteration) or
    a sequence of per-iteration schedules, e.g. from a time-dependent phase
    override.  In tick mode the initial state may be given over the L storage
    bins (an empty register is attached) or over L+1 bins with the register
    empty.  Fast mode takes the L-bin state directly.

    Snapshots are tagged ``(iteration, cycle, pass)``; iteration-boundary
    rows use cycle = pass = -1.  Boundary snapshot times are the iteration
    count; intermediate snapshots are spaced fractionally in between.
    """
    if not isinstance(schedule, PassSchedule):
        schedule = list(schedule)
        if not schedule:
            raise ValueError("empty schedule sequence")
    probe = schedule if isinstance(schedule, PassSchedule) else schedule[0]
    schedules = _as_schedule_list(schedule, config.iterations)
    num_bins = probe.num_storage_bins
    if any(s.num_storage_bins != num_bins for s in schedules):
        raise ValueError("all schedules must target the same bin count")
    _check_initial(initial)

    if config.mode == "tick":
        if initial.basis.num_sites == num_bins:
            state = attach_register(initial)
        elif initial.basis.num_sites == num_bins + 1:
            register_occ = initial.occupations()[num_bins]
            if register_occ > NORM_TOL:
                raise ValueError(
                    f"initial register occupation {register_occ:.3g} is not empty"
                )
            state = initial.copy()
        else:
            raise ValueError(
                f"initial state has {initial.basis.num_sites} bins; schedule "
                f"expects {num_bins} storage bins"
            )
        register = num_bins
    else:
        if initial.basis.num_sites != num_bins:
            raise ValueError(
                f"initial state has {initial.basis.num_sites} bins; schedule "
                f"expects {num_bins}"
            )
        state = initial.copy()
        register = None

    basis = state.basis
    amps = state.amplitudes
    energies = diagonal_energies(basis, config.mu, config.U)

    def snapshot(time, iteration, cycle, pass_index):
        snaps.append(
            Snapshot(time, iteration, cycle, pass_index,
                     StateVector(basis, amps, copy=True))
        )

    snaps: list[Snapshot] = []
    snapshot(0.0, 0, -1, -1)

    for it, sched in enumerate(schedules):
        cycles = sched.cycles_per_iteration
        per_pass = config.snapshot_policy == "per-pass"
        per_cycle = config.snapshot_policy == "per-cycle"
        # Group settings by clock cycle so per-cycle hooks can fire.
        by_cycle: list[list] = [[] for _ in range(cycles)]
        if config.mode == "tick":
            for setting in sched.settings:
                cyc = min(setting.tick // num_bins, cycles - 1)
                by_cycle[cyc].append(setting)
        else:
            for setting in sched.settings:
                if setting.role != INTERACT:
                    continue
                cyc = min(setting.tick // num_bins, cycles - 1)
                by_cycle[cyc].append(setting)
        passes_total = sum(len(c) for c in by_cycle)
        done = 0
        for cyc, group in enumerate(by_cycle):
            for p, setting in enumerate(group):
                if setting.role == INTERACT and config.mode == "fast":
                    a, b = setting.edge
                else:
                    a, b = register, sched.storage_bin(setting)
                if setting.theta != 0.0:
                    apply_two_mode(amps, basis, a, b, setting.theta, setting.phi)
                done += 1
                if per_pass:
                    snapshot(it + done / (passes_total + 1), it, cyc, p)
            if config.diagonal_placement == "per-cycle":
                amps *= np.exp(-1j * (1.0 / cycles) * energies)
            if per_cycle:
                snapshot(it + (cyc + 1) / (cycles + 1), it, cyc, len(group) - 1)
        if config.diagonal_placement == "per-iteration":
            amps *= np.exp(-1j * energies)
        snapshot(float(it + 1), it + 1, -1, -1)

    return Trajectory("emulated", snaps)


def iteration_unitary(
    basis: FockBasis, schedule: PassSchedule, mu: float = 0.0, U: float = 0.0
) -> np.ndarray:
    """Dense matrix of one fast-mode iteration: edge couplings then the diagonal step.

    Intended for desk-scale analysis (effective Hamiltonians, error norms);
    the basis covers the storage bins only.
    """
    if basis.num_sites != schedule.num_storage_bins:
        raise ValueError(
            f"basis covers {basis.num_sites} bins; schedule expects "
            f"{schedule.num_storage_bins}"
        )
    matrix = np.eye(basis.dim, dtype=np.complex128)
    for setting in schedule.settings:
        if setting.role != INTERACT or setting.theta == 0.0:
            continue
        a, b = setting.edge
        apply_two_mode(matrix, basis, a, b, setting.theta, setting.phi)
    phases = np.exp(-1j * diagonal_energies(basis, mu, U))
    return phases[:, None] * matrix
