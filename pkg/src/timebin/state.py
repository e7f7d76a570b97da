"""State vectors over a Fock basis and time series of them.

A trajectory is the common currency between the device emulation, the exact
propagator, and the analysis layer: an ordered list of tagged snapshots that
all share one basis.  Emulated snapshots carry (iteration, cycle, pass)
provenance so intermediate device states can be inspected; exact snapshots
carry only a time tag.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .fock import FockBasis

__all__ = ["StateVector", "Snapshot", "Trajectory", "fock_state"]


class StateVector:
    """Complex amplitudes over a :class:`FockBasis`."""

    def __init__(self, basis: FockBasis, amplitudes: np.ndarray, copy: bool = True):
        amps = np.array(amplitudes, dtype=np.complex128, copy=copy)
        if amps.shape != (basis.dim,):
            raise ValueError(
                f"amplitude shape {amps.shape} does not match basis dim {basis.dim}"
            )
        self.basis = basis
        self.amplitudes = amps

    def copy(self) -> "StateVector":
        return StateVector(self.basis, self.amplitudes, copy=True)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "StateVector":
        nrm = self.norm()
        if nrm == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return StateVector(self.basis, self.amplitudes / nrm, copy=False)

    def inner(self, other: "StateVector") -> complex:
        """<self|other>."""
        if other.basis.dim != self.basis.dim:
            raise ValueError("states live on different bases")
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def occupations(self) -> np.ndarray:
        """Expected boson count per bin."""
        weights = np.abs(self.amplitudes) ** 2
        return weights @ self.basis.occupancy_matrix()

    def total_bosons(self) -> float:
        return float(self.occupations().sum())


def fock_state(basis: FockBasis, placements: Sequence) -> StateVector:
    """Basis state from an occupancy vector or a list of (bin, count) pairs."""
    if placements and isinstance(placements[0], (tuple, list)):
        occ = [0] * basis.num_sites
        for bin_idx, count in placements:
            if not 0 <= bin_idx < basis.num_sites:
                raise ValueError(f"bin {bin_idx} out of range 0..{basis.num_sites - 1}")
            occ[bin_idx] += int(count)
    else:
        occ = list(placements)
    amps = np.zeros(basis.dim, dtype=np.complex128)
    amps[basis.index_of(occ).index] = 1.0
    return StateVector(basis, amps, copy=False)


@dataclass(frozen=True)
class Snapshot:
    """One tagged state along a trajectory.

    ``cycle`` and ``pass_index`` are -1 for iteration-boundary snapshots and
    for exact-evolution snapshots, which have no device substructure.
    """

    time: float
    iteration: int
    cycle: int
    pass_index: int
    state: StateVector


class Trajectory:
    """Ordered snapshots sharing one basis; provenance is 'emulated' or 'exact'."""

    def __init__(self, provenance: str, snapshots: Sequence[Snapshot]):
        if provenance not in ("emulated", "exact"):
            raise ValueError(f"unknown provenance {provenance!r}")
        snaps = tuple(snapshots)
        if not snaps:
            raise ValueError("a trajectory needs at least one snapshot")
        times = [s.time for s in snaps]
        if any(t1 <= t0 for t0, t1 in zip(times, times[1:])):
            raise ValueError("snapshot time tags must be strictly increasing")
        basis = snaps[0].state.basis
        if any(s.state.basis.dim != basis.dim for s in snaps):
            raise ValueError("all snapshots must share one basis")
        self.provenance = provenance
        self.snapshots = snaps
        self.basis = basis

    def __len__(self) -> int:
        return len(self.snapshots)

    def times(self) -> np.ndarray:
        return np.array([s.time for s in self.snapshots])

    def occupations(self) -> np.ndarray:
        """(num_snapshots, num_bins) expected boson counts."""
        return np.array([s.state.occupations() for s in self.snapshots])

    def boundary_snapshots(self) -> list[Snapshot]:
        """Snapshots taken at iteration boundaries (plus the initial state)."""
        return [s for s in self.snapshots if s.cycle == -1]

    def export_table(self) -> str:
        """CSV text: one row per snapshot with occupations per bin.

        Columns: ``iteration,cycle,pass,bin_0..bin_{B-1}``; ``cycle`` and
        ``pass`` are -1 on iteration-boundary rows.
        """
        bins = self.basis.num_sites
        header = "iteration,cycle,pass," + ",".join(f"bin_{i}" for i in range(bins))
        rows = [header]
        for snap in self.snapshots:
            occ = snap.state.occupations()
            values = ",".join(f"{x:.12g}" for x in occ)
            rows.append(f"{snap.iteration},{snap.cycle},{snap.pass_index},{values}")
        return "\n".join(rows) + "\n"

    def export_amplitudes(self) -> str:
        """CSV text of raw amplitudes: ``snapshot,index,re,im`` per basis state."""
        rows = ["snapshot,index,re,im"]
        for k, snap in enumerate(self.snapshots):
            for g, amp in enumerate(snap.state.amplitudes):
                rows.append(f"{k},{g},{amp.real:.17g},{amp.imag:.17g}")
        return "\n".join(rows) + "\n"
