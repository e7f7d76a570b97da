"""Observable extraction: effective Hamiltonians, band structures, correlations.

The band pipeline follows the device's own measurement logic: take one
iteration's unitary, recover the generator through the matrix logarithm,
diagonalize it in real space, and assign each eigenstate a wavenumber by peak
detection on the discrete Fourier transform of its site amplitudes.  States
without a dominant peak (less than the pruning threshold of the spectral
power) are dropped rather than mislabeled.

For real generators the spectrum is doubly degenerate in +-k and numerical
eigenvectors arrive as standing-wave mixtures; those emit both +-k points
with the quality split between them.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.linalg import schur

from .errors import BranchCutError
from .fock import FockBasis
from .operators import SparseOperator
from .state import StateVector, Trajectory

__all__ = [
    "BandPoint",
    "effective_hamiltonian",
    "single_particle_block",
    "extract_band_structure",
    "occupations_and_correlations",
    "wavepacket_stats",
    "WavepacketStats",
    "gaussian_packet",
    "format_band_table",
    "format_correlation_table",
]

UNITARY_TOL = 1e-8
BRANCH_GUARD = 1e-6
MIRROR_PARTNER_RATIO = 0.1


def effective_hamiltonian(unitary: np.ndarray, branch_guard: float = BRANCH_GUARD) -> np.ndarray:
    """Hermitian generator ``H`` with ``exp(-i H) = G`` and spectrum in (-pi, pi).

    Raises :class:`BranchCutError` when an eigenphase sits within
    `branch_guard` of the cut at +-pi; the caller should rescale the couplings
    per iteration and retry.  The input must be unitary to ~1e-8.
    """
    unitary = np.asarray(unitary, dtype=np.complex128)
    dim = unitary.shape[0]
    gram_defect = np.abs(unitary.conj().T @ unitary - np.eye(dim)).max()
    if gram_defect > UNITARY_TOL * 10:
        raise ValueError(f"matrix is not unitary: |G^dag G - 1| = {gram_defect:.3e}")
    # Schur of a normal matrix is its spectral decomposition with an
    # orthonormal eigenbasis, which keeps the reconstructed H Hermitian.
    triangular, vectors = schur(unitary, output="complex")
    phases = np.angle(np.diag(triangular))
    if np.any(np.pi - np.abs(phases) < branch_guard):
        worst = phases[np.argmax(np.abs(phases))]
        raise BranchCutError(
            f"eigenphase {worst:.8f} within {branch_guard} of the log branch cut; "
            f"reduce the per-iteration couplings"
        )
    energies = -phases
    h = (vectors * energies) @ vectors.conj().T
    return 0.5 * (h + h.conj().T)


def single_particle_block(operator, basis: FockBasis) -> np.ndarray:
    """One-boson block of an operator, reordered so row/column s is site s."""
    matrix = operator.matrix if isinstance(operator, SparseOperator) else np.asarray(operator)
    idx = basis.single_particle_indices()
    if hasattr(matrix, "toarray"):
        matrix = matrix.toarray()
    return np.asarray(matrix)[np.ix_(idx, idx)]


@dataclass(frozen=True)
class BandPoint:
    """One retained eigenstate: wavenumber, energy, left-partition weight."""

    k: float
    E: float
    leg_weight: float
    band_index: int
    quality: float


def _wrap_k(j: int, count: int) -> float:
    k = 2.0 * np.pi * j / count
    if k > np.pi + 1e-12:
        k -= 2.0 * np.pi
    return k


def extract_band_structure(
    h_sites: np.ndarray,
    leg_partition: Sequence[int] | None = None,
    prune_threshold: float = 0.5,
) -> list[BandPoint]:
    """Band points of a single-particle real-space Hamiltonian.

    Parameters
    ----------
    h_sites:
        Hermitian matrix over sites, ordered along the periodic direction
        (for a ladder: rung-major, so the partition sites appear in rung
        order).
    leg_partition:
        Site indices forming the "left" partition.  The Fourier transform is
        taken over the eigenstate's amplitudes on these sites; the leg weight
        is the eigenstate's total probability on them.  When omitted the whole
        chain is used and the weight is 1.
    prune_threshold:
        Minimum fraction of spectral power the dominant peak (plus its mirror
        for standing waves) must carry for the state to be retained.
    """
    h_sites = np.asarray(h_sites)
    num_sites = h_sites.shape[0]
    if leg_partition is None:
        partition = np.arange(num_sites)
    else:
        partition = np.asarray(list(leg_partition), dtype=np.int64)
        if partition.size == 0:
            raise ValueError("leg partition must not be empty")
    energies, vectors = np.linalg.eigh(h_sites)
    count = partition.size
    freqs = np.fft.fft(vectors[partition, :], axis=0)
    power = np.abs(freqs) ** 2
    raw: list[tuple[float, float, float, float]] = []
    for col in range(num_sites):
        spectrum = power[:, col]
        total = spectrum.sum()
        if total <= 0.0:
            continue
        peak = int(np.argmax(spectrum))
        mirror = (-peak) % count
        weight = float((np.abs(vectors[partition, col]) ** 2).sum())
        if mirror != peak and spectrum[mirror] >= MIRROR_PARTNER_RATIO * spectrum[peak]:
            dominance = float((spectrum[peak] + spectrum[mirror]) / total)
            if dominance >= prune_threshold:
                raw.append((_wrap_k(peak, count), energies[col], weight, dominance / 2))
                raw.append((_wrap_k(mirror, count), energies[col], weight, dominance / 2))
        else:
            dominance = float(spectrum[peak] / total)
            if dominance >= prune_threshold:
                raw.append((_wrap_k(peak, count), energies[col], weight, dominance))
    # Band indices: enumerate by energy within each wavenumber.
    by_k: dict[float, list[int]] = {}
    for i, (k, *_rest) in enumerate(raw):
        by_k.setdefault(round(k, 12), []).append(i)
    band_of = [0] * len(raw)
    for _, members in by_k.items():
        members.sort(key=lambda i: raw[i][1])
        for rank, i in enumerate(members):
            band_of[i] = rank
    points = [
        BandPoint(k=k, E=float(e), leg_weight=w, band_index=band_of[i], quality=q)
        for i, (k, e, w, q) in enumerate(raw)
    ]
    points.sort(key=lambda p: (p.band_index, p.k, p.E))
    return points


def occupations_and_correlations(state: StateVector) -> tuple[np.ndarray, np.ndarray]:
    """Per-bin expectations and the pair-correlation matrix.

    Returns ``(<n_i>, Gamma)`` with ``Gamma[i, j] = <adag_i adag_j a_j a_i>``:
    off-diagonal entries are ``<n_i n_j>``, diagonal entries ``<n_i (n_i-1)>``.
    Both are diagonal observables in the occupancy basis, so this is a single
    weighted accumulation over basis states.
    """
    occs = state.basis.occupancy_matrix().astype(np.float64)
    weights = np.abs(state.amplitudes) ** 2
    densities = weights @ occs
    gamma = (occs * weights[:, None]).T @ occs - np.diag(densities)
    return densities, gamma


@dataclass(frozen=True)
class WavepacketStats:
    """Per-snapshot packet summaries along a chosen axis."""

    times: np.ndarray
    center: np.ndarray
    variance: np.ndarray
    velocity: np.ndarray


def wavepacket_stats(
    trajectory: Trajectory, positions: Sequence[float] | None = None
) -> WavepacketStats:
    """Center of mass, variance, and drift velocity of the occupation profile.

    `positions` maps each bin to a coordinate (default: the bin index); for a
    ladder pass the rung index of each site so both legs project onto the same
    axis.  Velocity is the finite-difference gradient of the center and needs
    at least two snapshots.
    """
    if len(trajectory) < 2:
        raise ValueError("need at least two snapshots to differentiate the center")
    occ = trajectory.occupations()
    if positions is None:
        coords = np.arange(occ.shape[1], dtype=np.float64)
    else:
        coords = np.asarray(list(positions), dtype=np.float64)
        if coords.shape[0] != occ.shape[1]:
            raise ValueError("positions length does not match bin count")
    totals = occ.sum(axis=1)
    center = (occ @ coords) / totals
    second = (occ @ coords**2) / totals
    variance = second - center**2
    times = trajectory.times()
    velocity = np.gradient(center, times)
    return WavepacketStats(times, center, variance, velocity)


def gaussian_packet(
    basis: FockBasis,
    sites: Sequence[int],
    center: float,
    sigma: float,
    momentum: float,
) -> StateVector:
    """Single-boson Gaussian wavepacket over the given sites.

    Amplitude on the j-th listed site is
    ``exp(-(j - center)^2 / (4 sigma^2)) * exp(i momentum j)``, normalized.
    The listed sites define the packet axis (e.g. one ladder leg in rung
    order); all other bins stay empty.
    """
    sites = list(sites)
    positions = np.arange(len(sites), dtype=np.float64)
    envelope = np.exp(-((positions - center) ** 2) / (4.0 * sigma**2))
    phases = np.exp(1j * momentum * positions)
    amplitude = envelope * phases
    amplitude /= np.linalg.norm(amplitude)
    amps = np.zeros(basis.dim, dtype=np.complex128)
    single = basis.single_particle_indices()
    for j, site in enumerate(sites):
        amps[single[site]] = amplitude[j]
    return StateVector(basis, amps, copy=False)


def format_band_table(points: Sequence[BandPoint]) -> str:
    """CSV text with columns ``band_index,k,E,leg_weight,quality``."""
    rows = ["band_index,k,E,leg_weight,quality"]
    for p in points:
        rows.append(
            f"{p.band_index},{p.k:.12g},{p.E:.12g},{p.leg_weight:.12g},{p.quality:.12g}"
        )
    return "\n".join(rows) + "\n"


def format_correlation_table(gamma: np.ndarray, tag: str = "") -> str:
    """CSV text with columns ``i,j,gamma`` (optionally prefixed by a tag column)."""
    rows = ["tag,i,j,gamma" if tag else "i,j,gamma"]
    size = gamma.shape[0]
    for i in range(size):
        for j in range(size):
            prefix = f"{tag}," if tag else ""
            rows.append(f"{prefix}{i},{j},{gamma[i, j]:.12g}")
    return "\n".join(rows) + "\n"
