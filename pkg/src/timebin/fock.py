"""Compressed multi-boson occupancy basis with combinatorial integer labeling.

A state of ``n`` identical bosons on ``L`` sites is a length-``L`` vector of
non-negative counts summing to ``n``.  Treating each site as an independent
``(N+1)``-level qudit would cost ``(N+1)**L`` amplitudes, almost all of them
describing states with the wrong total boson number.  Indexing the multisets
directly shrinks the space to ``C(n+L-1, n)`` states per fixed-``n`` sector,
which is what makes two-photon dynamics on hundreds of time bins tractable.

The label of a state is built from cumulative placement counts.  Writing
``T(n, l)`` for the number of ways to place ``n`` bosons on ``l`` sites
(``T(n, l) = C(n+l-1, n)`` for ``l >= 1``, ``T(0, 0) = 1``, ``T(n, 0) = 0``
otherwise), a state whose occupied sites, listed in descending order with
multiplicity, are ``l_1 >= l_2 >= ... >= l_n`` (1-based) gets the sector-local
label::

    label = 1 + sum_i T(i, L - l_i)

Labels are 1-based within each sector; global indices are 0-based and order
sectors by ascending boson number (vacuum first).  The inverse map peels the
label greedily, largest boson index first.  Both directions are exact bijections
onto ``1..C(n+L-1, n)``.

Counts are kept as Python integers throughout, so dimensions and labels never
overflow even when they are astronomically large.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from typing import Iterator, NamedTuple, Sequence

import numpy as np

__all__ = ["FockBasis", "StateIndex", "dimension", "enumerate_basis"]


def _placements(num_bosons: int, num_sites: int) -> int:
    """Ways to place `num_bosons` identical bosons on `num_sites` sites."""
    if num_sites == 0:
        return 1 if num_bosons == 0 else 0
    return math.comb(num_bosons + num_sites - 1, num_bosons)


def dimension(num_sites: int, max_bosons: int, mode: str = "sector") -> int:
    """Dimension of the occupancy basis, exactly.

    Parameters
    ----------
    num_sites:
        Number of lattice sites / time bins, at least 1.
    max_bosons:
        Total boson count of the sector (``mode="sector"``) or the cap of the
        direct sum over all sectors ``0..max_bosons`` (``mode="direct_sum"``).
    mode:
        ``"sector"`` or ``"direct_sum"``.

    Results are exact arbitrary-precision integers; no overflow is possible.
    """
    if num_sites < 1:
        raise ValueError(f"num_sites must be >= 1, got {num_sites}")
    if max_bosons < 0:
        raise ValueError(f"max_bosons must be >= 0, got {max_bosons}")
    if mode == "sector":
        return _placements(max_bosons, num_sites)
    if mode == "direct_sum":
        return sum(_placements(n, num_sites) for n in range(max_bosons + 1))
    raise ValueError(f"unknown mode {mode!r}, expected 'sector' or 'direct_sum'")


class StateIndex(NamedTuple):
    """Sector-local 1-based label and 0-based global index of a basis state."""

    label: int
    index: int


class FockBasis:
    """Direct sum of all ``n <= max_bosons`` occupancy sectors on ``num_sites`` bins.

    Immutable after construction; all methods are pure and safe to call
    concurrently.  Lazily built lookup structures are derived data only.
    """

    def __init__(self, num_sites: int, max_bosons: int):
        if num_sites < 1:
            raise ValueError(f"num_sites must be >= 1, got {num_sites}")
        if max_bosons < 0:
            raise ValueError(f"max_bosons must be >= 0, got {max_bosons}")
        self.num_sites = int(num_sites)
        self.max_bosons = int(max_bosons)
        # _table[n][l] = number of ways to place n bosons on l sites, l = 0..L.
        self._table = [
            [_placements(n, l) for l in range(num_sites + 1)]
            for n in range(max_bosons + 1)
        ]
        self.sector_dims = tuple(self._table[n][num_sites] for n in range(max_bosons + 1))
        offsets = [0]
        for d in self.sector_dims[:-1]:
            offsets.append(offsets[-1] + d)
        self.sector_offsets = tuple(offsets)
        self.dim = offsets[-1] + self.sector_dims[-1]
        self._occupancies: np.ndarray | None = None
        self._index_lookup: dict[bytes, int] | None = None
        self._pair_families: dict[tuple[int, int], list[np.ndarray]] = {}

    def __repr__(self) -> str:
        return (
            f"FockBasis(num_sites={self.num_sites}, max_bosons={self.max_bosons}, "
            f"dim={self.dim})"
        )

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, FockBasis)
            and other.num_sites == self.num_sites
            and other.max_bosons == self.max_bosons
        )

    def __hash__(self) -> int:
        return hash((self.num_sites, self.max_bosons))

    def sector_dim(self, num_bosons: int) -> int:
        """Dimension of the fixed-boson-number sector."""
        self._check_sector(num_bosons)
        return self.sector_dims[num_bosons]

    def _check_sector(self, num_bosons: int) -> None:
        if not 0 <= num_bosons <= self.max_bosons:
            raise ValueError(
                f"boson number {num_bosons} outside basis sectors 0..{self.max_bosons}"
            )

    def _validated_counts(self, occupancy: Sequence[int]) -> tuple[np.ndarray, int]:
        counts = np.asarray(occupancy, dtype=np.int64)
        if counts.ndim != 1 or counts.shape[0] != self.num_sites:
            raise ValueError(
                f"occupancy length {counts.shape} does not match num_sites={self.num_sites}"
            )
        if (counts < 0).any():
            raise ValueError("occupancy counts must be non-negative")
        total = int(counts.sum())
        if total > self.max_bosons:
            raise ValueError(
                f"total bosons {total} exceed basis cap {self.max_bosons}"
            )
        return counts, total

    def index_of(self, occupancy: Sequence[int]) -> StateIndex:
        """Sector-local label (1-based) and global index (0-based) of a state.

        The label sums placement counts over the occupied sites taken in
        descending order with multiplicity; see the module docstring.
        """
        counts, total = self._validated_counts(occupancy)
        label = 1
        boson = 0
        # Descending site order: site index s contributes sites_remaining = L-(s+1).
        for site in range(self.num_sites - 1, -1, -1):
            for _ in range(int(counts[site])):
                boson += 1
                label += self._table[boson][self.num_sites - site - 1]
        return StateIndex(label, self.sector_offsets[total] + label - 1)

    def occupancy_of(self, num_bosons: int, label: int) -> tuple[int, ...]:
        """Inverse of :meth:`index_of` within one boson-number sector.

        Peels the label greedily: for each boson index ``i = n..1`` take the
        largest site count ``s`` whose placement number still fits into the
        remainder.
        """
        self._check_sector(num_bosons)
        if not 1 <= label <= self.sector_dims[num_bosons]:
            raise ValueError(
                f"label {label} out of range 1..{self.sector_dims[num_bosons]} "
                f"for sector n={num_bosons}"
            )
        counts = [0] * self.num_sites
        remainder = label - 1
        for boson in range(num_bosons, 0, -1):
            row = self._table[boson]
            # Largest s in [0, L-1] with row[s] <= remainder; rows are increasing.
            s = bisect_right(row, remainder, lo=0, hi=self.num_sites) - 1
            remainder -= row[s]
            counts[self.num_sites - s - 1] += 1
        if remainder != 0:
            raise AssertionError("label decomposition did not terminate at zero")
        return tuple(counts)

    def states(self, num_bosons: int) -> Iterator[tuple[int, ...]]:
        """All occupancies of one sector, in label order (label = position + 1)."""
        self._check_sector(num_bosons)
        for label in range(1, self.sector_dims[num_bosons] + 1):
            yield self.occupancy_of(num_bosons, label)

    def occupancy_matrix(self) -> np.ndarray:
        """(dim, num_sites) int64 array of all occupancies in global-index order.

        Cached; treat the returned array as read-only.
        """
        if self._occupancies is None:
            rows = np.zeros((self.dim, self.num_sites), dtype=np.int64)
            pos = 0
            for n in range(self.max_bosons + 1):
                for occ in self.states(n):
                    rows[pos] = occ
                    pos += 1
            self._occupancies = rows
        return self._occupancies

    def _lookup(self) -> dict[bytes, int]:
        if self._index_lookup is None:
            occs = self.occupancy_matrix()
            self._index_lookup = {
                occs[g].tobytes(): g for g in range(self.dim)
            }
        return self._index_lookup

    def global_index(self, occupancy: Sequence[int]) -> int:
        """0-based global index only (fast path for assembly loops)."""
        counts, _ = self._validated_counts(occupancy)
        key = counts.tobytes()
        idx = self._lookup().get(key)
        if idx is None:
            raise AssertionError("validated occupancy missing from lookup")
        return idx

    def single_particle_indices(self) -> np.ndarray:
        """Global indices of the one-boson states, ordered by site.

        Entry ``s`` is the index of the state with the boson on site ``s``.
        Requires ``max_bosons >= 1``.
        """
        if self.max_bosons < 1:
            raise ValueError("basis has no one-boson sector")
        # Label of the single boson on 0-based site s is L - s, so the
        # site-ordered indices run backwards through the sector.
        offset = self.sector_offsets[1]
        return offset + self.num_sites - 1 - np.arange(self.num_sites)


def enumerate_basis(basis: FockBasis, num_bosons: int) -> list[tuple[int, ...]]:
    """All occupancies of one sector as a list, position ``j`` holding label ``j+1``."""
    return list(basis.states(num_bosons))
