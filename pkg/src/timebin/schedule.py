"""Compiles a lattice graph into the device's per-tick interferometer settings.

One emulator iteration touches every edge once.  Edge ``(m, n)`` costs three
passes through the interferometer: swap bin ``m`` into the register
(theta = pi, phi = -pi/2, a unit-amplitude transfer), couple the register to
bin ``n`` with theta = 2 kappa and phi = alpha, then swap the register back
into bin ``m`` (theta = pi, phi = +pi/2).  Composing the three passes in that
order reproduces the direct two-bin coupling ``T_mn(theta, phi)`` exactly;
with the swap phases interchanged the composition lands on
``T_mn(theta, phi + pi)`` instead, so the phase assignment here is forced by
the composition-correctness requirement.  The register loop is one time bin
long, so its contents re-meet the interferometer every tick; the storage bin
at the interferometer on tick ``t`` is ``t mod L``.

Edges are processed in canonical sorted order, one edge per clock cycle of
``L`` ticks, so an iteration lasts ``|E|`` cycles.  The swap-back tick of an
edge lands one ring revolution after its swap-in and may share a tick value
with the next edge's passes; settings are listed in application order, which
is the order the simulator must honor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ScheduleError
from .lattice import LatticeGraph

__all__ = [
    "MziSetting",
    "PassSchedule",
    "compile_schedule",
    "dump_schedule",
    "SWAP_IN",
    "INTERACT",
    "SWAP_OUT",
    "IDLE",
]

SWAP_IN = "swap_in"
INTERACT = "interact"
SWAP_OUT = "swap_out"
IDLE = "idle"


@dataclass(frozen=True)
class MziSetting:
    """One pass: which tick, the two phases, the role, and the edge it serves."""

    tick: int
    theta: float
    phi: float
    role: str
    edge: tuple[int, int] | None = None


@dataclass(frozen=True)
class PassSchedule:
    """Ordered interferometer settings realizing one emulator iteration."""

    num_storage_bins: int
    cycles_per_iteration: int
    settings: tuple[MziSetting, ...]

    @property
    def bins_per_cycle(self) -> int:
        """Storage bins plus the register slot."""
        return self.num_storage_bins + 1

    def storage_bin(self, setting: MziSetting) -> int:
        """Storage bin at the interferometer when `setting` is applied."""
        return setting.tick % self.num_storage_bins

    def non_idle(self) -> tuple[MziSetting, ...]:
        return tuple(s for s in self.settings if s.role != IDLE)


def _resolve_alpha(graph: LatticeGraph, override) -> LatticeGraph:
    """Apply one iteration's phase override to the graph."""
    if override is None:
        return graph
    if isinstance(override, (int, float)):
        return graph.with_alpha(offset=float(override))
    if isinstance(override, dict):
        replace = {}
        for pair, value in override.items():
            key = tuple(int(v) for v in pair)
            if len(key) != 2:
                raise ScheduleError(f"override edge key {pair!r} is not a site pair")
            replace[key] = float(value)
        try:
            return graph.with_alpha(replace=replace)
        except Exception as exc:
            raise ScheduleError(str(exc)) from exc
    raise ScheduleError(
        f"override value must be a number or an edge table, got {type(override).__name__}"
    )


def _compile_once(graph: LatticeGraph) -> PassSchedule:
    num_bins = graph.num_sites
    if graph.num_edges == 0:
        idle = MziSetting(tick=0, theta=0.0, phi=0.0, role=IDLE, edge=None)
        return PassSchedule(num_bins, 1, (idle,))
    settings = []
    for cycle, edge in enumerate(graph.edges):
        base = cycle * num_bins
        pair = (edge.m, edge.n)
        settings.append(
            MziSetting(base + edge.m, math.pi, -math.pi / 2, SWAP_IN, pair)
        )
        # Canonical edges have m < n, so bin n passes later in the same cycle.
        settings.append(
            MziSetting(base + edge.n, 2.0 * edge.kappa, edge.alpha, INTERACT, pair)
        )
        settings.append(
            MziSetting(base + num_bins + edge.m, math.pi, +math.pi / 2, SWAP_OUT, pair)
        )
    return PassSchedule(num_bins, graph.num_edges, tuple(settings))


def compile_schedule(
    graph: LatticeGraph,
    alpha_override: dict | None = None,
    iterations: int | None = None,
):
    """Compile the pass schedule for a graph.

    Without `alpha_override` this returns a single :class:`PassSchedule` to be
    repeated every iteration.  With an override table it returns a list of
    per-iteration schedules of length `iterations`; the table maps an
    iteration index to either a global additive phase (number) or a per-edge
    phase replacement (``{(m, n): alpha}``), and the most recent entry at or
    below an iteration stays in force until superseded.
    """
    if alpha_override is None:
        return _compile_once(graph)
    if iterations is None:
        raise ScheduleError("iterations must be given when alpha_override is used")
    keys = sorted(alpha_override)
    schedules = []
    current = None
    pos = 0
    for it in range(iterations):
        while pos < len(keys) and keys[pos] <= it:
            current = alpha_override[keys[pos]]
            pos += 1
        schedules.append(_compile_once(_resolve_alpha(graph, current)))
    return schedules


def dump_schedule(schedule: PassSchedule) -> str:
    """Settings as ``tick theta phi role m n`` lines; idle rows use -1 -1."""
    lines = []
    for s in schedule.settings:
        m, n = s.edge if s.edge is not None else (-1, -1)
        lines.append(f"{s.tick} {s.theta:.17g} {s.phi:.17g} {s.role} {m} {n}")
    return "\n".join(lines) + "\n"
