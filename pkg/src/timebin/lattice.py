"""Lattice graphs: weighted undirected edges carrying a coupling and a phase.

An edge stores ``(m, n, kappa, alpha)`` with the phase defined on the
m -> n orientation; reversing the orientation negates the phase.  Edges are
canonicalized to ``m < n`` at construction, so two graphs with the same
physics compare equal regardless of how their edges were supplied.

Builders cover the topologies the emulator demos use (chain, 2D grid,
two-leg flux ladder, hypercube) and a JSON document format supports
arbitrary user graphs with exact save/load round trips.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

from .errors import GraphFormatError

__all__ = [
    "Edge",
    "LatticeGraph",
    "build_lattice",
    "chain",
    "grid2d",
    "hall_ladder",
    "hypercube",
    "load_graph",
    "save_graph",
    "is_connected",
]


class Edge(NamedTuple):
    m: int
    n: int
    kappa: float
    alpha: float


def _canonical_edge(m: int, n: int, kappa: float, alpha: float) -> Edge:
    if m > n:
        m, n, alpha = n, m, -alpha
    return Edge(int(m), int(n), float(kappa), float(alpha))


@dataclass(frozen=True)
class LatticeGraph:
    """Immutable undirected weighted graph over ``num_sites`` labeled sites."""

    num_sites: int
    edges: tuple[Edge, ...]
    metadata: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.num_sites < 1:
            raise GraphFormatError(f"num_sites must be >= 1, got {self.num_sites}")
        canonical = []
        seen: set[tuple[int, int]] = set()
        for i, raw in enumerate(self.edges):
            edge = _canonical_edge(*raw)
            if not (0 <= edge.m < self.num_sites and 0 <= edge.n < self.num_sites):
                raise GraphFormatError(
                    f"edges[{i}]: sites ({edge.m}, {edge.n}) out of range for "
                    f"num_sites={self.num_sites}"
                )
            if edge.m == edge.n:
                raise GraphFormatError(f"edges[{i}]: self-loop on site {edge.m}")
            if edge.kappa < 0:
                raise GraphFormatError(f"edges[{i}]: kappa must be >= 0, got {edge.kappa}")
            pair = (edge.m, edge.n)
            if pair in seen:
                raise GraphFormatError(f"edges[{i}]: duplicate edge {pair}")
            seen.add(pair)
            canonical.append(edge)
        canonical.sort(key=lambda e: (e.m, e.n))
        object.__setattr__(self, "edges", tuple(canonical))

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def scaled(self, kappa_scale: float) -> "LatticeGraph":
        """Copy with every coupling multiplied by `kappa_scale`."""
        if kappa_scale <= 0:
            raise GraphFormatError(f"kappa_scale must be > 0, got {kappa_scale}")
        return LatticeGraph(
            self.num_sites,
            tuple(Edge(e.m, e.n, e.kappa * kappa_scale, e.alpha) for e in self.edges),
            dict(self.metadata),
        )

    def with_alpha(self, offset: float = 0.0, replace: dict | None = None) -> "LatticeGraph":
        """Copy with a global additive phase and/or per-edge phase replacements.

        `replace` maps unordered site pairs ``(m, n)`` to the new phase on the
        canonical (ascending) orientation; pairs absent from the graph raise.
        """
        table = {}
        if replace:
            known = {(e.m, e.n) for e in self.edges}
            for pair, value in replace.items():
                key = (min(pair), max(pair))
                if key not in known:
                    raise GraphFormatError(f"alpha override references missing edge {key}")
                table[key] = float(value)
        edges = []
        for e in self.edges:
            alpha = table.get((e.m, e.n), e.alpha) + offset
            edges.append(Edge(e.m, e.n, e.kappa, alpha))
        return LatticeGraph(self.num_sites, tuple(edges), dict(self.metadata))


def chain(
    length: int, kappa: float, alpha: float = 0.0, periodic: bool = False
) -> LatticeGraph:
    """1D chain; the phase rides the ascending m -> m+1 orientation."""
    if length < 1:
        raise GraphFormatError(f"chain length must be >= 1, got {length}")
    edges = [(i, i + 1, kappa, alpha) for i in range(length - 1)]
    if periodic and length > 2:
        edges.append((length - 1, 0, kappa, alpha))
    meta = {"kind": "chain", "coords": [[i] for i in range(length)]}
    return LatticeGraph(length, tuple(Edge(*e) for e in edges), meta)


def grid2d(rows: int, cols: int, kappa: float, periodic: bool = False) -> LatticeGraph:
    """2D grid with row-major site labels and real hops."""
    if rows < 1 or cols < 1:
        raise GraphFormatError(f"grid sizes must be >= 1, got {rows}x{cols}")
    edges = []
    for r in range(rows):
        for c in range(cols):
            site = r * cols + c
            if c + 1 < cols:
                edges.append((site, site + 1, kappa, 0.0))
            elif periodic and cols > 2:
                edges.append((site, r * cols, kappa, 0.0))
            if r + 1 < rows:
                edges.append((site, site + cols, kappa, 0.0))
            elif periodic and rows > 2:
                edges.append((site, c, kappa, 0.0))
    meta = {"kind": "grid2d", "coords": [[r, c] for r in range(rows) for c in range(cols)]}
    return LatticeGraph(rows * cols, tuple(Edge(*e) for e in edges), meta)


def hall_ladder(
    rungs: int, kappa: float, alpha: float, periodic: bool = False
) -> LatticeGraph:
    """Two-leg ladder threaded by a uniform flux.

    Site ``2r`` is the left leg of rung ``r``, site ``2r+1`` the right leg.
    Hops along the left leg carry phase ``+alpha/2`` on the ascending-rung
    orientation, the right leg ``-alpha/2``, and rungs are real with the same
    coupling.  Each square plaquette then encloses flux ``alpha``.
    """
    if rungs < 1:
        raise GraphFormatError(f"rungs must be >= 1, got {rungs}")
    edges = []
    for r in range(rungs):
        edges.append((2 * r, 2 * r + 1, kappa, 0.0))
        if r + 1 < rungs:
            edges.append((2 * r, 2 * r + 2, kappa, +alpha / 2))
            edges.append((2 * r + 1, 2 * r + 3, kappa, -alpha / 2))
    if periodic and rungs > 2:
        edges.append((2 * (rungs - 1), 0, kappa, +alpha / 2))
        edges.append((2 * (rungs - 1) + 1, 1, kappa, -alpha / 2))
    meta = {
        "kind": "hall_ladder",
        "rung_of_site": [i // 2 for i in range(2 * rungs)],
        "leg_of_site": [i % 2 for i in range(2 * rungs)],
    }
    return LatticeGraph(2 * rungs, tuple(Edge(*e) for e in edges), meta)


def hypercube(dim: int, kappa: float) -> LatticeGraph:
    """d-dimensional hypercube; vertices are binary coordinate labels.

    Edges join labels at Hamming distance 1 with uniform real coupling, so
    site v's antipode is ``2**d - 1 - v``.  Guarded at d <= 10 (1024 sites).
    """
    if not 1 <= dim <= 10:
        raise GraphFormatError(f"hypercube dimension must be in 1..10, got {dim}")
    size = 1 << dim
    edges = []
    for v in range(size):
        for b in range(dim):
            w = v ^ (1 << b)
            if w > v:
                edges.append((v, w, kappa, 0.0))
    meta = {
        "kind": "hypercube",
        "coords": [[(v >> b) & 1 for b in range(dim)] for v in range(size)],
    }
    return LatticeGraph(size, tuple(Edge(*e) for e in edges), meta)


_BUILDERS = {
    "chain": chain,
    "grid2d": grid2d,
    "hall_ladder": hall_ladder,
    "hypercube": hypercube,
}


def build_lattice(kind: str, **params) -> LatticeGraph:
    """Dispatch to a named builder; see the individual builders for parameters."""
    try:
        builder = _BUILDERS[kind]
    except KeyError:
        raise GraphFormatError(
            f"unknown lattice kind {kind!r}; expected one of {sorted(_BUILDERS)}"
        ) from None
    return builder(**params)


def save_graph(graph: LatticeGraph) -> str:
    """Serialize to the canonical JSON document form (stable byte-for-byte)."""
    doc = {
        "num_sites": graph.num_sites,
        "edges": [
            {"m": e.m, "n": e.n, "kappa": e.kappa, "alpha": e.alpha}
            for e in graph.edges
        ],
        "metadata": graph.metadata,
    }
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def _require(condition: bool, context: str, message: str) -> None:
    if not condition:
        raise GraphFormatError(f"{context}: {message}")


def load_graph(document: str | dict) -> LatticeGraph:
    """Parse a graph document, validating against the schema with field context."""
    if isinstance(document, str):
        try:
            doc = json.loads(document)
        except json.JSONDecodeError as exc:
            raise GraphFormatError(f"not valid JSON: {exc}") from exc
    else:
        doc = document
    _require(isinstance(doc, dict), "document", "must be a JSON object")
    unknown = set(doc) - {"num_sites", "edges", "metadata"}
    _require(not unknown, "document", f"unknown keys {sorted(unknown)}")
    _require("num_sites" in doc, "num_sites", "missing")
    num_sites = doc["num_sites"]
    _require(isinstance(num_sites, int) and num_sites >= 1, "num_sites",
             f"must be a positive integer, got {num_sites!r}")
    raw_edges = doc.get("edges", [])
    _require(isinstance(raw_edges, list), "edges", "must be a list")
    edges = []
    for i, item in enumerate(raw_edges):
        ctx = f"edges[{i}]"
        _require(isinstance(item, dict), ctx, "must be an object")
        unknown = set(item) - {"m", "n", "kappa", "alpha"}
        _require(not unknown, ctx, f"unknown keys {sorted(unknown)}")
        for key in ("m", "n", "kappa", "alpha"):
            _require(key in item, f"{ctx}.{key}", "missing")
        _require(isinstance(item["m"], int), f"{ctx}.m", "must be an integer")
        _require(isinstance(item["n"], int), f"{ctx}.n", "must be an integer")
        for key in ("kappa", "alpha"):
            _require(
                isinstance(item[key], (int, float)) and not isinstance(item[key], bool),
                f"{ctx}.{key}", "must be a number",
            )
        edges.append(Edge(item["m"], item["n"], float(item["kappa"]), float(item["alpha"])))
    metadata = doc.get("metadata", {})
    _require(isinstance(metadata, dict), "metadata", "must be an object")
    return LatticeGraph(num_sites, tuple(edges), metadata)


def is_connected(graph: LatticeGraph) -> bool:
    """Breadth-first reachability of all sites from site 0."""
    if graph.num_sites == 1:
        return True
    adjacency: list[list[int]] = [[] for _ in range(graph.num_sites)]
    for e in graph.edges:
        adjacency[e.m].append(e.n)
        adjacency[e.n].append(e.m)
    seen = {0}
    frontier = [0]
    while frontier:
        nxt: list[int] = []
        for site in frontier:
            for other in adjacency[site]:
                if other not in seen:
                    seen.add(other)
                    nxt.append(other)
        frontier = nxt
    return len(seen) == graph.num_sites
