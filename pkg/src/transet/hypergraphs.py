"""Connecting and co-connecting hypergraphs: cost, validation, conversion.

A connecting hypergraph is a family of vertex sets, each inducing a
connected subgraph of size at least 2, that jointly contains every
non-adjacent vertex pair.  Its cost ``sum(|E| - 2)`` equals the size of an
optimal connecting transition set, which makes it the solver's working
representation.  The co-connecting variant is the complement-side dual:
co-connected hyperedges jointly containing every *edge*.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Iterable

from .graphs import FormatError, Graph, bits_of, mask_is_connected


def _canon_hyperedges(host: Graph, hyperedges) -> tuple[frozenset[int], ...]:
    seen = []
    for e in hyperedges:
        e = frozenset(e)
        if not e:
            raise ValueError("empty hyperedge")
        for v in e:
            if not 0 <= v < host.n:
                raise ValueError(f"hyperedge vertex {v} out of range")
        if e in seen:
            warnings.warn("duplicate hyperedge collapsed", stacklevel=3)
            continue
        seen.append(e)
    return tuple(sorted(seen, key=sorted))


class _Hypergraph:
    __slots__ = ("host", "hyperedges")

    def __init__(self, host: Graph, hyperedges: Iterable[Iterable[int]] = ()):
        self.host = host
        self.hyperedges = _canon_hyperedges(host, hyperedges)

    def __len__(self) -> int:
        return len(self.hyperedges)

    def __iter__(self):
        return iter(self.hyperedges)

    def __eq__(self, other) -> bool:
        return (
            type(other) is type(self)
            and self.host == other.host
            and self.hyperedges == other.hyperedges
        )

    def __hash__(self) -> int:
        return hash((type(self).__name__, self.host, self.hyperedges))

    def __repr__(self) -> str:
        return f"{type(self).__name__}({len(self.hyperedges)} hyperedges)"


class ConnectingHypergraph(_Hypergraph):
    """Hyperedges must induce connected subgraphs and cover all non-edges."""


class CoConnectingHypergraph(_Hypergraph):
    """Hyperedges must induce co-connected subgraphs and cover all edges."""


@dataclass(frozen=True)
class ValidationReport:
    valid: bool
    violations: tuple[tuple[str, object], ...]
    cost: int


def cost(h: _Hypergraph | Iterable[Iterable[int]]) -> int:
    """The cost functional ``sum(|E| - 2)`` over hyperedges."""
    edges = h.hyperedges if isinstance(h, _Hypergraph) else [frozenset(e) for e in h]
    return sum(len(e) - 2 for e in edges)


def _mask(vs: Iterable[int]) -> int:
    m = 0
    for v in vs:
        m |= 1 << v
    return m


def _co_adj(g: Graph) -> list[int]:
    full = g.full_mask()
    return [~g.adj[v] & full & ~(1 << v) for v in range(g.n)]


def validate_connecting(g: Graph, h: _Hypergraph) -> ValidationReport:
    """Check hyperedge shape (connected, size >= 2) and non-edge coverage.

    Violations are data, not exceptions; ``valid`` iff none were found.
    """
    violations: list[tuple[str, object]] = []
    if h.host != g:
        violations.append(("host_mismatch", None))
        return ValidationReport(False, tuple(violations), cost(h))
    masks = []
    for e in h.hyperedges:
        em = _mask(e)
        masks.append(em)
        if len(e) < 2:
            violations.append(("too_small", tuple(sorted(e))))
        elif not mask_is_connected(em, g.adj):
            violations.append(("not_connected", tuple(sorted(e))))
    full = g.full_mask()
    for u in range(g.n):
        non_nbrs = ~g.adj[u] & (full << (u + 1)) & full
        for v in bits_of(non_nbrs):
            pm = (1 << u) | (1 << v)
            if not any(pm & em == pm for em in masks):
                violations.append(("uncovered_pair", (u, v)))
    return ValidationReport(not violations, tuple(violations), cost(h))


def validate_co_connecting(g: Graph, h: _Hypergraph) -> ValidationReport:
    """Dual check: co-connected hyperedges of size >= 2 covering every edge."""
    violations: list[tuple[str, object]] = []
    if h.host != g:
        violations.append(("host_mismatch", None))
        return ValidationReport(False, tuple(violations), cost(h))
    co_adj = _co_adj(g)
    masks = []
    for e in h.hyperedges:
        em = _mask(e)
        masks.append(em)
        if len(e) < 2:
            violations.append(("too_small", tuple(sorted(e))))
        elif not mask_is_connected(em, co_adj):
            violations.append(("not_co_connected", tuple(sorted(e))))
    for u, v in g.sorted_edges():
        pm = (1 << u) | (1 << v)
        if not any(pm & em == pm for em in masks):
            violations.append(("uncovered_edge", (u, v)))
    return ValidationReport(not violations, tuple(violations), cost(h))


def _induced_spanning_tree_adj(g: Graph, e: frozenset[int]) -> dict[int, list[int]]:
    """Deterministic spanning tree of the induced subgraph, as adjacency
    lists: lowest-neighbor-first traversal from the lowest vertex."""
    em = _mask(e)
    root = min(e)
    seen = 1 << root
    queue = [root]
    tree: dict[int, list[int]] = {v: [] for v in e}
    while queue:
        u = queue.pop(0)
        for v in bits_of(g.adj[u] & em & ~seen):
            seen |= 1 << v
            tree[u].append(v)
            tree[v].append(u)
            queue.append(v)
    return tree


def hypergraph_to_transitions(g: Graph, h: ConnectingHypergraph):
    """Convert a valid connecting hypergraph into a connecting transition set.

    Each hyperedge contributes the transition set of a spanning tree of its
    induced subgraph: every vertex ``v`` funnels through a fixed tree
    neighbour ``f(v)`` (the lowest-id one), giving ``|E| - 2`` transitions
    per hyperedge, so the union has size at most ``cost(h)``.
    """
    from .transitions import Transition, TransitionSet

    report = validate_connecting(g, h)
    if not report.valid:
        raise ValueError(f"invalid connecting hypergraph: {report.violations[0]}")
    trans: set[Transition] = set()
    for e in h.hyperedges:
        tree = _induced_spanning_tree_adj(g, e)
        for v, nbrs in tree.items():
            if not nbrs:
                continue
            fv = min(nbrs)
            for u in nbrs:
                if u != fv:
                    trans.add(Transition.of(u, v, fv))
    return TransitionSet(g, trans)


def parse_hyperedges(text: str, host: Graph) -> list[frozenset[int]]:
    """Parse one hyperedge per line (space-separated ids, ``#`` comments)."""
    out = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            vs = [int(p) for p in line.split()]
        except ValueError:
            raise FormatError("hyperedge line must contain integers", lineno) from None
        for v in vs:
            if not 0 <= v < host.n:
                raise FormatError(f"vertex {v} out of range", lineno)
        if len(set(vs)) != len(vs):
            raise FormatError("repeated vertex in hyperedge", lineno)
        out.append(frozenset(vs))
    return out


def format_hyperedges(h: _Hypergraph) -> str:
    """Serialize hyperedges, each as ascending ids, sorted lexicographically."""
    return "".join(" ".join(map(str, sorted(e))) + "\n" for e in h.hyperedges)
