"""Solution procedures for minimum connecting transition sets.

The pipeline: trees are solved directly in linear time (``n - 2``
transitions, optimal); graphs with a cut vertex are also optimal at
``n - 2``; otherwise the co-component heuristic gives a connecting
hypergraph of cost ``tau(g)`` which is within 3/2 of the optimum, with
``ceil(2*tau/3)`` as a matching lower bound.  Exact answers come from the
generic cover engine (hyperedge formulation) and, independently, from a
brute-force search over transition subsets that exists purely to
cross-check the rest.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .cover import (
    BudgetExhaustedError,
    CoverInstance,
    CoverResult,
    min_cost_cover,
)
from .graphs import DisconnectedGraphError, Graph, bits_of, cut_vertices, mask_is_connected
from .hypergraphs import (
    ConnectingHypergraph,
    cost,
    hypergraph_to_transitions,
    validate_connecting,
)
from .transitions import (
    Transition,
    TransitionSet,
    _UnionFind,
    enumerate_transitions,
    is_t_connected,
)


class SearchLimitError(RuntimeError):
    """The brute-force subset search hit its size cap before succeeding."""


def tree_transition_set(g: Graph) -> TransitionSet:
    """Connecting transition set of a tree, size ``n - 2``, linear time.

    Every vertex picks a fixed neighbour ``f(v)`` (the lowest-id one) and
    the set permits exactly the turns ``u, v, f(v)`` for every other
    neighbour ``u`` of ``v``: any walk can be rerouted through the ``f``
    detours, and no smaller set connects a tree.
    """
    if g.n < 2 or g.m != g.n - 1 or not g.is_connected():
        raise ValueError("input must be a tree with at least 2 vertices")
    trans = []
    for v in range(g.n):
        nbrs = g.neighbors(v)
        if not nbrs:
            continue
        fv = nbrs[0]
        trans.extend(Transition.of(u, v, fv) for u in nbrs[1:])
    return TransitionSet(g, trans)


def _co_component_masks(g: Graph) -> list[int]:
    from .graphs import mask_components

    full = g.full_mask()
    co_adj = [~g.adj[v] & full & ~(1 << v) for v in range(g.n)]
    return mask_components(full, co_adj) if g.n else []


def tau(g: Graph) -> int:
    """Upper bound on the optimum: sum over co-connected components ``C``
    with at least 2 vertices of ``|C| - 2`` when ``G[C]`` is connected and
    ``|C| - 1`` otherwise."""
    if not g.is_connected():
        raise DisconnectedGraphError("tau requires a connected graph")
    total = 0
    for cm in _co_component_masks(g):
        size = cm.bit_count()
        if size < 2:
            continue
        total += size - 2 if mask_is_connected(cm, g.adj) else size - 1
    return total


def tau_heuristic_hypergraph(g: Graph) -> ConnectingHypergraph:
    """Quadratic-time connecting hypergraph of cost exactly ``tau(g)``.

    One hyperedge per nontrivial co-connected component ``C``: the
    component itself when it induces a connected subgraph, otherwise ``C``
    plus the lowest-id outside vertex (which is adjacent to all of ``C``).
    """
    if not g.is_connected():
        raise DisconnectedGraphError("heuristic requires a connected graph")
    if g.n < 2:
        return ConnectingHypergraph(g, ())
    hyperedges = []
    full = g.full_mask()
    for cm in _co_component_masks(g):
        if cm.bit_count() < 2:
            continue
        if mask_is_connected(cm, g.adj):
            hyperedges.append(frozenset(bits_of(cm)))
        else:
            outside = full & ~cm
            v = (outside & -outside).bit_length() - 1
            hyperedges.append(frozenset(bits_of(cm)) | {v})
    return ConnectingHypergraph(g, hyperedges)


def lower_bound(g: Graph) -> int:
    """Certified lower bound on the optimum: the best of ``ceil(2*tau/3)``,
    ``n - 2`` when a cut vertex exists, and 1 for any incomplete graph."""
    if not g.is_connected():
        raise DisconnectedGraphError("lower_bound requires a connected graph")
    if g.n <= 1:
        return 0
    best = math.ceil(2 * tau(g) / 3)
    if g.n >= 3 and cut_vertices(g):
        best = max(best, g.n - 2)
    if not g.is_complete():
        best = max(best, 1)
    return best


def ochg_instance(g: Graph, **kwargs) -> CoverInstance:
    """The optimal-connecting-hypergraph instance: cover all non-edges by
    connected hyperedges."""
    non_edges = [
        (u, v)
        for u in range(g.n)
        for v in range(u + 1, g.n)
        if not g.adjacent(u, v)
    ]
    return CoverInstance(g, frozenset(non_edges), mode="connected", **kwargs)


def exact_min_transitions(g: Graph, limit: int | None = None) -> TransitionSet:
    """Guaranteed-minimum connecting transition set by iterative deepening
    over subset sizes of the full transition universe.

    Deliberately independent of the hyperedge machinery; intended for
    small or sparse graphs.  ``limit`` caps the subset size tried (the
    default ``n - 2`` always suffices).
    """
    if not g.is_connected():
        raise DisconnectedGraphError("exact search requires a connected graph")
    if g.n <= 2:
        return TransitionSet(g, ())
    edges = g.sorted_edges()
    eidx = {e: i for i, e in enumerate(edges)}
    ne = len(edges)
    universe = sorted(enumerate_transitions(g).transitions, key=lambda t: (t.b, t.a, t.c))
    tpairs = [(eidx[t.edge_pair[0]], eidx[t.edge_pair[1]]) for t in universe]
    nt = len(tpairs)

    incident: list[list[int]] = [[] for _ in range(g.n)]
    for i, (u, v) in enumerate(edges):
        incident[u].append(i)
        incident[v].append(i)
    targets = [
        (u, v)
        for u in range(g.n)
        for v in range(u + 1, g.n)
        if not g.adjacent(u, v)
    ]

    def connecting(parent: list[int]) -> bool:
        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for u, v in targets:
            roots = {find(e) for e in incident[u]}
            if not any(find(e) in roots for e in incident[v]):
                return False
        return True

    # Edge partition forced by each candidate suffix, for the optimistic
    # closure prune: a branch is dead when even taking every remaining
    # transition cannot connect the graph.
    suffix_groups: list[list[list[int]]] = [[] for _ in range(nt + 1)]
    uf = _UnionFind(ne)
    for i in range(nt - 1, -1, -1):
        uf2 = _UnionFind(ne)
        uf2.parent = uf.parent[:]
        uf2.union(*tpairs[i])
        uf = uf2
        groups: dict[int, list[int]] = {}
        for e in range(ne):
            groups.setdefault(uf.find(e), []).append(e)
        suffix_groups[i] = [grp for grp in groups.values() if len(grp) > 1]

    cap = g.n - 2 if limit is None else min(limit, g.n - 2)

    def closure_ok(parent: list[int], start: int) -> bool:
        trial = parent[:]

        def find(x):
            while trial[x] != x:
                trial[x] = trial[trial[x]]
                x = trial[x]
            return x

        for grp in suffix_groups[start]:
            r = find(grp[0])
            for e in grp[1:]:
                r2 = find(e)
                if r2 != r:
                    trial[max(r, r2)] = min(r, r2)
                    r = min(r, r2)
        return connecting(trial)

    def dfs(start: int, depth: int, parent: list[int], chosen: list[int]):
        if depth == 0:
            return list(chosen) if connecting(parent) else None
        if nt - start < depth:
            return None
        if not closure_ok(parent, start):
            return None

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for i in range(start, nt):
            if nt - i < depth:
                break
            a, b = tpairs[i]
            ra, rb = find(a), find(b)
            if ra == rb:
                continue  # minimal subsets never carry a redundant merge
            p2 = parent[:]
            p2[max(ra, rb)] = min(ra, rb)
            chosen.append(i)
            hit = dfs(i + 1, depth - 1, p2, chosen)
            if hit is not None:
                return hit
            chosen.pop()
        return None

    for k in range(cap + 1):
        hit = dfs(0, k, list(range(ne)), [])
        if hit is not None:
            return TransitionSet(g, [universe[i] for i in hit])
    raise SearchLimitError(f"no connecting subset within size cap {cap}")


@dataclass(frozen=True)
class SolveReport:
    """Solver outcome: a connecting transition set, the hypergraph it came
    from, the certified bounds, and how the answer was obtained."""

    transition_set: TransitionSet
    hypergraph: ConnectingHypergraph
    cost: int
    lower_bound: int
    optimal: bool
    method: str

    def __post_init__(self):
        if self.optimal and self.lower_bound != self.cost:
            raise ValueError("an optimal report must have lower_bound == cost")
        if self.lower_bound > self.cost:
            raise ValueError("lower_bound may not exceed cost")

    def to_json_dict(self) -> dict:
        return {
            "cost": self.cost,
            "lower_bound": self.lower_bound,
            "optimal": self.optimal,
            "method": self.method,
            "transitions": [[t.a, t.b, t.c] for t in self.transition_set],
            "hyperedges": [sorted(e) for e in self.hypergraph.hyperedges],
        }


def _report(g, hypergraph, lb, optimal, method) -> SolveReport:
    tset = hypergraph_to_transitions(g, hypergraph)
    c = cost(hypergraph)
    if not is_t_connected(g, tset):
        raise AssertionError("conversion produced a non-connecting set")
    return SolveReport(tset, hypergraph, c, lb, optimal, method)


def solve(g: Graph, mode: str = "auto", budget: int | None = None) -> SolveReport:
    """Solve one graph.

    ``heuristic``/``auto``: trees and cut-vertex graphs are answered
    optimally right away; otherwise the co-component heuristic runs and is
    marked optimal when it meets the lower bound.  ``exact`` additionally
    runs the exact cover engine within ``budget`` search nodes, degrading
    to the heuristic answer when the budget runs out.
    """
    if mode not in ("auto", "heuristic", "exact"):
        raise ValueError(f"unknown mode {mode!r}")
    if not g.is_connected():
        raise DisconnectedGraphError("solve requires a connected graph")
    if g.n <= 1:
        empty = ConnectingHypergraph(g, ())
        return SolveReport(TransitionSet(g, ()), empty, 0, 0, True, "certified")

    lb = lower_bound(g)
    if g.m == g.n - 1:
        hg = ConnectingHypergraph(g, [frozenset(range(g.n))])
        tset = tree_transition_set(g)
        return SolveReport(tset, hg, g.n - 2, lb, True, "tree")
    if g.n >= 3 and cut_vertices(g):
        hg = ConnectingHypergraph(g, [frozenset(range(g.n))])
        return _report(g, hg, lb, True, "cut_vertex")

    hg = tau_heuristic_hypergraph(g)
    heur_cost = cost(hg)
    if heur_cost == lb:
        return _report(g, hg, lb, True, "certified")
    if mode in ("auto", "heuristic"):
        return _report(g, hg, lb, False, "heuristic")

    result = min_cost_cover(ochg_instance(g), budget=budget)
    if result.optimal:
        exact_hg = ConnectingHypergraph(g, result.hyperedges)
        report = validate_connecting(g, exact_hg)
        if not report.valid:
            raise AssertionError(f"exact engine produced an invalid cover: {report.violations[0]}")
        return _report(g, exact_hg, result.cost, True, "exact")
    # Budget ran out: fall back to the better of incumbent and heuristic.
    if result.cost < heur_cost:
        exact_hg = ConnectingHypergraph(g, result.hyperedges)
        if validate_connecting(g, exact_hg).valid:
            return _report(g, exact_hg, lb, False, "heuristic")
    return _report(g, hg, lb, False, "heuristic")
