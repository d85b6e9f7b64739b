"""Transitions, compatible walks, and transition-connectivity.

A transition ``abc`` is the unordered pair of adjacent edges ``{ab, bc}``.
A walk is compatible with a transition set when every consecutive edge pair
it uses is a permitted transition or an immediate backtrack (``v_i ==
v_{i+2}``).  Because backtracking is free, whether two vertices are joined
by a compatible walk only depends on which *edges* can follow each other:
the decision procedure works on connected components of the edge set under
the relation "these two edges form a permitted transition", via union-find.
Its correctness is pinned against the deliberately naive state-search
oracle below.
"""

from __future__ import annotations

from typing import Iterable, NamedTuple

from .graphs import FormatError, Graph, bits_of


class Transition(NamedTuple):
    """Permitted transition with middle vertex ``b`` and ends ``a < c``."""

    a: int
    b: int
    c: int

    @classmethod
    def of(cls, x: int, b: int, y: int) -> "Transition":
        return cls(min(x, y), b, max(x, y))

    @property
    def edge_pair(self) -> tuple[tuple[int, int], tuple[int, int]]:
        a, b, c = self
        return ((min(a, b), max(a, b)), (min(b, c), max(b, c)))


class TransitionSet:
    """A set of transitions over a host graph, kept in canonical form."""

    __slots__ = ("host", "transitions")

    def __init__(self, host: Graph, transitions: Iterable[Transition | tuple[int, int, int]] = ()):
        canon = set()
        for t in transitions:
            a, b, c = t
            t = Transition.of(a, b, c)
            if t.a == t.c:
                raise ValueError(f"degenerate transition {t}")
            for u, v in t.edge_pair:
                if not host.adjacent(u, v):
                    raise ValueError(f"transition {t} uses missing edge ({u}, {v})")
            canon.add(t)
        self.host = host
        self.transitions = frozenset(canon)

    def __len__(self) -> int:
        return len(self.transitions)

    def __iter__(self):
        return iter(sorted(self.transitions, key=lambda t: (t.b, t.a, t.c)))

    def __contains__(self, t) -> bool:
        a, b, c = t
        return Transition.of(a, b, c) in self.transitions

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, TransitionSet)
            and self.host == other.host
            and self.transitions == other.transitions
        )

    def __hash__(self) -> int:
        return hash((self.host, self.transitions))

    def __repr__(self) -> str:
        return f"TransitionSet({len(self.transitions)} transitions)"


class Walk:
    """Vertex sequence; consecutive vertices must be adjacent in the host."""

    __slots__ = ("vertices",)

    def __init__(self, vertices: Iterable[int]):
        self.vertices = tuple(vertices)
        if not self.vertices:
            raise ValueError("a walk has at least one vertex")

    def is_walk_of(self, g: Graph) -> bool:
        vs = self.vertices
        if any(not 0 <= v < g.n for v in vs):
            return False
        return all(g.adjacent(vs[i], vs[i + 1]) for i in range(len(vs) - 1))

    def __len__(self) -> int:
        return len(self.vertices)

    def __eq__(self, other) -> bool:
        return isinstance(other, Walk) and self.vertices == other.vertices

    def __hash__(self) -> int:
        return hash(self.vertices)

    def __repr__(self) -> str:
        return f"Walk{self.vertices}"


def enumerate_transitions(g: Graph) -> TransitionSet:
    """All transitions of ``g``: for each vertex, every pair of its edges."""
    trans = []
    for b in range(g.n):
        nbrs = g.neighbors(b)
        for i in range(len(nbrs)):
            for j in range(i + 1, len(nbrs)):
                trans.append(Transition(nbrs[i], b, nbrs[j]))
    return TransitionSet(g, trans)


def walk_is_compatible(g: Graph, t: TransitionSet, w: Walk) -> bool:
    """True when every consecutive triple of ``w`` with distinct outer
    vertices is a permitted transition.  Walks of at most two vertices are
    always compatible."""
    if not w.is_walk_of(g):
        raise ValueError(f"{w!r} is not a walk of the graph")
    vs = w.vertices
    for i in range(len(vs) - 2):
        x, b, y = vs[i], vs[i + 1], vs[i + 2]
        if x != y and Transition.of(x, b, y) not in t.transitions:
            return False
    return True


def _edge_index(g: Graph) -> tuple[list[tuple[int, int]], dict[tuple[int, int], int]]:
    edges = g.sorted_edges()
    return edges, {e: i for i, e in enumerate(edges)}


class _UnionFind:
    __slots__ = ("parent",)

    def __init__(self, size: int):
        self.parent = list(range(size))

    def find(self, x: int) -> int:
        p = self.parent
        while p[x] != x:
            p[x] = p[p[x]]
            x = p[x]
        return x

    def union(self, x: int, y: int) -> bool:
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return False
        if rx > ry:
            rx, ry = ry, rx
        self.parent[ry] = rx
        return True


def _edge_component_masks(g: Graph, t: TransitionSet):
    """Union-find closure of the edges of ``g`` under the transitions of ``t``.

    Returns (edges, edge index map, union-find, root -> induced vertex mask).
    """
    edges, eidx = _edge_index(g)
    uf = _UnionFind(len(edges))
    for tr in t.transitions:
        e1, e2 = tr.edge_pair
        uf.union(eidx[e1], eidx[e2])
    vmask: dict[int, int] = {}
    for i, (u, v) in enumerate(edges):
        r = uf.find(i)
        vmask[r] = vmask.get(r, 0) | (1 << u) | (1 << v)
    return edges, eidx, uf, vmask


def is_t_connected(g: Graph, t: TransitionSet) -> bool:
    """Decide whether every vertex pair is joined by a compatible walk."""
    return first_uncovered_pair(g, t) is None


def first_uncovered_pair(g: Graph, t: TransitionSet) -> tuple[int, int] | None:
    """Lowest vertex pair with no compatible walk, or None when connected.

    A pair is joined exactly when it is an edge or some edge at one end lies
    in the same transition-closure component as some edge at the other.
    """
    if t.host != g:
        raise ValueError("transition set belongs to a different host graph")
    if g.n <= 1:
        return None
    edges, _, uf, vmask = _edge_component_masks(g, t)
    roots = sorted(vmask)
    root_bit = {r: i for i, r in enumerate(roots)}
    comps_at = [0] * g.n
    for i, (u, v) in enumerate(edges):
        bit = 1 << root_bit[uf.find(i)]
        comps_at[u] |= bit
        comps_at[v] |= bit
    for u in range(g.n):
        rest = ~g.adj[u] & (g.full_mask() << (u + 1)) & g.full_mask()
        for v in bits_of(rest):
            if not comps_at[u] & comps_at[v]:
                return (u, v)
    return None


def t_reachable(g: Graph, t: TransitionSet, source: int) -> tuple[frozenset[int], dict[int, Walk]]:
    """Vertices reachable from ``source`` by compatible walks, with witnesses.

    Witness walks may revisit vertices and use free backtracks; no attempt
    is made to shorten them.
    """
    if t.host != g:
        raise ValueError("transition set belongs to a different host graph")
    if not 0 <= source < g.n:
        raise ValueError(f"source {source} out of range")
    edges, eidx = _edge_index(g)

    # Edge adjacency induced by the permitted transitions.
    edge_nbrs: dict[int, list[tuple[int, int]]] = {}
    for tr in sorted(t.transitions, key=lambda x: (x.b, x.a, x.c)):
        e1, e2 = tr.edge_pair
        i, j = eidx[e1], eidx[e2]
        edge_nbrs.setdefault(i, []).append((j, tr.b))
        edge_nbrs.setdefault(j, []).append((i, tr.b))

    start_edges = sorted(eidx[(min(source, v), max(source, v))] for v in g.neighbors(source))
    parent: dict[int, tuple[int, int] | None] = {e: None for e in start_edges}
    order = list(start_edges)
    qi = 0
    while qi < len(order):
        e = order[qi]
        qi += 1
        for f, mid in edge_nbrs.get(e, ()):
            if f not in parent:
                parent[f] = (e, mid)
                order.append(f)

    def edge_chain(e: int) -> list[int]:
        chain = [e]
        while parent[chain[-1]] is not None:
            chain.append(parent[chain[-1]][0])
        chain.reverse()
        return chain

    def build_walk(target: int, via: int) -> Walk:
        chain = edge_chain(via)
        walk = [source]
        pos = source
        for k in range(len(chain) - 1):
            mid = parent[chain[k + 1]][1]
            u, v = edges[chain[k]]
            if pos == mid:
                other = v if u == mid else u
                walk += [other, mid]
            else:
                walk.append(mid)
            pos = mid
        u, v = edges[chain[-1]]
        if pos != target:
            if pos not in (u, v):
                raise AssertionError("witness reconstruction lost its position")
            walk.append(target)
        return Walk(walk)

    reach: dict[int, Walk] = {source: Walk((source,))}
    for e in order:
        for v in edges[e]:
            if v not in reach:
                reach[v] = build_walk(v, e)
    return frozenset(reach), reach


def oracle_is_t_connected(g: Graph, t: TransitionSet) -> bool:
    """Ground-truth connectivity check by breadth-first search over states
    (current vertex, entering edge).  Deliberately naive; used in tests to
    pin the union-find checker."""
    if t.host != g:
        raise ValueError("transition set belongs to a different host graph")
    n = g.n
    if n <= 1:
        return True
    for s in range(n):
        seen_states = set()
        reached = {s}
        stack = []
        for w in g.neighbors(s):
            stack.append((w, s))
        while stack:
            v, u = stack.pop()
            if (v, u) in seen_states:
                continue
            seen_states.add((v, u))
            reached.add(v)
            for w in g.neighbors(v):
                if w == u or Transition.of(u, v, w) in t.transitions:
                    if (w, v) not in seen_states:
                        stack.append((w, v))
        if len(reached) != n:
            return False
    return True


def transitions_to_hypergraph(g: Graph, t: TransitionSet):
    """Convert a connecting transition set into a connecting hypergraph.

    Transitions sharing an edge are grouped by the transitive closure of
    that relation; each group's induced vertex set becomes a hyperedge.
    The result is valid and costs at most ``len(t)``.
    """
    from .hypergraphs import ConnectingHypergraph

    if t.host != g:
        raise ValueError("transition set belongs to a different host graph")
    if not is_t_connected(g, t):
        raise ValueError("transition set is not connecting; conversion undefined")
    trans = sorted(t.transitions, key=lambda x: (x.b, x.a, x.c))
    uf = _UnionFind(len(trans))
    by_edge: dict[tuple[int, int], int] = {}
    for i, tr in enumerate(trans):
        for e in tr.edge_pair:
            if e in by_edge:
                uf.union(by_edge[e], i)
            else:
                by_edge[e] = i
    groups: dict[int, set[int]] = {}
    for i, tr in enumerate(trans):
        groups.setdefault(uf.find(i), set()).update(tr)
    hyperedges = [frozenset(vs) for _, vs in sorted(groups.items())]
    return ConnectingHypergraph(g, hyperedges)


def parse_transitions(text: str, host: Graph) -> TransitionSet:
    """Parse transition lines ``a b c`` (middle ``b``); ``#`` comments allowed."""
    trans = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 3:
            raise FormatError("transition line must be 'a b c'", lineno)
        try:
            a, b, c = (int(p) for p in parts)
        except ValueError:
            raise FormatError("transition line must contain three integers", lineno) from None
        if not all(0 <= x < host.n for x in (a, b, c)):
            raise FormatError(f"vertex out of range in transition ({a}, {b}, {c})", lineno)
        try:
            TransitionSet(host, [(a, b, c)])
        except ValueError as exc:
            raise FormatError(str(exc), lineno) from None
        trans.append((a, b, c))
    return TransitionSet(host, trans)


def format_transitions(t: TransitionSet) -> str:
    """Canonical serialization, sorted by (middle, low end, high end)."""
    return "".join(f"{tr.a} {tr.b} {tr.c}\n" for tr in t)
