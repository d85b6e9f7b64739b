"""Simple undirected graphs: text I/O, structural queries, named families.

Vertices are dense integers ``0..n-1``.  Adjacency is kept as one integer
bitmask per vertex, which is what the search engines in :mod:`transet.cover`
and :mod:`transet.solvers` operate on.  Graphs are immutable after
construction; every query is read-only and safe to share between threads.
"""

from __future__ import annotations

import heapq
import random
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Iterator


class FormatError(ValueError):
    """Malformed text input (graph, transition or hyperedge files)."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class DisconnectedGraphError(ValueError):
    """An operation that needs a connected graph was given a disconnected one."""


def bits_of(mask: int) -> Iterator[int]:
    """Yield the set bit positions of ``mask`` in ascending order."""
    while mask:
        b = mask & -mask
        yield b.bit_length() - 1
        mask ^= b


def mask_components(mask: int, adj: tuple[int, ...] | list[int]) -> list[int]:
    """Connected components of the subgraph induced by ``mask``, as masks.

    Components are ordered by their lowest vertex.
    """
    comps = []
    todo = mask
    while todo:
        start = todo & -todo
        seen = start
        frontier = start
        while frontier:
            grow = 0
            for v in bits_of(frontier):
                grow |= adj[v]
            frontier = grow & mask & ~seen
            seen |= frontier
        comps.append(seen)
        todo &= ~seen
    return comps


def mask_is_connected(mask: int, adj: tuple[int, ...] | list[int]) -> bool:
    """True when the subgraph induced by ``mask`` is connected (or empty)."""
    if mask == 0:
        return True
    start = mask & -mask
    seen = start
    frontier = start
    while frontier:
        grow = 0
        for v in bits_of(frontier):
            grow |= adj[v]
        frontier = grow & mask & ~seen
        seen |= frontier
    return seen == mask


class Graph:
    """Immutable simple undirected graph (no loops, no parallel edges)."""

    __slots__ = ("n", "edges", "adj")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]] = ()):
        if n < 0:
            raise ValueError("vertex count must be nonnegative")
        adj = [0] * n
        canon = set()
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range for n={n}")
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            e = (u, v) if u < v else (v, u)
            if e in canon:
                raise ValueError(f"duplicate edge {e}")
            canon.add(e)
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        self.n = n
        self.edges = frozenset(canon)
        self.adj = tuple(adj)

    @property
    def m(self) -> int:
        return len(self.edges)

    def full_mask(self) -> int:
        return (1 << self.n) - 1

    def adjacent(self, u: int, v: int) -> bool:
        return bool(self.adj[u] >> v & 1)

    def degree(self, v: int) -> int:
        return self.adj[v].bit_count()

    def neighbors(self, v: int) -> list[int]:
        return list(bits_of(self.adj[v]))

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def is_connected(self) -> bool:
        return self.n <= 1 or mask_is_connected(self.full_mask(), self.adj)

    def is_complete(self) -> bool:
        return self.m == self.n * (self.n - 1) // 2

    def __eq__(self, other) -> bool:
        return isinstance(other, Graph) and self.n == other.n and self.edges == other.edges

    def __hash__(self) -> int:
        return hash((self.n, self.edges))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


@dataclass(frozen=True)
class VertexPartition:
    """Disjoint nonempty vertex blocks covering 0..n-1.

    Blocks are ordered by their smallest member, members ascending.
    """

    n: int
    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        seen = 0
        prev_first = -1
        for block in self.blocks:
            if not block:
                raise ValueError("empty block")
            if list(block) != sorted(set(block)):
                raise ValueError("block members must be ascending and distinct")
            if block[0] <= prev_first:
                raise ValueError("blocks must be ordered by smallest member")
            prev_first = block[0]
            bmask = 0
            for v in block:
                bmask |= 1 << v
            if bmask & seen:
                raise ValueError("blocks must be disjoint")
            seen |= bmask
        if seen != (1 << self.n) - 1:
            raise ValueError("blocks must cover all vertices")

    def __iter__(self):
        return iter(self.blocks)

    def __len__(self) -> int:
        return len(self.blocks)


def parse_graph(text: str) -> Graph:
    """Parse the edge-list format: header ``n m``, then ``m`` lines ``u v``.

    Lines starting with ``#`` and blank lines are ignored.  Every violation
    (bad header, out-of-range vertex, self-loop, duplicate edge) is reported
    with its line number.
    """
    header: tuple[int, int] | None = None
    edges: list[tuple[int, int]] = []
    seen: set[tuple[int, int]] = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if header is None:
            if len(parts) != 2:
                raise FormatError("header must be 'n m'", lineno)
            try:
                n, m = int(parts[0]), int(parts[1])
            except ValueError:
                raise FormatError("header must contain two integers", lineno) from None
            if n < 0 or m < 0:
                raise FormatError("header counts must be nonnegative", lineno)
            header = (n, m)
            continue
        if len(parts) != 2:
            raise FormatError("edge line must be 'u v'", lineno)
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise FormatError("edge line must contain two integers", lineno) from None
        n = header[0]
        if not (0 <= u < n and 0 <= v < n):
            raise FormatError(f"vertex out of range in edge ({u}, {v})", lineno)
        if u == v:
            raise FormatError(f"self-loop at vertex {u}", lineno)
        e = (u, v) if u < v else (v, u)
        if e in seen:
            raise FormatError(f"duplicate edge {e}", lineno)
        seen.add(e)
        if len(edges) >= header[1]:
            raise FormatError("more edge lines than the header announced", lineno)
        edges.append(e)
    if header is None:
        raise FormatError("missing header line")
    if len(edges) != header[1]:
        raise FormatError(f"expected {header[1]} edges, found {len(edges)}")
    return Graph(header[0], edges)


def format_graph(g: Graph) -> str:
    """Serialize a graph; edges sorted lexicographically (stable golden output)."""
    lines = [f"{g.n} {g.m}"]
    lines.extend(f"{u} {v}" for u, v in g.sorted_edges())
    return "\n".join(lines) + "\n"


def to_dot(g: Graph, name: str = "g") -> str:
    """Plain structural DOT dump (no layout attributes)."""
    lines = [f"graph {name} {{"]
    lines.extend(f"  {v};" for v in range(g.n))
    lines.extend(f"  {u} -- {v};" for u, v in g.sorted_edges())
    lines.append("}")
    return "\n".join(lines) + "\n"


def complement(g: Graph) -> Graph:
    """Complement graph: same vertices, exactly the missing unordered pairs."""
    edges = [e for e in combinations(range(g.n), 2) if e not in g.edges]
    return Graph(g.n, edges)


def connected_components(g: Graph) -> VertexPartition:
    masks = mask_components(g.full_mask(), g.adj)
    return VertexPartition(g.n, tuple(tuple(bits_of(m)) for m in masks))


def co_connected_components(g: Graph) -> VertexPartition:
    """Co-connected components: the connected components of the complement."""
    return connected_components(complement(g))


def cut_vertices(g: Graph) -> frozenset[int]:
    """All vertices whose removal disconnects ``g`` (input must be connected)."""
    if not g.is_connected():
        raise DisconnectedGraphError("cut_vertices requires a connected graph")
    cuts = []
    full = g.full_mask()
    for v in range(g.n):
        rest = full & ~(1 << v)
        if rest and len(mask_components(rest, g.adj)) > 1:
            cuts.append(v)
    return frozenset(cuts)


def spanning_tree(g: Graph) -> frozenset[tuple[int, int]]:
    """Deterministic spanning tree: lowest-neighbor-first traversal from vertex 0."""
    if not g.is_connected():
        raise DisconnectedGraphError("spanning_tree requires a connected graph")
    if g.n <= 1:
        return frozenset()
    tree = []
    seen = 1
    queue = [0]
    while queue:
        u = queue.pop(0)
        for v in bits_of(g.adj[u] & ~seen):
            seen |= 1 << v
            tree.append((min(u, v), max(u, v)))
            queue.append(v)
    return frozenset(tree)


# --- named families -------------------------------------------------------

def path_graph(k: int) -> Graph:
    if k <= 0:
        raise ValueError("path size must be positive")
    return Graph(k, [(i, i + 1) for i in range(k - 1)])


def cycle_graph(k: int) -> Graph:
    if k < 3:
        raise ValueError("cycle size must be at least 3")
    return Graph(k, [(i, (i + 1) % k) for i in range(k)])


def complete_graph(k: int) -> Graph:
    if k <= 0:
        raise ValueError("complete graph size must be positive")
    return Graph(k, combinations(range(k), 2))


def path_complement(k: int) -> Graph:
    """Complement of the k-vertex path; k=7 is the running small example."""
    return complement(path_graph(k))


def spider_graph(n: int) -> Graph:
    """Tree with a center and ``n`` branches of 3 edges each (3n+1 vertices)."""
    if n <= 0:
        raise ValueError("branch count must be positive")
    edges = []
    for i in range(n):
        a, b, c = 3 * i + 1, 3 * i + 2, 3 * i + 3
        edges += [(0, a), (a, b), (b, c)]
    return Graph(3 * n + 1, edges)


def spider_complement(n: int) -> Graph:
    """Complement of the 3-edge-branch spider; the tightness family for the
    upper-bound heuristic (heuristic cost 3n-1 versus optimum 2n)."""
    return complement(spider_graph(n))


def random_tree(n: int, seed: int) -> Graph:
    """Uniform random labelled tree from a Pruefer sequence; fixed per seed."""
    if n <= 0:
        raise ValueError("tree size must be positive")
    if n == 1:
        return Graph(1)
    if n == 2:
        return Graph(2, [(0, 1)])
    rng = random.Random(seed)
    prufer = [rng.randrange(n) for _ in range(n - 2)]
    degree = [1] * n
    for v in prufer:
        degree[v] += 1
    leaf_heap = [v for v in range(n) if degree[v] == 1]
    heapq.heapify(leaf_heap)
    edges = []
    for v in prufer:
        leaf = heapq.heappop(leaf_heap)
        edges.append((min(leaf, v), max(leaf, v)))
        degree[leaf] -= 1
        degree[v] -= 1
        if degree[v] == 1:
            heapq.heappush(leaf_heap, v)
    u, v = heapq.heappop(leaf_heap), heapq.heappop(leaf_heap)
    edges.append((min(u, v), max(u, v)))
    return Graph(n, edges)


FAMILIES = {
    "path": (path_graph, 1),
    "cycle": (cycle_graph, 1),
    "complete": (complete_graph, 1),
    "path_complement": (path_complement, 1),
    "spider_complement": (spider_complement, 1),
    "random_tree": (random_tree, 2),
}


def generate(family: str, *params: int) -> Graph:
    """Build a named family graph; ``family`` as in :data:`FAMILIES`."""
    key = family.replace("-", "_")
    if key not in FAMILIES:
        raise ValueError(f"unknown family {family!r}; known: {', '.join(sorted(FAMILIES))}")
    fn, arity = FAMILIES[key]
    if len(params) != arity:
        raise ValueError(f"family {family!r} takes {arity} parameter(s)")
    return fn(*params)
