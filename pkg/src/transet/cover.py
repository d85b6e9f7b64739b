"""Exact minimum-cost hyperedge covers by branch and bound.

The generic problem: cover every required vertex pair by some hyperedge,
where hyperedges must stay inside a candidate universe, be admissible
(induce a connected subgraph, or a co-connected one, depending on mode),
have at least two vertices, avoid all forbidden pairs, and the family
minimizes ``sum(|E| - 2)``.

Two engines share the work:

* small universes are solved by enumerating every admissible subset once
  and running a memoized exact set-cover search over required-pair masks;
* larger universes run a partition search that assigns required pairs to
  growing hyperedges, with an admissible lower bound built from exact
  solutions of zone-restricted subproblems (a caller-supplied vertex
  partition; each zone plus one synthetic "outside" vertex is solved by
  the small engine).  Hyperedges are completed to admissibility at the
  leaves by a minimum-size vertex addition.

Both engines are deterministic: branch orders, tie-breaks and witnesses
are fixed functions of the instance.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

from .graphs import Graph, bits_of, mask_is_connected

SMALL_UNIVERSE_LIMIT = 15
_INF = 10**9


class InfeasibleInstanceError(ValueError):
    """No hyperedge family can satisfy the instance (or its cost cap)."""


class BudgetExhaustedError(RuntimeError):
    """The node budget ran out before any feasible cover was found."""


class _Exhausted(Exception):
    pass


class _Budget:
    __slots__ = ("left", "used")

    def __init__(self, limit: int | None):
        self.left = limit
        self.used = 0

    def tick(self, amount: int = 1):
        self.used += amount
        if self.left is not None:
            self.left -= amount
            if self.left < 0:
                raise _Exhausted


def _norm_pairs(pairs) -> frozenset[tuple[int, int]]:
    out = set()
    for u, v in pairs:
        if u == v:
            raise ValueError(f"degenerate pair ({u}, {v})")
        out.add((u, v) if u < v else (v, u))
    return frozenset(out)


@dataclass(frozen=True)
class CoverInstance:
    """One "cover required pairs by admissible hyperedges" problem.

    ``mode`` is ``"connected"`` or ``"co_connected"``.  ``zones`` is an
    optional decomposition hint (disjoint vertex groups) used only to
    strengthen the lower bound on large universes; it never changes the
    answer.  ``require_host_connected`` additionally restricts hyperedges
    to induce connected subgraphs of the host (experimental, off by
    default).
    """

    host: Graph
    required_pairs: frozenset[tuple[int, int]]
    mode: str = "connected"
    forbidden_pairs: frozenset[tuple[int, int]] = frozenset()
    universe: frozenset[int] | None = None
    upper_bound: int | None = None
    zones: tuple[frozenset[int], ...] = ()
    require_host_connected: bool = False

    def __post_init__(self):
        object.__setattr__(self, "required_pairs", _norm_pairs(self.required_pairs))
        object.__setattr__(self, "forbidden_pairs", _norm_pairs(self.forbidden_pairs))
        if self.mode not in ("connected", "co_connected"):
            raise ValueError(f"unknown mode {self.mode!r}")
        uni = self.universe
        if uni is None:
            uni = frozenset(range(self.host.n))
        else:
            uni = frozenset(uni)
            for v in uni:
                if not 0 <= v < self.host.n:
                    raise ValueError(f"universe vertex {v} out of range")
        object.__setattr__(self, "universe", uni)
        if self.required_pairs & self.forbidden_pairs:
            raise ValueError("required and forbidden pairs must be disjoint")
        for u, v in self.required_pairs:
            if u not in uni or v not in uni:
                raise ValueError(f"required pair ({u}, {v}) outside the universe")
        seen = set()
        zones = []
        for z in self.zones:
            z = frozenset(z) & uni
            if z & frozenset(seen):
                raise ValueError("zones must be disjoint")
            seen |= z
            if z:
                zones.append(z)
        object.__setattr__(self, "zones", tuple(zones))


@dataclass(frozen=True)
class CoverResult:
    cost: int
    hyperedges: tuple[frozenset[int], ...]
    optimal: bool
    nodes: int


def _mode_adj(host: Graph, mode: str) -> list[int]:
    if mode == "connected":
        return list(host.adj)
    full = host.full_mask()
    return [~host.adj[v] & full & ~(1 << v) for v in range(host.n)]


class _SmallEngine:
    """Exact cover over an explicitly enumerated admissible-set catalogue.

    Vertices are local ids ``0..k-1``; pairs are indexed bits.  ``solve``
    memoizes the exact minimum cost per uncovered-pair mask and records the
    chosen set for witness reconstruction.
    """

    def __init__(
        self,
        k: int,
        prim_adj: list[int],
        pairs: list[int],
        forbidden: list[int],
        budget: _Budget,
        extra_adj: list[int] | None = None,
    ):
        self.k = k
        self.pairs = pairs
        self.budget = budget
        self.memo: dict[int, tuple[int, int | None]] = {0: (0, None)}

        sets_by_cov: dict[int, tuple[int, int]] = {}
        npairs = len(pairs)
        for mask in range(3, 1 << k):
            pc = mask.bit_count()
            if pc < 2:
                continue
            if any(fb & mask == fb for fb in forbidden):
                continue
            cov = 0
            for i in range(npairs):
                if pairs[i] & mask == pairs[i]:
                    cov |= 1 << i
            if not cov:
                continue
            if not mask_is_connected(mask, prim_adj):
                continue
            if extra_adj is not None and not mask_is_connected(mask, extra_adj):
                continue
            entry = (pc - 2, mask)
            old = sets_by_cov.get(cov)
            if old is None or entry < old:
                sets_by_cov[cov] = entry

        self.catalogue = sorted(
            (cost, cov, mask) for cov, (cost, mask) in sets_by_cov.items()
        )
        self.by_pair: list[list[tuple[int, int, int]]] = [[] for _ in range(npairs)]
        for entry in self.catalogue:
            _, cov, _ = entry
            for i in bits_of(cov):
                self.by_pair[i].append(entry)

        self.free_mask = 0
        best_ratio = 0.0
        for cost, cov, _ in self.catalogue:
            if cost == 0:
                self.free_mask |= cov
            else:
                best_ratio = max(best_ratio, cov.bit_count() / cost)
        self.ratio = best_ratio

    def lower_bound(self, pairmask: int) -> int:
        need = (pairmask & ~self.free_mask).bit_count()
        if need == 0:
            return 0
        if self.ratio == 0:
            return _INF
        return _ceil_div_ratio(need, self.ratio)

    def solve(self, pairmask: int) -> int:
        hit = self.memo.get(pairmask)
        if hit is not None:
            return hit[0]
        self.budget.tick()
        branch = (pairmask & -pairmask).bit_length() - 1
        best = _INF
        best_cov = None
        floor = self.lower_bound(pairmask)
        for cost, cov, _ in self.by_pair[branch]:
            if cost >= best:
                break
            val = cost + self.solve(pairmask & ~cov)
            if val < best:
                best, best_cov = val, cov
                if best <= floor:
                    break
        self.memo[pairmask] = (best, best_cov)
        return best

    def witness(self, pairmask: int) -> list[int]:
        """Local set masks of one optimal cover for ``pairmask``."""
        if self.solve(pairmask) >= _INF:
            raise InfeasibleInstanceError("no admissible cover exists")
        out = []
        while pairmask:
            _, cov = self.memo[pairmask]
            for cost, c, mask in self.by_pair[(pairmask & -pairmask).bit_length() - 1]:
                if c == cov:
                    out.append(mask)
                    break
            pairmask &= ~cov
        return out


def _ceil_div_ratio(need: int, ratio: float) -> int:
    return math.ceil(need / ratio - 1e-9)


def _pair_mask(u: int, v: int) -> int:
    return (1 << u) | (1 << v)


def _solve_small(inst: CoverInstance, budget: _Budget) -> CoverResult:
    verts = sorted(inst.universe)
    loc = {v: i for i, v in enumerate(verts)}
    k = len(verts)
    adj = _mode_adj(inst.host, inst.mode)
    prim = [0] * k
    for i, v in enumerate(verts):
        for w in bits_of(adj[v]):
            if w in loc:
                prim[i] |= 1 << loc[w]
    extra = None
    if inst.require_host_connected and inst.mode == "co_connected":
        extra = [0] * k
        for i, v in enumerate(verts):
            for w in bits_of(inst.host.adj[v]):
                if w in loc:
                    extra[i] |= 1 << loc[w]
    req = sorted(inst.required_pairs)
    pairs = [_pair_mask(loc[u], loc[v]) for u, v in req]
    forb = [_pair_mask(loc[u], loc[v]) for u, v in sorted(inst.forbidden_pairs)
            if u in loc and v in loc]
    engine = _SmallEngine(k, prim, pairs, forb, budget, extra)
    full = (1 << len(pairs)) - 1
    cost = engine.solve(full)
    if cost >= _INF:
        raise InfeasibleInstanceError("no admissible cover exists")
    if inst.upper_bound is not None and cost > inst.upper_bound:
        raise InfeasibleInstanceError(
            f"optimal cost {cost} exceeds the cap {inst.upper_bound}")
    sets = tuple(
        frozenset(verts[i] for i in bits_of(mask)) for mask in engine.witness(full)
    )
    return CoverResult(cost, sets, True, budget.used)


class _PartitionSearch:
    """Pair-assignment branch and bound for universes beyond catalogue range."""

    def __init__(self, inst: CoverInstance, budget: _Budget):
        self.inst = inst
        self.budget = budget
        self.host = inst.host
        self.mode_adj = _mode_adj(inst.host, inst.mode)
        self.universe_mask = 0
        for v in inst.universe:
            self.universe_mask |= 1 << v
        self.forb_with = [0] * inst.host.n
        for u, v in inst.forbidden_pairs:
            self.forb_with[u] |= 1 << v
            self.forb_with[v] |= 1 << u

        # Zones: the caller's hint plus the residual vertices, engine-backed
        # whenever small enough for the subset catalogue.
        zones = [set(z) for z in inst.zones]
        residual = set(inst.universe) - set().union(*zones) if zones else set(inst.universe)
        if residual:
            zones.append(residual)
        self.zone_masks = []
        self.zone_engines: list[_SmallEngine | None] = []
        self.zone_verts: list[list[int]] = []
        for z in zones:
            zm = 0
            for v in z:
                zm |= 1 << v
            self.zone_masks.append(zm)
            self.zone_verts.append(sorted(z))
            self.zone_engines.append(None)

        # Pair bookkeeping: order residual-zone pairs and cross pairs first,
        # hinted zones afterwards, ascending inside each bucket.
        req = sorted(inst.required_pairs)
        pair_zone = []
        for u, v in req:
            zid = None
            for i, zm in enumerate(self.zone_masks):
                if zm >> u & 1 and zm >> v & 1:
                    zid = i
                    break
            pair_zone.append(zid)
        resid_id = len(self.zone_masks) - 1 if residual else None

        def bucket(i):
            z = pair_zone[i]
            if z is None:
                return (0, 1)
            if z == resid_id:
                return (0, 0)
            return (1, z)

        order = sorted(range(len(req)), key=lambda i: (bucket(i), req[i]))
        self.pairs = [req[i] for i in order]
        self.pair_zone = [pair_zone[i] for i in order]
        self.pair_masks = [_pair_mask(u, v) for u, v in self.pairs]

        # Zone engines over zone + one synthetic far vertex.
        self.zone_pair_bits: list[dict[int, int]] = []
        for zid, z in enumerate(self.zone_verts):
            bitmap: dict[int, int] = {}
            if len(z) + 1 <= SMALL_UNIVERSE_LIMIT:
                loc = {v: i for i, v in enumerate(z)}
                star = len(z)
                k = star + 1
                prim = [0] * k
                for i, v in enumerate(z):
                    for w in bits_of(self.mode_adj[v]):
                        if w in loc:
                            prim[i] |= 1 << loc[w]
                    prim[i] |= 1 << star
                    prim[star] |= 1 << i
                extra = None
                if inst.require_host_connected and inst.mode == "co_connected":
                    extra = [0] * k
                    for i, v in enumerate(z):
                        for w in bits_of(self.host.adj[v]):
                            if w in loc:
                                extra[i] |= 1 << loc[w]
                        extra[i] |= 1 << star
                        extra[star] |= 1 << i
                zpairs = []
                for pid, (u, v) in enumerate(self.pairs):
                    if self.pair_zone[pid] == zid:
                        bitmap[pid] = len(zpairs)
                        zpairs.append(_pair_mask(loc[u], loc[v]))
                forb = [
                    _pair_mask(loc[u], loc[v])
                    for u, v in sorted(inst.forbidden_pairs)
                    if u in loc and v in loc
                ]
                self.zone_engines[zid] = _SmallEngine(k, prim, zpairs, forb, budget, extra)
            self.zone_pair_bits.append(bitmap)

        self.incumbent = _INF if inst.upper_bound is None else inst.upper_bound + 1
        self.best: tuple[frozenset[int], ...] | None = None
        self.cache: dict[tuple, int] = {}
        self.cache_cap = 2_000_000

    # -- admissibility ----------------------------------------------------

    def _admissible(self, mask: int) -> bool:
        if mask.bit_count() < 2:
            return False
        if not mask_is_connected(mask, self.mode_adj):
            return False
        if self.inst.require_host_connected and not mask_is_connected(mask, self.host.adj):
            return False
        return True

    def _completion(self, mask: int, cap: int) -> int | None:
        """Minimum addition mask making ``mask`` admissible, or None.

        Tries addition sizes in increasing order; ``cap`` bounds the size
        worth trying (anything costing more would not beat the incumbent).
        """
        if self._admissible(mask):
            return 0
        candidates = [
            w
            for w in bits_of(self.universe_mask & ~mask)
            if not self.forb_with[w] & mask
        ]
        for size in range(1, min(len(candidates), cap) + 1):
            for combo in itertools.combinations(candidates, size):
                self.budget.tick()
                add = 0
                ok = True
                for w in combo:
                    if self.forb_with[w] & add:
                        ok = False
                        break
                    add |= 1 << w
                if ok and self._admissible(mask | add):
                    return add
        return None

    # -- bound ------------------------------------------------------------

    def _bound(self, groups: list[int], uncovered: int) -> int:
        zone_un: dict[int, int] = {}
        for pid in bits_of(uncovered):
            z = self.pair_zone[pid]
            if z is not None and self.zone_engines[z] is not None:
                bit = self.zone_pair_bits[z].get(pid)
                if bit is not None:
                    zone_un[z] = zone_un.get(z, 0) | (1 << bit)
        total = 0
        live = 0
        for z, pm in zone_un.items():
            total += self.zone_engines[z].solve(pm)
            live |= self.zone_masks[z]
        if total >= _INF:
            return _INF
        not_imageable = self.universe_mask & ~live
        for gm in groups:
            size = gm.bit_count()
            dead = (gm & not_imageable).bit_count()
            d = min(size - 2, dead - 1)
            if d > 0:
                total += d
        return total

    # -- greedy seed -------------------------------------------------------

    def _seed(self) -> None:
        sets: list[int] = []
        covered = 0
        for zid, engine in enumerate(self.zone_engines):
            if engine is None:
                continue
            bitmap = self.zone_pair_bits[zid]
            if not bitmap:
                continue
            full = 0
            for _, bit in bitmap.items():
                full |= 1 << bit
            if engine.solve(full) >= _INF:
                raise InfeasibleInstanceError(
                    "a zone subproblem is infeasible, so the instance is too")
            z = self.zone_verts[zid]
            star = len(z)
            for lmask in engine.witness(full):
                gmask = 0
                needs_star = bool(lmask >> star & 1)
                for i in bits_of(lmask & ((1 << star) - 1)):
                    gmask |= 1 << z[i]
                if needs_star:
                    repl = None
                    for w in bits_of(self.universe_mask & ~self.zone_masks[zid]):
                        if self.forb_with[w] & gmask:
                            continue
                        if self._admissible(gmask | (1 << w)):
                            repl = w
                            break
                    if repl is None:
                        return
                    gmask |= 1 << repl
                elif not self._admissible(gmask):
                    return
                sets.append(gmask)
        for pid, pm in enumerate(self.pair_masks):
            if any(pm & s == pm for s in sets):
                continue
            add = self._completion(pm, cap=4)
            if add is None:
                return
            sets.append(pm | add)
        cost = sum(s.bit_count() - 2 for s in sets)
        uncovered = [
            pm for pm in self.pair_masks if not any(pm & s == pm for s in sets)
        ]
        if uncovered:
            return
        if cost < self.incumbent:
            self.incumbent = cost
            self.best = tuple(frozenset(bits_of(s)) for s in sets)

    # -- search -----------------------------------------------------------

    def run(self) -> CoverResult:
        try:
            self._seed()
        except _Exhausted:
            pass
        allmask = (1 << len(self.pairs)) - 1
        exhausted = False
        try:
            self._search([], allmask, 0)
        except _Exhausted:
            exhausted = True
        if self.best is None:
            if exhausted:
                raise BudgetExhaustedError(
                    f"budget exhausted after {self.budget.used} nodes with no cover")
            raise InfeasibleInstanceError("no admissible cover exists")
        return CoverResult(self.incumbent, self.best, not exhausted, self.budget.used)

    def _search(self, groups: list[int], uncovered: int, cost: int) -> None:
        if uncovered == 0:
            self._close(groups, cost)
            return
        self.budget.tick()
        if cost + self._bound(groups, uncovered) >= self.incumbent:
            return
        pid = (uncovered & -uncovered).bit_length() - 1
        pm = self.pair_masks[pid]
        children = []
        seen_masks = set()
        for gi, gm in enumerate(groups):
            nm = gm | pm
            if nm in seen_masks:
                continue
            seen_masks.add(nm)
            u, v = self.pairs[pid]
            if (self.forb_with[u] & nm) or (self.forb_with[v] & nm):
                continue
            inc = nm.bit_count() - gm.bit_count()
            children.append((inc, 1, gi, nm))
        if pm not in seen_masks:
            children.append((0, 2, -1, pm))
        children.sort(key=lambda c: (c[0], c[1], c[3]))
        for inc, kind, gi, nm in children:
            ncost = cost + (inc if kind == 1 else 0)
            if ncost >= self.incumbent:
                continue
            if kind == 1:
                ngroups = groups[:gi] + [nm] + groups[gi + 1:]
            else:
                ngroups = groups + [nm]
            nunc = 0
            for qid in bits_of(uncovered):
                qm = self.pair_masks[qid]
                if qm & nm != qm:
                    nunc |= 1 << qid
            key = (tuple(sorted(ngroups)), nunc)
            old = self.cache.get(key)
            if old is not None and old <= ncost:
                continue
            if len(self.cache) < self.cache_cap:
                self.cache[key] = ncost
            self._search(ngroups, nunc, ncost)

    def _close(self, groups: list[int], cost: int) -> None:
        total = cost
        final = []
        for gm in groups:
            cap = self.incumbent - total - 1
            if cap < 0:
                return
            add = self._completion(gm, cap if cap > 0 else 0)
            if add is None:
                return
            total += add.bit_count()
            if total >= self.incumbent:
                return
            final.append(gm | add)
        if total < self.incumbent:
            self.incumbent = total
            self.best = tuple(frozenset(bits_of(s)) for s in final)


def min_cost_cover(instance: CoverInstance, budget: int | None = None) -> CoverResult:
    """Exact minimum-cost cover; ``budget`` caps search nodes.

    Returns the optimum with ``optimal=True`` when the search finished, or
    the best incumbent with ``optimal=False`` on budget exhaustion.  Raises
    :class:`InfeasibleInstanceError` when no cover exists (or none within
    ``upper_bound``) and :class:`BudgetExhaustedError` when the budget dies
    before any cover was found.
    """
    tracker = _Budget(budget)
    if not instance.required_pairs:
        return CoverResult(0, (), True, 0)
    if len(instance.universe) <= SMALL_UNIVERSE_LIMIT:
        try:
            return _solve_small(instance, tracker)
        except _Exhausted:
            raise BudgetExhaustedError(
                f"budget exhausted after {tracker.used} nodes with no cover") from None
    return _PartitionSearch(instance, tracker).run()
