"""3-SAT hardness construction: gadgets, configuration costs, witnesses.

A formula (exactly 3 distinct variables per clause, every variable with a
positive and a negative occurrence) is compiled into a labelled gadget
graph.  Each literal occurrence becomes a 12-vertex fragment; the three
fragments of a clause hang off a central vertex; fragments of the same
variable are chained cyclically by merging true-side and false-side
tagged edges so that the merged edge keeps a degree-one endpoint.  The
formula is satisfiable exactly when the graph admits a co-connecting
hypergraph of cost ``25 m``.

The bridge between the two sides is the cost table over per-clause
configurations: which tagged edges a clause-local cover touches, per
variable slot, abstracted to N (none), B (both), S (the satisfying side)
or U (the unsatisfying side).  The 20 costs are found by exhaustive
search over a single clause gadget; satisfying assignments instantiate
the stored optimal witnesses clause by clause.
"""

from __future__ import annotations

import functools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations_with_replacement

from .cover import BudgetExhaustedError, CoverInstance, min_cost_cover
from .graphs import FormatError, Graph
from .hypergraphs import CoConnectingHypergraph, validate_co_connecting

# Occurrence-fragment local layout: an 8-path 0..7, a false-side leaf 8 on
# vertex 0, a true-side leaf 9 on vertex 7, a chord 2-5, a clause vertex 11
# on {2, 5}, and a pendant 10 on 2 (positive occurrence) or 5 (negative).
ARM_SIZE = 12
_ARM_F_LEAF = 8
_ARM_T_LEAF = 9
_ARM_PENDANT = 10
_ARM_CLAUSE = 11
# Path reversal swapping the two tagged edges; maps the positive layout
# onto the negative one and back.
_ARM_REVERSAL = (7, 6, 5, 4, 3, 2, 1, 0, 9, 8, 10, 11)

_LETTER_ORDER = "BUSN"


def _arm_edges(base: int, positive: bool) -> list[tuple[int, int]]:
    edges = [(base + i, base + i + 1) for i in range(7)]
    edges.append((base + 2, base + 5))
    edges += [(base + 2, base + _ARM_CLAUSE), (base + 5, base + _ARM_CLAUSE)]
    edges.append((base + 2, base + _ARM_PENDANT) if positive else (base + 5, base + _ARM_PENDANT))
    edges += [(base + 0, base + _ARM_F_LEAF), (base + 7, base + _ARM_T_LEAF)]
    return edges


@dataclass(frozen=True)
class OccurrenceGadget:
    """One literal-occurrence fragment with its tagged edges."""

    graph: Graph
    positive: bool
    path: tuple[int, ...]
    leaf_f: int
    leaf_t: int
    pendant: int
    clause_vertex: int
    f_edge: tuple[int, int]
    t_edge: tuple[int, int]


def build_occurrence_gadget(sign: str) -> OccurrenceGadget:
    """Standalone occurrence fragment; ``sign`` is "positive" or "negative"."""
    if sign not in ("positive", "negative"):
        raise ValueError("sign must be 'positive' or 'negative'")
    positive = sign == "positive"
    g = Graph(ARM_SIZE, _arm_edges(0, positive))
    return OccurrenceGadget(
        graph=g,
        positive=positive,
        path=tuple(range(8)),
        leaf_f=_ARM_F_LEAF,
        leaf_t=_ARM_T_LEAF,
        pendant=_ARM_PENDANT,
        clause_vertex=_ARM_CLAUSE,
        f_edge=(0, _ARM_F_LEAF),
        t_edge=(7, _ARM_T_LEAF),
    )


@dataclass(frozen=True)
class ClauseGadget:
    """Standalone clause gadget: three arms, a central vertex, a pendant."""

    graph: Graph
    polarities: tuple[bool, bool, bool]
    central: int
    pendant: int

    def arm_base(self, slot: int) -> int:
        return slot * ARM_SIZE

    def arm_vertices(self, slot: int) -> tuple[int, ...]:
        base = self.arm_base(slot)
        return tuple(range(base, base + ARM_SIZE))

    def t_edge(self, slot: int) -> tuple[int, int]:
        base = self.arm_base(slot)
        return (base + 7, base + _ARM_T_LEAF)

    def f_edge(self, slot: int) -> tuple[int, int]:
        base = self.arm_base(slot)
        return (base + 0, base + _ARM_F_LEAF)

    def tagged_pairs(self) -> list[tuple[int, int]]:
        out = []
        for slot in range(3):
            out += [self.t_edge(slot), self.f_edge(slot)]
        return out


def build_clause_gadget(polarities: tuple[bool, bool, bool]) -> ClauseGadget:
    edges = []
    for slot, pol in enumerate(polarities):
        edges += _arm_edges(slot * ARM_SIZE, pol)
    central = 3 * ARM_SIZE
    pendant = central + 1
    for slot in range(3):
        edges.append((slot * ARM_SIZE + _ARM_CLAUSE, central))
    edges.append((central, pendant))
    return ClauseGadget(Graph(central + 2, edges), tuple(polarities), central, pendant)


@functools.lru_cache(maxsize=1)
def reference_clause_gadget() -> ClauseGadget:
    """The fixed clause shape used for the configuration table: one
    positive and two negative occurrences.  The slot-permutation symmetry
    of the gadget makes the polarity mix irrelevant to the costs."""
    return build_clause_gadget((True, False, False))


def canonical_configuration(config: str) -> str:
    if len(config) != 3 or any(ch not in _LETTER_ORDER for ch in config):
        raise ValueError(f"configuration must be three of B/U/S/N, got {config!r}")
    return "".join(sorted(config, key=_LETTER_ORDER.index))


def all_configurations() -> list[str]:
    """The 20 canonical three-letter configurations, table order."""
    return ["".join(c) for c in combinations_with_replacement(_LETTER_ORDER, 3)]


def _slot_designation(letter: str, positive: bool, t_pair, f_pair):
    """Required and forbidden tagged pairs for one variable slot."""
    if letter == "N":
        return [], [t_pair, f_pair]
    if letter == "B":
        return [t_pair, f_pair], []
    sat_side, unsat_side = (t_pair, f_pair) if positive else (f_pair, t_pair)
    if letter == "S":
        return [sat_side], [unsat_side]
    return [unsat_side], [sat_side]


def _configuration_instance(
    letters: tuple[str, str, str],
    exact_coverage: bool,
    require_host_connected: bool,
) -> CoverInstance:
    ref = reference_clause_gadget()
    tagged = set(ref.tagged_pairs())
    required = {e for e in ref.graph.edges if e not in tagged}
    forbidden: set[tuple[int, int]] = set()
    for slot, letter in enumerate(letters):
        des, forb = _slot_designation(
            letter, ref.polarities[slot], ref.t_edge(slot), ref.f_edge(slot)
        )
        required.update(des)
        if exact_coverage:
            forbidden.update(forb)
    zones = tuple(frozenset(ref.arm_vertices(slot)) for slot in range(3))
    return CoverInstance(
        ref.graph,
        frozenset(required),
        mode="co_connected",
        forbidden_pairs=frozenset(forbidden),
        zones=zones,
        require_host_connected=require_host_connected,
    )


def configuration_min_cost(
    config: str,
    budget: int | None = None,
    *,
    exact_coverage: bool = True,
    require_host_connected: bool = False,
    slot_letters: tuple[str, str, str] | None = None,
) -> tuple[int, tuple[frozenset[int], ...]]:
    """Exact minimum cost of a clause-local cover for one configuration.

    The cover must include all 37 untagged edges of the clause gadget plus
    the tagged edges the configuration designates; under the default exact
    coverage semantics the remaining tagged edges must stay uncovered
    (their endpoint pairs are forbidden).  Returns the cost and one
    optimal witness.
    """
    letters = slot_letters if slot_letters is not None else tuple(canonical_configuration(config))
    if len(letters) != 3 or any(ch not in _LETTER_ORDER for ch in letters):
        raise ValueError(f"bad slot letters {letters!r}")
    inst = _configuration_instance(tuple(letters), exact_coverage, require_host_connected)
    result = min_cost_cover(inst, budget=budget)
    if not result.optimal:
        raise BudgetExhaustedError(
            f"configuration {''.join(letters)}: budget exhausted at incumbent {result.cost}")
    return result.cost, result.hyperedges


_witness_cache: dict[tuple[str, bool, bool], tuple[int, tuple[frozenset[int], ...]]] = {}


def _configuration_witness(
    config: str,
    budget: int | None,
    exact_coverage: bool = True,
    require_host_connected: bool = False,
) -> tuple[int, tuple[frozenset[int], ...]]:
    key = (canonical_configuration(config), exact_coverage, require_host_connected)
    hit = _witness_cache.get(key)
    if hit is None:
        hit = configuration_min_cost(
            key[0],
            budget,
            exact_coverage=exact_coverage,
            require_host_connected=require_host_connected,
        )
        _witness_cache[key] = hit
    return hit


def _table_worker(args):
    config, budget, exact_coverage, require_host_connected = args
    cost, sets = configuration_min_cost(
        config,
        budget,
        exact_coverage=exact_coverage,
        require_host_connected=require_host_connected,
    )
    return config, cost, tuple(tuple(sorted(s)) for s in sets)


def configuration_table(
    budget: int | None = None,
    jobs: int | None = None,
    *,
    exact_coverage: bool = True,
    require_host_connected: bool = False,
) -> list[tuple[str, int]]:
    """All 20 configuration costs, solved exactly; raises on budget
    exhaustion of any entry.  ``jobs`` > 1 solves entries in parallel
    worker processes (each search is independent and deterministic)."""
    configs = all_configurations()
    argses = [(c, budget, exact_coverage, require_host_connected) for c in configs]
    rows: dict[str, int] = {}
    if jobs and jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for config, cost, sets in pool.map(_table_worker, argses):
                rows[config] = cost
                key = (config, exact_coverage, require_host_connected)
                _witness_cache.setdefault(key, (cost, tuple(frozenset(s) for s in sets)))
    else:
        for args in argses:
            config, cost, sets = _table_worker(args)
            rows[config] = cost
            key = (config, exact_coverage, require_host_connected)
            _witness_cache.setdefault(key, (cost, tuple(frozenset(s) for s in sets)))
    return [(c, rows[c]) for c in configs]


def format_table(rows: list[tuple[str, int]]) -> str:
    return "".join(f"{config} {cost}\n" for config, cost in rows)


# --- formulas ---------------------------------------------------------------


@dataclass(frozen=True)
class CnfFormula:
    """3-CNF with exactly three distinct variables per clause and at least
    one positive and one negative occurrence of every variable."""

    variable_count: int
    clauses: tuple[tuple[int, int, int], ...]

    def __post_init__(self):
        pos = set()
        neg = set()
        for idx, clause in enumerate(self.clauses):
            if len(clause) != 3:
                raise ValueError(f"clause {idx} must have exactly 3 literals")
            vs = [abs(l) for l in clause]
            if any(l == 0 for l in clause):
                raise ValueError(f"clause {idx} contains literal 0")
            if any(v > self.variable_count for v in vs):
                raise ValueError(f"clause {idx} uses a variable beyond the declared count")
            if len(set(vs)) != 3:
                raise ValueError(f"clause {idx} repeats a variable")
            for l in clause:
                (pos if l > 0 else neg).add(abs(l))
        for v in range(1, self.variable_count + 1):
            if v not in pos:
                raise ValueError(f"variable {v} has no positive occurrence")
            if v not in neg:
                raise ValueError(f"variable {v} has no negative occurrence")

    @property
    def clause_count(self) -> int:
        return len(self.clauses)

    def satisfies(self, assignment: dict[int, bool]) -> bool:
        return all(
            any((l > 0) == assignment[abs(l)] for l in clause) for clause in self.clauses
        )


def parse_dimacs(text: str) -> CnfFormula:
    """Parse DIMACS CNF; clause arity, variable distinctness and the
    both-signs-per-variable restriction are all enforced."""
    nvars = nclauses = None
    clauses: list[tuple[int, ...]] = []
    current: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise FormatError("problem line must be 'p cnf <vars> <clauses>'", lineno)
            try:
                nvars, nclauses = int(parts[2]), int(parts[3])
            except ValueError:
                raise FormatError("problem line counts must be integers", lineno) from None
            continue
        if nvars is None:
            raise FormatError("clause data before the problem line", lineno)
        try:
            lits = [int(p) for p in line.split()]
        except ValueError:
            raise FormatError("clause lines must contain integers", lineno) from None
        for lit in lits:
            if lit == 0:
                clauses.append(tuple(current))
                current = []
            else:
                current.append(lit)
    if nvars is None:
        raise FormatError("missing problem line")
    if current:
        raise FormatError("last clause is not terminated by 0")
    if nclauses is not None and len(clauses) != nclauses:
        raise FormatError(f"expected {nclauses} clauses, found {len(clauses)}")
    try:
        return CnfFormula(nvars, tuple(tuple(c) for c in clauses))
    except ValueError as exc:
        raise FormatError(str(exc)) from None


# --- the formula graph ------------------------------------------------------


@dataclass(frozen=True, eq=False)
class GadgetGraph:
    """The labelled reduction graph with its clause and tag maps."""

    graph: Graph
    formula: CnfFormula
    clause_vertices: dict[int, tuple[int, int, int]]
    central_vertices: dict[int, int]
    pendant_vertices: dict[int, int]
    labelled_edges: dict[tuple[int, int], dict[str, tuple[int, int]]]
    clause_membership: dict[int, frozenset[int]]
    arm_vertices: dict[int, tuple[tuple[int, ...], ...]]

    def label_map(self) -> dict:
        """Sidecar JSON structure describing the labelling."""
        edge_records: dict[tuple[int, int], dict] = {}
        for (i, x), sides in self.labelled_edges.items():
            for side, edge in sides.items():
                rec = edge_records.setdefault(edge, {"edge": list(edge)})
                rec["t_label" if side == "T" else "f_label"] = [i, x]
        return {
            "schema": 1,
            "clause_vertices": {str(i): list(v) for i, v in self.clause_vertices.items()},
            "central_vertices": {str(i): v for i, v in self.central_vertices.items()},
            "labelled_edges": [edge_records[e] for e in sorted(edge_records)],
        }


def build_formula_graph(f: CnfFormula) -> GadgetGraph:
    """Assemble the reduction graph: 32 vertices and 40 edges per clause,
    connected and co-connected, with each tagged edge shared between the
    two occurrence fragments of one variable."""
    m = f.clause_count
    pre_n = 38 * m

    def arm_base(i: int, slot: int) -> int:
        return 38 * i + ARM_SIZE * slot

    edges: set[tuple[int, int]] = set()
    polarity: dict[tuple[int, int], bool] = {}
    for i, clause in enumerate(f.clauses):
        central = 38 * i + 36
        pendant = 38 * i + 37
        for slot, lit in enumerate(clause):
            pol = lit > 0
            polarity[(i, slot)] = pol
            edges.update(_arm_edges(arm_base(i, slot), pol))
            edges.add((arm_base(i, slot) + _ARM_CLAUSE, central))
        edges.add((central, pendant))

    occurrences: dict[int, list[tuple[int, int]]] = {}
    for i, clause in enumerate(f.clauses):
        for slot, lit in enumerate(clause):
            occurrences.setdefault(abs(lit), []).append((i, slot))
    for occs in occurrences.values():
        occs.sort()

    parent = list(range(pre_n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x: int, y: int):
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[max(rx, ry)] = min(rx, ry)

    merged_labels: list[tuple[tuple[int, int], tuple[int, int], int]] = []
    for x, occs in occurrences.items():
        ell = len(occs)
        for j, (i_cur, slot_cur) in enumerate(occs):
            i_nxt, slot_nxt = occs[(j + 1) % ell]
            cur_base = arm_base(i_cur, slot_cur)
            nxt_base = arm_base(i_nxt, slot_nxt)
            union(cur_base + 7, nxt_base + 0)
            union(cur_base + _ARM_T_LEAF, nxt_base + _ARM_F_LEAF)
            merged_labels.append(((i_cur, x), (i_nxt, x), cur_base))

    roots = sorted({find(v) for v in range(pre_n)})
    dense = {r: i for i, r in enumerate(roots)}

    def remap(v: int) -> int:
        return dense[find(v)]

    final_edges = {(min(remap(u), remap(v)), max(remap(u), remap(v))) for u, v in edges}
    graph = Graph(len(roots), final_edges)

    if graph.n != 32 * m or graph.m != 40 * m:
        raise AssertionError(
            f"gadget size mismatch: got {graph.n} vertices / {graph.m} edges, "
            f"wanted {32 * m} / {40 * m}")
    if not graph.is_connected():
        raise ValueError(
            "the formula splits into variable-disjoint parts; reduce them separately")

    labelled: dict[tuple[int, int], dict[str, tuple[int, int]]] = {}
    for t_key, f_key, cur_base in merged_labels:
        u = remap(cur_base + 7)
        w = remap(cur_base + _ARM_T_LEAF)
        edge = (min(u, w), max(u, w))
        labelled.setdefault(t_key, {})["T"] = edge
        labelled.setdefault(f_key, {})["F"] = edge
        if graph.degree(u) == 1 or graph.degree(w) == 1:
            pass
        else:
            raise AssertionError("a tagged edge lost its degree-one endpoint")

    clause_vertices = {}
    central_vertices = {}
    pendant_vertices = {}
    clause_membership = {}
    arm_vertices = {}
    for i in range(m):
        arms = tuple(
            tuple(remap(arm_base(i, slot) + k) for k in range(ARM_SIZE)) for slot in range(3)
        )
        arm_vertices[i] = arms
        clause_vertices[i] = tuple(arm[_ARM_CLAUSE] for arm in arms)
        central_vertices[i] = remap(38 * i + 36)
        pendant_vertices[i] = remap(38 * i + 37)
        member = {remap(38 * i + k) for k in range(38)}
        if len(member) != 38:
            raise AssertionError("a clause gadget does not span 38 vertices")
        clause_membership[i] = frozenset(member)
        if graph.degree(central_vertices[i]) != 4:
            raise AssertionError("central vertex degree must be 4")

    if any(graph.degree(v) > 5 for v in range(graph.n)):
        raise AssertionError("gadget degrees must stay at most 5")
    from .graphs import complement

    if not complement(graph).is_connected():
        raise AssertionError("the gadget graph must be co-connected")

    return GadgetGraph(
        graph=graph,
        formula=f,
        clause_vertices=clause_vertices,
        central_vertices=central_vertices,
        pendant_vertices=pendant_vertices,
        labelled_edges=labelled,
        clause_membership=clause_membership,
        arm_vertices=arm_vertices,
    )


# --- assignments to covers --------------------------------------------------


def _slot_letter(lit: int, assignment: dict[int, bool]) -> str:
    return "S" if (lit > 0) == assignment[abs(lit)] else "U"


def _clause_witness_parts(
    gadget: GadgetGraph, assignment: dict[int, bool], budget: int | None
) -> list[list[frozenset[int]]]:
    ref = reference_clause_gadget()
    parts: list[list[frozenset[int]]] = []
    for i, clause in enumerate(gadget.formula.clauses):
        letters = tuple(_slot_letter(lit, assignment) for lit in clause)
        canon = canonical_configuration("".join(letters))
        _, witness = _configuration_witness(canon, budget)

        # Assign each clause slot a reference slot with the same letter.
        remaining = list(range(3))
        slot_to_ref = {}
        for k in range(3):
            for r in remaining:
                if canon[r] == letters[k]:
                    slot_to_ref[k] = r
                    remaining.remove(r)
                    break
        ref_to_slot = {r: k for k, r in slot_to_ref.items()}

        vmap: dict[int, int] = {
            ref.central: gadget.central_vertices[i],
            ref.pendant: gadget.pendant_vertices[i],
        }
        for r in range(3):
            k = ref_to_slot[r]
            same = ref.polarities[r] == (clause[k] > 0)
            locals_map = range(ARM_SIZE) if same else _ARM_REVERSAL
            for local, mapped_local in zip(range(ARM_SIZE), locals_map):
                vmap[r * ARM_SIZE + local] = gadget.arm_vertices[i][k][mapped_local]

        parts.append([frozenset(vmap[v] for v in e) for e in witness])
    return parts


def assignment_to_cover(
    f: CnfFormula,
    assignment: dict[int, bool],
    *,
    gadget: GadgetGraph | None = None,
    budget: int | None = None,
) -> CoConnectingHypergraph:
    """Instantiate the stored per-configuration witnesses clause by clause.

    Costs 25 per satisfied clause and 26 per falsified one, so exactly
    ``25 m`` for satisfying assignments.
    """
    for v in range(1, f.variable_count + 1):
        if v not in assignment:
            raise ValueError(f"assignment is missing variable {v}")
    if gadget is None:
        gadget = build_formula_graph(f)
    parts = _clause_witness_parts(gadget, assignment, budget)
    return CoConnectingHypergraph(gadget.graph, [e for part in parts for e in part])


@dataclass(frozen=True)
class ReductionReport:
    gadget: GadgetGraph
    cover: CoConnectingHypergraph
    cover_valid: bool
    cost: int
    clause_costs: tuple[int, ...]
    satisfied: bool
    expected_cost: int
    hyperedges_within_clauses: bool
    note: str

    @property
    def passed(self) -> bool:
        return (
            self.cover_valid
            and self.cost == self.expected_cost
            and self.hyperedges_within_clauses
            and (self.cost == 25 * self.gadget.formula.clause_count) == self.satisfied
        )


def verify_reduction(
    f: CnfFormula, assignment: dict[int, bool], budget: int | None = None
) -> ReductionReport:
    """Build the gadget graph, instantiate the assignment's cover, validate
    it, and check the cost decomposition clause by clause."""
    gadget = build_formula_graph(f)
    parts = _clause_witness_parts(gadget, assignment, budget)
    cover = CoConnectingHypergraph(gadget.graph, [e for part in parts for e in part])
    report = validate_co_connecting(gadget.graph, cover)
    clause_costs = tuple(sum(len(e) - 2 for e in part) for part in parts)
    satisfied = f.satisfies(assignment)
    expected = sum(
        25 if any((l > 0) == assignment[abs(l)] for l in clause) else 26
        for clause in f.clauses
    )
    within = all(
        any(e <= gadget.clause_membership[i] for i in range(f.clause_count))
        for e in cover.hyperedges
    )
    note = (
        "if the formula's incidence graph is planar, the gadget graph is planar "
        "as well (not checked here)"
    )
    return ReductionReport(
        gadget=gadget,
        cover=cover,
        cover_valid=report.valid,
        cost=report.cost,
        clause_costs=clause_costs,
        satisfied=satisfied,
        expected_cost=expected,
        hyperedges_within_clauses=within,
        note=note,
    )
