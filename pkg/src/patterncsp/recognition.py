"""Finding orders under which a pattern does not occur, and hardness gadgets.

With the domain order fixed, each occurrence of a pattern's order-free part
at a variable triple becomes a constraint on the positions of those
variables; the constraints for BTX, BTI and EMC are min-closed and those for
BTP are max-closed, so generalized arc consistency followed by the extremal
assignment decides them. With the variable order fixed, each BTI or BTX
occurrence demands one strict value precedence, so an order exists exactly
when the precedence graph is acyclic.
"""

from __future__ import annotations

import itertools
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from typing import Literal

import networkx as nx
import numpy as np

from .csp import Instance
from .figures import BTI, BTP, BTX, EMC
from .occurrence import OccurrenceResult, instance_homomorphisms, occurs_in_instance
from .pattern import Pattern, without_dom_order, without_var_order

Target = Literal["btp", "bti", "btx", "emc"]

TARGETS: dict[str, Pattern] = {"btp": BTP, "bti": BTI, "btx": BTX, "emc": EMC}

# Pattern variables pinned during witness search and the constraint each
# witness yields, as (kind, roles) with roles naming pattern variables.
_WITNESS_SHAPE: dict[str, tuple[str, tuple[str, ...]]] = {
    "btx": ("min", ("y", "x", "z")),
    "btp": ("max", ("x", "y", "z")),
    "bti": ("prec", ("x", "z")),
    "emc": ("prec", ("y", "z")),
}


class RecognitionError(ValueError):
    """Raised for unsupported targets or inconsistent ordering problems."""


@dataclass(frozen=True, slots=True)
class OrderConstraint:
    """A constraint on variable positions.

    ``min (i, j, k)``: ``O_i > min(O_j, O_k)``; ``max (i, j, k)``:
    ``O_k < max(O_i, O_j)``; ``prec (j, k)``: ``O_j > O_k``.
    """

    kind: Literal["min", "max", "prec"]
    scope: tuple[int, ...]

    def holds(self, pos: Sequence[int]) -> bool:
        if self.kind == "min":
            i, j, k = self.scope
            return pos[i] > min(pos[j], pos[k])
        if self.kind == "max":
            i, j, k = self.scope
            return pos[k] < max(pos[i], pos[j])
        j, k = self.scope
        return pos[j] > pos[k]


@dataclass(frozen=True, slots=True)
class OrderingProblem:
    variables: tuple[str, ...]
    constraints: tuple[OrderConstraint, ...]
    family: Literal["min", "max"]

    def holds(self, pos: Sequence[int]) -> bool:
        return all(c.holds(pos) for c in self.constraints)


def collect_var_order_witnesses(inst: Instance, target: str, dom_order: Sequence[int]) -> OrderingProblem:
    """Position constraints that any variable order avoiding ``target`` must meet."""
    target = target.lower()
    if target not in TARGETS:
        raise RecognitionError(f"unknown target {target!r}")
    pattern = without_var_order(TARGETS[target])
    kind, roles = _WITNESS_SHAPE[target]
    if sorted(dom_order) != sorted(inst.universe):
        raise ValueError("domain order must list every universe value once")
    urank = np.empty(len(inst.universe), dtype=np.intc)
    for r, u in enumerate(dom_order):
        urank[inst.value_index[u]] = r
    zeros = np.zeros(inst.n, dtype=np.intc)
    found: set[OrderConstraint] = set()
    for scope in itertools.permutations(range(inst.n), len(roles)):
        if kind == "max" and scope[0] > scope[1]:
            continue  # x and y play symmetric roles in BTP
        pin = {role: inst.variables[i] for role, i in zip(roles, scope)}
        if instance_homomorphisms(pattern, inst, zeros, urank, limit=1, var_image=pin):
            found.add(OrderConstraint(kind, scope))
    family = "max" if kind == "max" else "min"
    ordered = tuple(sorted(found, key=lambda c: (c.kind, c.scope)))
    return OrderingProblem(inst.variables, ordered, family)


def _supported(c: OrderConstraint, doms: list[set[int]], var: int, value: int) -> bool:
    if c.kind == "min":
        i, j, k = c.scope
        if var == i:
            return value > min(min(doms[j]), min(doms[k]))
        other = k if var == j else j
        return max(doms[i]) > min(value, min(doms[other]))
    if c.kind == "max":
        i, j, k = c.scope
        if var == k:
            return value < max(max(doms[i]), max(doms[j]))
        other = j if var == i else i
        return min(doms[k]) < max(value, max(doms[other]))
    j, k = c.scope
    if var == j:
        return value > min(doms[k])
    return value < max(doms[j])


def solve_min_closed(op: OrderingProblem) -> tuple[str, ...] | None:
    """A variable order (earliest first) meeting every constraint, or None.

    Positions range over ``1..n``. After generalized arc consistency each
    position takes its smallest surviving value (largest for the max-closed
    family); variables sharing a position are ordered by index.
    """
    kinds = {c.kind for c in op.constraints}
    if "min" in kinds and "max" in kinds:
        raise RecognitionError("ordering problem mixes min-closed and max-closed constraints")
    if ("min" in kinds and op.family != "min") or ("max" in kinds and op.family != "max"):
        raise RecognitionError("constraint kinds do not match the declared family")
    n = len(op.variables)
    doms = [set(range(1, n + 1)) for _ in range(n)]
    watch: list[list[OrderConstraint]] = [[] for _ in range(n)]
    for c in op.constraints:
        for v in c.scope:
            watch[v].append(c)
    pending = list(op.constraints)
    queued = set(pending)
    while pending:
        c = pending.pop()
        queued.discard(c)
        for var in c.scope:
            keep = {a for a in doms[var] if _supported(c, doms, var, a)}
            if keep == doms[var]:
                continue
            if not keep:
                return None
            doms[var] = keep
            for other in watch[var]:
                if other is not c and other not in queued:
                    queued.add(other)
                    pending.append(other)
    pick = max if op.family == "max" else min
    pos = [pick(d) for d in doms]
    if not op.holds(pos):
        raise RecognitionError("extremal assignment violates a constraint")
    order = sorted(range(n), key=lambda i: (pos[i], i))
    return tuple(op.variables[i] for i in order)


@dataclass(frozen=True, slots=True)
class VarOrderResult:
    order: tuple[str, ...] | None
    problem: OrderingProblem
    certificate: OccurrenceResult | None = None


def find_var_order(inst: Instance, target: str, dom_order: Sequence[int]) -> VarOrderResult:
    """A variable order under which ``target`` does not occur, with ``dom_order`` fixed."""
    problem = collect_var_order_witnesses(inst, target, dom_order)
    order = solve_min_closed(problem)
    if order is None:
        return VarOrderResult(None, problem)
    cert = occurs_in_instance(TARGETS[target.lower()], inst, order, dom_order)
    if cert.occurs:
        raise RecognitionError(f"order {order} fails its certificate for {target}")
    return VarOrderResult(order, problem, cert)


@dataclass(frozen=True, slots=True)
class DomOrderResult:
    order: tuple[int, ...] | None
    arcs: tuple[tuple[int, int], ...]
    cycle: tuple[tuple[int, int], ...] = ()
    certificate: OccurrenceResult | None = None


def _precedence_arcs(inst: Instance, pattern: Pattern, var_order: Sequence[str], limit: int) -> set[tuple[int, int]]:
    """Value precedences forced by occurrences of the order-free pattern.

    An occurrence needs the image of ``lo`` below the image of ``hi`` for each
    ordered pair ``lo < hi`` of the pattern; avoiding it needs the arc
    ``(hi value, lo value)``, read as "comes before".
    """
    loose = without_dom_order(pattern)
    tv_rank = np.empty(inst.n, dtype=np.intc)
    for r, v in enumerate(var_order):
        tv_rank[inst.var_index[v]] = r
    zeros = np.zeros(len(inst.universe), dtype=np.intc)
    arcs = set()
    maps = instance_homomorphisms(loose, inst, tv_rank, zeros, limit=limit)
    if limit >= 0 and len(maps) >= limit:
        raise RecognitionError(f"more than {limit} witnesses; raise the cap")
    for m in maps:
        for lo, hi in pattern.dom_closure:
            # the occurrence needs m[lo] < m[hi]; avoiding it needs m[hi] before m[lo]
            arcs.add((m[hi][1], m[lo][1]))
    return arcs


def find_dom_order(
    inst: Instance, target: str, var_order: Sequence[str], cap: int = 10**7
) -> DomOrderResult:
    """A universe order under which ``target`` (BTI or BTX) does not occur,
    with ``var_order`` fixed. The topological sort breaks ties by universe
    position, so an instance without witnesses keeps its universe order."""
    target = target.lower()
    if target not in ("bti", "btx"):
        raise RecognitionError("domain-order search is supported for BTI and BTX only")
    if sorted(var_order) != sorted(inst.variables):
        raise ValueError("variable order must list every variable once")
    pattern = TARGETS[target]
    arcs = _precedence_arcs(inst, pattern, var_order, cap)
    graph = nx.DiGraph()
    graph.add_nodes_from(inst.universe)
    graph.add_edges_from(arcs)
    position = {u: k for k, u in enumerate(inst.universe)}
    sorted_arcs = tuple(sorted(arcs))
    try:
        order = tuple(nx.lexicographical_topological_sort(graph, key=position.__getitem__))
    except nx.NetworkXUnfeasible:
        cycle = tuple((a, b) for a, b in nx.find_cycle(graph))
        return DomOrderResult(None, sorted_arcs, cycle)
    cert = occurs_in_instance(pattern, inst, var_order, order)
    if cert.occurs:
        raise RecognitionError(f"order {order} fails its certificate for {target}")
    return DomOrderResult(order, sorted_arcs, (), cert)


# -- hardness gadgets ---------------------------------------------------------


@dataclass(frozen=True, slots=True)
class ClauseGadget:
    literals: tuple[int, int, int]
    positions: tuple[int, int, int]
    extras: tuple[int, int, int]
    pairs: tuple[tuple[int, int, int], ...] = ()


@dataclass(frozen=True, eq=False)
class Gadget:
    target: str
    instance: Instance
    var_order: tuple[str, ...] | None
    n_props: int
    clauses: tuple[ClauseGadget, ...]
    a_max: int = field(default=0)

    def literal_values(self, prop: int) -> tuple[int, int]:
        """Values standing for ``X_prop`` and its negation."""
        return prop, prop + self.n_props


def parse_dimacs(text: str) -> tuple[int, list[list[int]]]:
    """Read a DIMACS CNF; returns ``(number of variables, clauses)``."""
    n_vars = 0
    clauses: list[list[int]] = []
    current: list[int] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) < 4 or parts[1] != "cnf":
                raise ValueError(f"bad problem line: {line!r}")
            n_vars = int(parts[2])
            continue
        for tok in line.split():
            lit = int(tok)
            if lit == 0:
                clauses.append(current)
                current = []
            else:
                current.append(lit)
    if current:
        clauses.append(current)
    n_vars = max([n_vars] + [abs(l) for c in clauses for l in c])
    return n_vars, clauses


def _gadget_relation(lit: int, n: int, e1: int, e2: int, dom_u: Sequence[int], dom_v: Sequence[int], a_max: int):
    true_v, false_v = (lit, lit + n) if lit > 0 else (-lit + n, -lit)
    keep = {(true_v, e1), (true_v, e2), (false_v, e1)}
    return sorted(
        (s, t) for s in dom_u for t in dom_v if s == a_max or t == a_max or (s, t) in keep
    )


def gen_gadget(target: str, cnf: Sequence[Sequence[int]], n_props: int | None = None) -> Gadget:
    """Instance whose avoiding orders encode satisfying assignments of ``cnf``.

    ``X_i`` is read as true when value ``i`` is above value ``i + n``. Each
    clause gets its own block of variables (6 for EMC, 9 for BTX and BTI) and
    three extra values; ``a_max = 2n + 1`` is compatible with everything.
    """
    target = target.lower()
    if target not in ("emc", "btx", "bti"):
        raise RecognitionError("gadgets exist for EMC, BTX and BTI")
    clauses = [tuple(int(l) for l in c) for c in cnf]
    for c in clauses:
        if len(c) != 3 or 0 in c:
            raise ValueError(f"clause {c} must have exactly three non-zero literals")
        if len({abs(l) for l in c}) != 3:
            raise ValueError(f"clause {c} repeats a variable")
    n = n_props if n_props is not None else max((abs(l) for c in clauses for l in c), default=0)
    if any(abs(l) > n for c in clauses for l in c):
        raise ValueError("literal outside the declared number of variables")
    m = len(clauses)
    block = 6 if target == "emc" else 9
    N = block * m
    a_max = 2 * n + 1
    base = list(range(1, 2 * n + 2))
    names = [f"x{t}" for t in range(1, N + 1)]
    domains: dict[str, list[int]] = {}
    gadgets = []
    relations: dict[tuple[int, int], list[tuple[int, int]]] = {}
    for ci, lits in enumerate(clauses):
        extras = (2 * n + 2 + 3 * ci, 2 * n + 3 + 3 * ci, 2 * n + 4 + 3 * ci)
        start = block * ci
        for t in range(start + 1, start + block + 1):
            domains[f"x{t}"] = base + list(extras)
        if target == "emc":
            p, q, r = start + 1, start + 3, start + 5
        else:
            p, q, r = start + 1, start + 4, start + 7
        b, c, d = extras
        if target == "emc":
            placed = [(p, q, lits[0], b, c), (q, r, lits[1], c, d), (p, r, lits[2], d, b)]
        elif target == "bti":
            placed = [(p, q, lits[0], b, c), (q, r, lits[1], b, c), (r, p, lits[2], b, c)]
        else:
            placed = []
            for (u, v), lit in zip([(p, q), (q, r), (r, p)], lits):
                placed += [(u, v, lit, b, c), (u + 1, v, lit, b, c), (v + 1, u, lit, b, c)]
        pairs = []
        for u, v, lit, e1, e2 in placed:
            relations[(u, v)] = _gadget_relation(lit, n, e1, e2, domains[f"x{u}"], domains[f"x{v}"], a_max)
            pairs.append((u, v, lit))
        gadgets.append(ClauseGadget(lits, (p, q, r), extras, tuple(pairs)))
    for t in range(1, N):
        if (t, t + 1) in relations or (t + 1, t) in relations:
            raise RecognitionError("gadget placed on consecutive variables")
        du, dv = domains[f"x{t}"], domains[f"x{t + 1}"]
        relations[(t, t + 1)] = sorted(
            (s, u) for s in du for u in dv if s == u or s == a_max or u == a_max
        )
    universe = list(range(1, 2 * n + 2 + 3 * m))
    constraints = [(f"x{u}", f"x{v}", rel) for (u, v), rel in sorted(relations.items())]
    inst = Instance.build(names, universe, domains, constraints)
    var_order = tuple(names) if target == "emc" else None
    return Gadget(target, inst, var_order, n, tuple(gadgets), a_max)


def assignment_to_order(gadget: Gadget, assignment: Mapping[int, bool] | Sequence[bool]) -> tuple[int, ...]:
    """Universe order (lowest first) induced by a truth assignment.

    Extras sit at the bottom, ordered per clause by its first true literal so
    the remaining two disjunctions hold through the extras; then false
    literal values, true literal values, and ``a_max`` on top.
    """
    n = gadget.n_props
    if isinstance(assignment, Mapping):
        truth = {int(k): bool(v) for k, v in assignment.items()}
    else:
        truth = {i + 1: bool(v) for i, v in enumerate(assignment)}
    if set(truth) != set(range(1, n + 1)):
        raise ValueError(f"assignment must cover variables 1..{n}")

    def lit_true(lit: int) -> bool:
        return truth[abs(lit)] == (lit > 0)

    low: list[int] = []
    for g in gadget.clauses:
        b, c, d = g.extras
        sat = [lit_true(l) for l in g.literals]
        if sat[0]:
            low += [b, d, c]  # c > d and d > b
        elif sat[1]:
            low += [c, b, d]  # b > c and d > b
        else:
            low += [d, c, b]  # b > c and c > d
    false_vals = [i + n if truth[i] else i for i in range(1, n + 1)]
    true_vals = [i if truth[i] else i + n for i in range(1, n + 1)]
    return tuple(low + false_vals + true_vals + [gadget.a_max])
