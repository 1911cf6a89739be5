"""Binary CSP instances, arc consistency and exhaustive search.

An :class:`Instance` is immutable. Variables and universe values are stored in
declaration order; the compatibility relation lives in a dense boolean array
``compat[i, j, a, b]`` indexed by variable index and universe index, kept
symmetric so both orientations of a constraint answer in constant time. Pairs
with no declared constraint are complete.
"""

from __future__ import annotations

import json
import random
from collections import deque
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Literal

import numpy as np

from . import kernels

Assignment = dict[str, int]


class InstanceError(ValueError):
    """Raised for malformed instance data."""


class BudgetExceeded(RuntimeError):
    """Raised when an exhaustive search exceeds its node budget."""


@dataclass(frozen=True, eq=False)
class Instance:
    variables: tuple[str, ...]
    universe: tuple[int, ...]
    domains: tuple[tuple[int, ...], ...]
    compat: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        if len(set(self.variables)) != len(self.variables):
            raise InstanceError("duplicate variable name")
        if len(set(self.universe)) != len(self.universe):
            raise InstanceError("duplicate universe value")
        if len(self.domains) != len(self.variables):
            raise InstanceError("one domain per variable required")
        n, d = len(self.variables), len(self.universe)
        if self.compat.shape != (n, n, d, d):
            raise InstanceError("compatibility array has the wrong shape")
        self.compat.setflags(write=False)

    # -- construction -----------------------------------------------------

    @classmethod
    def build(
        cls,
        variables: Sequence[str],
        universe: Sequence[int],
        domains: Mapping[str, Iterable[int]],
        constraints: Iterable[tuple[str, str, Iterable[tuple[int, int]]]] = (),
    ) -> Instance:
        """Build an instance; each constraint lists its allowed pairs."""
        variables = tuple(variables)
        universe = tuple(int(u) for u in universe)
        vindex = {v: i for i, v in enumerate(variables)}
        uindex = {u: a for a, u in enumerate(universe)}
        doms = []
        for v in variables:
            if v not in domains:
                raise InstanceError(f"missing domain for {v!r}")
            vals = set()
            for u in domains[v]:
                if u not in uindex:
                    raise InstanceError(f"value {u!r} of {v!r} is outside the universe")
                vals.add(u)
            if not vals:
                raise InstanceError(f"empty domain for {v!r}")
            doms.append(tuple(u for u in universe if u in vals))
        for v in domains:
            if v not in vindex:
                raise InstanceError(f"domain given for unknown variable {v!r}")
        n, d = len(variables), len(universe)
        compat = np.ones((n, n, d, d), dtype=bool)
        seen: set[frozenset[int]] = set()
        for x, y, allowed in constraints:
            if x not in vindex or y not in vindex:
                raise InstanceError(f"constraint on unknown variable in {(x, y)!r}")
            i, j = vindex[x], vindex[y]
            if i == j:
                raise InstanceError(f"constraint scope repeats {x!r}")
            key = frozenset((i, j))
            if key in seen:
                raise InstanceError(f"duplicate constraint on {(x, y)!r}")
            seen.add(key)
            rel = np.zeros((d, d), dtype=bool)
            for pair in allowed:
                a, b = pair
                if a not in doms[i] or b not in doms[j]:
                    raise InstanceError(f"allowed pair {(a, b)!r} outside the domains of {(x, y)!r}")
                rel[uindex[a], uindex[b]] = True
            compat[i, j] = rel
            compat[j, i] = rel.T
        return cls(variables, universe, tuple(doms), compat)

    # -- structure --------------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.variables)

    @cached_property
    def var_index(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.variables)}

    @cached_property
    def value_index(self) -> dict[int, int]:
        return {u: a for a, u in enumerate(self.universe)}

    @cached_property
    def dommask(self) -> np.ndarray:
        mask = np.zeros((self.n, len(self.universe)), dtype=bool)
        for i, dom in enumerate(self.domains):
            for u in dom:
                mask[i, self.value_index[u]] = True
        mask.setflags(write=False)
        return mask

    def domain(self, var: str) -> tuple[int, ...]:
        return self.domains[self.var_index[var]]

    def compatible(self, x: str, a: int, y: str, b: int) -> bool:
        """Whether ``(x, a)`` and ``(y, b)`` are compatible (``x != y``)."""
        i, j = self.var_index[x], self.var_index[y]
        if i == j:
            raise ValueError("compatibility is only defined across variables")
        return bool(self.compat[i, j, self.value_index[a], self.value_index[b]])

    def is_trivial(self, i: int, j: int) -> bool:
        """Whether the relation on variable indices ``(i, j)`` is complete on the domains."""
        block = self.compat[i, j][np.ix_(self.dommask[i], self.dommask[j])]
        return bool(block.all())

    @cached_property
    def constrained_pairs(self) -> tuple[tuple[int, int], ...]:
        """Variable index pairs ``i < j`` whose relation is not complete."""
        return tuple(
            (i, j)
            for i in range(self.n)
            for j in range(i + 1, self.n)
            if not self.is_trivial(i, j)
        )

    @cached_property
    def point_table(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """Points ``(var, value)`` in variable-major order.

        Returns ``(point_var, point_value_index, tv_start, cpt)`` where ``cpt``
        is an int8 matrix with ``-1`` for pairs on the same variable.
        """
        pv, pa, start = [], [], [0]
        for i, dom in enumerate(self.domains):
            for u in dom:
                pv.append(i)
                pa.append(self.value_index[u])
            start.append(len(pv))
        point_var = np.array(pv, dtype=np.intc)
        point_val = np.array(pa, dtype=np.intc)
        cpt = self.compat[point_var[:, None], point_var[None, :], point_val[:, None], point_val[None, :]]
        cpt = cpt.astype(np.int8)
        cpt[point_var[:, None] == point_var[None, :]] = -1
        for arr in (point_var, point_val, cpt):
            arr.setflags(write=False)
        return point_var, point_val, np.array(start, dtype=np.intc), cpt

    def with_domains(self, domains: Sequence[Iterable[int]]) -> Instance:
        """Same constraints, new (non-empty) domains."""
        doms = []
        for v, dom in zip(self.variables, domains):
            vals = set(dom)
            if not vals:
                raise InstanceError(f"empty domain for {v!r}")
            doms.append(tuple(u for u in self.universe if u in vals))
        return Instance(self.variables, self.universe, tuple(doms), self.compat)

    # -- serialization ----------------------------------------------------

    def to_json(self) -> dict[str, Any]:
        constraints = []
        for i, j in self.constrained_pairs:
            allowed = sorted(
                [a, b]
                for a in self.domains[i]
                for b in self.domains[j]
                if self.compat[i, j, self.value_index[a], self.value_index[b]]
            )
            constraints.append({"scope": [self.variables[i], self.variables[j]], "allowed": allowed})
        return {
            "universe": list(self.universe),
            "variables": list(self.variables),
            "domains": {v: list(dom) for v, dom in zip(self.variables, self.domains)},
            "constraints": constraints,
        }

    def canonical(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Instance):
            return NotImplemented
        return self.canonical() == other.canonical()

    def __hash__(self) -> int:
        return hash(self.canonical())


def parse_instance(data: str | Mapping[str, Any]) -> Instance:
    """Parse an instance from JSON text or an already-decoded mapping."""
    if isinstance(data, str):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as exc:
            raise InstanceError(f"invalid JSON: {exc}") from exc
    if not isinstance(data, Mapping):
        raise InstanceError("instance must be a JSON object")
    try:
        universe = data["universe"]
        variables = data["variables"]
        domains = data["domains"]
        raw_constraints = data.get("constraints", [])
        if not isinstance(universe, list) or not all(isinstance(u, int) and not isinstance(u, bool) for u in universe):
            raise InstanceError("universe must be a list of integers")
        if not isinstance(variables, list) or not all(isinstance(v, str) for v in variables):
            raise InstanceError("variables must be a list of strings")
        if not isinstance(domains, Mapping):
            raise InstanceError("domains must be an object")
        for v, dom in domains.items():
            if not isinstance(dom, list):
                raise InstanceError(f"domain of {v!r} must be a list")
            if len(set(dom)) != len(dom):
                raise InstanceError(f"repeated value in the domain of {v!r}")
        constraints = []
        for c in raw_constraints:
            scope = c["scope"]
            if not isinstance(scope, list) or len(scope) != 2:
                raise InstanceError("constraint scope must name two variables")
            allowed = []
            seen = set()
            for pair in c["allowed"]:
                if not isinstance(pair, list) or len(pair) != 2:
                    raise InstanceError("allowed tuples must have two values")
                t = (pair[0], pair[1])
                if t in seen:
                    raise InstanceError(f"duplicate allowed pair {t!r}")
                seen.add(t)
                allowed.append(t)
            constraints.append((scope[0], scope[1], allowed))
    except (KeyError, TypeError) as exc:
        raise InstanceError(f"malformed instance: {exc}") from exc
    return Instance.build(variables, universe, domains, constraints)


def serialize_instance(inst: Instance, pretty: bool = False) -> str:
    """Canonical JSON text: sorted keys, scopes by variable index, sorted tuples."""
    if pretty:
        return json.dumps(inst.to_json(), sort_keys=True, indent=2)
    return inst.canonical()


# -- arc consistency ------------------------------------------------------


@dataclass(frozen=True, slots=True)
class AcTrace:
    """Removals in the order they happened; ``blame`` is the variable lacking support."""

    removals: tuple[tuple[str, int, str], ...]
    wipeout: bool


def enforce_ac(inst: Instance, rng: random.Random | None = None) -> tuple[Instance, AcTrace]:
    """Reduce domains to the arc-consistent closure.

    Arcs are revised first-in first-out starting from index order; passing
    ``rng`` shuffles the arc queue, which must not change the result. On
    wipeout the input instance is returned unchanged (an instance never has
    an empty domain) and the trace records every removal up to the wipeout.
    """
    n = inst.n
    neighbours: list[list[int]] = [[] for _ in range(n)]
    for i, j in inst.constrained_pairs:
        neighbours[i].append(j)
        neighbours[j].append(i)
    doms = [list(np.flatnonzero(inst.dommask[i])) for i in range(n)]
    arcs = [(i, j) for i in range(n) for j in neighbours[i]]
    arcs.sort()
    if rng is not None:
        rng.shuffle(arcs)
    queue = deque(arcs)
    queued = set(arcs)
    removals: list[tuple[str, int, str]] = []
    compat = inst.compat
    while queue:
        i, j = queue.popleft()
        queued.discard((i, j))
        other = doms[j]
        keep = []
        changed = False
        for a in doms[i]:
            if compat[i, j, a, other].any():
                keep.append(a)
            else:
                changed = True
                removals.append((inst.variables[i], inst.universe[a], inst.variables[j]))
        if not changed:
            continue
        doms[i] = keep
        if not keep:
            return inst, AcTrace(tuple(removals), True)
        pending = [(k, i) for k in neighbours[i] if k != j and (k, i) not in queued]
        if rng is not None:
            rng.shuffle(pending)
        for arc in pending:
            queue.append(arc)
            queued.add(arc)
    reduced = inst.with_domains([[inst.universe[a] for a in dom] for dom in doms])
    return reduced, AcTrace(tuple(removals), False)


def is_arc_consistent(inst: Instance) -> bool:
    """Every point has a support in the domain of every other variable."""
    for i, j in inst.constrained_pairs:
        block = inst.compat[i, j][np.ix_(inst.dommask[i], inst.dommask[j])]
        if not block.any(axis=1).all() or not block.any(axis=0).all():
            return False
    return True


# -- exhaustive search ----------------------------------------------------


@dataclass(frozen=True, slots=True)
class SearchResult:
    status: Literal["solution", "unsat", "budget-exceeded"]
    solution: Assignment | None
    nodes: int


def brute_force_solve(inst: Instance, cap: int = -1) -> SearchResult:
    """First solution in lexicographic order (variables in declaration order,
    values in universe order)."""
    count, first, nodes, exceeded = kernels.count_solutions(
        inst.dommask.view(np.uint8), inst.compat.view(np.uint8), np.arange(inst.n), cap, 1
    )
    if exceeded:
        return SearchResult("budget-exceeded", None, nodes)
    if count == 0:
        return SearchResult("unsat", None, nodes)
    return SearchResult("solution", _decode(inst, first), nodes)


def count_solutions(inst: Instance, cap: int = -1) -> int:
    """Number of solutions; raises :class:`BudgetExceeded` past ``cap`` nodes."""
    count, _, nodes, exceeded = kernels.count_solutions(
        inst.dommask.view(np.uint8), inst.compat.view(np.uint8), np.arange(inst.n), cap, -1
    )
    if exceeded:
        raise BudgetExceeded(f"more than {cap} search nodes")
    return count


def _decode(inst: Instance, idx: Sequence[int]) -> Assignment:
    return {v: inst.universe[a] for v, a in zip(inst.variables, idx)}


def check_assignment(inst: Instance, assignment: Mapping[str, int]) -> bool:
    """Whether a complete assignment satisfies every constraint."""
    if set(assignment) != set(inst.variables):
        raise ValueError("assignment must give a value to every variable, and nothing else")
    idx = []
    for i, v in enumerate(inst.variables):
        u = assignment[v]
        if u not in inst.domains[i]:
            raise ValueError(f"value {u!r} is not in the domain of {v!r}")
        idx.append(inst.value_index[u])
    for i, j in inst.constrained_pairs:
        if not inst.compat[i, j, idx[i], idx[j]]:
            return False
    return True


def restrict(inst: Instance, var: str, value: int) -> Instance:
    """Fix ``var`` to ``value``."""
    i = inst.var_index[var]
    if value not in inst.domains[i]:
        raise ValueError(f"value {value!r} is not in the domain of {var!r}")
    doms = list(inst.domains)
    doms[i] = (value,)
    return inst.with_domains(doms)
