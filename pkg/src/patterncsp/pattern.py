"""Partially-ordered forbidden patterns.

A pattern has variables, points (each owned by one variable), a partial
compatibility function on pairs of points of distinct variables, a strict
partial order on variables, a strict partial order on the points of each
variable, and explicit disequalities between points of one variable.

Points are ``(variable, name)`` pairs. Order relations are stored as their
generating pairs; the ``*_closure`` properties give the transitive closures.
"""

from __future__ import annotations

import itertools
import json
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from functools import cached_property
from typing import Any

import numpy as np

Point = tuple[str, str]


class PatternError(ValueError):
    """Raised for malformed pattern data."""


def transitive_closure(pairs: Iterable[tuple[Any, Any]]) -> frozenset[tuple[Any, Any]]:
    """Closure of a relation given as pairs; raises if it has a cycle."""
    succ: dict[Any, set[Any]] = {}
    for a, b in pairs:
        succ.setdefault(a, set()).add(b)
    closure = set()
    for start in succ:
        stack = list(succ[start])
        seen = set()
        while stack:
            b = stack.pop()
            if b in seen:
                continue
            seen.add(b)
            stack.extend(succ.get(b, ()))
        if start in seen:
            raise PatternError(f"order relation is cyclic through {start!r}")
        closure.update((start, b) for b in seen)
    return frozenset(closure)


def _pair(p: Point, q: Point) -> tuple[Point, Point]:
    return (p, q) if p <= q else (q, p)


@dataclass(frozen=True, eq=False)
class Pattern:
    variables: tuple[str, ...]
    points: tuple[Point, ...]
    cpt_edges: frozenset[tuple[Point, Point, bool]]
    var_order: frozenset[tuple[str, str]] = frozenset()
    dom_order: frozenset[tuple[Point, Point]] = frozenset()
    diseq: frozenset[tuple[Point, Point]] = frozenset()

    def __post_init__(self) -> None:
        if len(set(self.variables)) != len(self.variables):
            raise PatternError("duplicate pattern variable")
        if len(set(self.points)) != len(self.points):
            raise PatternError("duplicate point")
        vars_ = set(self.variables)
        pts = set(self.points)
        for v, _ in self.points:
            if v not in vars_:
                raise PatternError(f"point on unknown variable {v!r}")
        if {v for v, _ in self.points} != vars_:
            raise PatternError("every variable needs at least one point")
        seen: set[tuple[Point, Point]] = set()
        for p, q, _ in self.cpt_edges:
            if p not in pts or q not in pts:
                raise PatternError(f"edge on unknown point {(p, q)!r}")
            if p[0] == q[0]:
                raise PatternError(f"edge {(p, q)!r} joins points of one variable")
            if (p, q) != _pair(p, q):
                raise PatternError("edges must be stored with sorted endpoints")
            if (p, q) in seen:
                raise PatternError(f"edge {(p, q)!r} given twice")
            seen.add((p, q))
        for x, y in self.var_order:
            if x not in vars_ or y not in vars_ or x == y:
                raise PatternError(f"bad variable order pair {(x, y)!r}")
        for p, q in self.dom_order | self.diseq:
            if p not in pts or q not in pts or p[0] != q[0] or p == q:
                raise PatternError(f"bad point pair {(p, q)!r}")
        # validates acyclicity
        self.var_closure
        self.dom_closure

    @classmethod
    def build(
        cls,
        points: Mapping[str, Sequence[str]],
        positive: Iterable[tuple[Point, Point]] = (),
        negative: Iterable[tuple[Point, Point]] = (),
        var_order: Iterable[tuple[str, str]] = (),
        dom_order: Iterable[tuple[Point, Point]] = (),
        diseq: Iterable[tuple[Point, Point]] = (),
        variables: Sequence[str] | None = None,
    ) -> Pattern:
        variables = tuple(variables if variables is not None else points)
        pts = tuple((v, name) for v in variables for name in points.get(v, ()))
        edges = []
        seen: set[tuple[Point, Point]] = set()
        for value, group in ((True, positive), (False, negative)):
            for p, q in group:
                p, q = tuple(p), tuple(q)
                key = _pair(p, q)
                if key in seen:
                    raise PatternError(f"edge {key!r} given twice")
                seen.add(key)
                edges.append((*key, value))
        return cls(
            variables,
            pts,
            frozenset(edges),
            frozenset((x, y) for x, y in var_order),
            frozenset((tuple(p), tuple(q)) for p, q in dom_order),
            frozenset(_pair(tuple(p), tuple(q)) for p, q in diseq),
        )

    # -- structure --------------------------------------------------------

    @cached_property
    def cpt_map(self) -> dict[tuple[Point, Point], bool]:
        out = {}
        for p, q, value in self.cpt_edges:
            out[(p, q)] = value
            out[(q, p)] = value
        return out

    def cpt(self, p: Point, q: Point) -> bool | None:
        """TRUE, FALSE, or None when undefined."""
        return self.cpt_map.get((p, q))

    @cached_property
    def var_closure(self) -> frozenset[tuple[str, str]]:
        return transitive_closure(self.var_order)

    @cached_property
    def dom_closure(self) -> frozenset[tuple[Point, Point]]:
        return transitive_closure(self.dom_order)

    @cached_property
    def all_diseq(self) -> frozenset[tuple[Point, Point]]:
        """Explicit disequalities plus implied ones: ordered pairs, and pairs
        with a common neighbour that is compatible with one and not the other."""
        out = set(self.diseq)
        out.update(_pair(p, q) for p, q in self.dom_closure)
        for v in self.variables:
            for a, b in itertools.combinations(self.points_of(v), 2):
                for r in self.points:
                    ca, cb = self.cpt(a, r), self.cpt(b, r)
                    if ca is not None and cb is not None and ca != cb:
                        out.add(_pair(a, b))
                        break
        return frozenset(out)

    def points_of(self, var: str) -> tuple[Point, ...]:
        return tuple(p for p in self.points if p[0] == var)

    @property
    def positive(self) -> list[tuple[Point, Point]]:
        return sorted((p, q) for p, q, v in self.cpt_edges if v)

    @property
    def negative(self) -> list[tuple[Point, Point]]:
        return sorted((p, q) for p, q, v in self.cpt_edges if not v)

    def is_var_total(self) -> bool:
        n = len(self.variables)
        return len(self.var_closure) == n * (n - 1) // 2

    def is_dom_total(self) -> bool:
        closure = self.dom_closure
        for v in self.variables:
            k = len(self.points_of(v))
            if sum(1 for p, _ in closure if p[0] == v) != k * (k - 1) // 2:
                return False
        return True

    def comparable(self, p: Point, q: Point) -> bool:
        return (p, q) in self.dom_closure or (q, p) in self.dom_closure

    # -- serialization ----------------------------------------------------

    def to_json(self) -> dict[str, Any]:
        return {
            "variables": list(self.variables),
            "points": {v: [name for _, name in self.points_of(v)] for v in self.variables},
            "positive": [[list(p), list(q)] for p, q in self.positive],
            "negative": [[list(p), list(q)] for p, q in self.negative],
            "varOrder": [list(pair) for pair in sorted(self.var_order)],
            "domOrder": [[list(p), list(q)] for p, q in sorted(self.dom_order)],
            "diseq": [[list(p), list(q)] for p, q in sorted(self.diseq)],
        }

    def canonical(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Pattern):
            return NotImplemented
        return self.canonical() == other.canonical()

    def __hash__(self) -> int:
        return hash(self.canonical())

    # -- search encoding --------------------------------------------------

    @cached_property
    def memo(self) -> dict[str, Any]:
        """Per-pattern cache for derived search structures."""
        return {}

    @cached_property
    def search_plan(self) -> SearchPlan:
        return SearchPlan.from_pattern(self)


@dataclass(frozen=True, eq=False)
class SearchPlan:
    """Array encoding of a pattern used as the source of a homomorphism search.

    Variables are visited most-connected first so that compatibility checks
    prune early; ``points`` lists the pattern points in visiting order.
    """

    var_seq: tuple[str, ...]
    points: tuple[Point, ...]
    s_var: np.ndarray
    s_cpt: np.ndarray
    s_lt: np.ndarray
    s_ne: np.ndarray
    sv_lt: np.ndarray

    @classmethod
    def from_pattern(cls, p: Pattern) -> SearchPlan:
        weight = {v: 0 for v in p.variables}
        link: dict[tuple[str, str], int] = {}
        for a, b, _ in p.cpt_edges:
            weight[a[0]] += 1
            weight[b[0]] += 1
            link[(a[0], b[0])] = link.get((a[0], b[0]), 0) + 1
            link[(b[0], a[0])] = link.get((b[0], a[0]), 0) + 1
        remaining = list(p.variables)
        seq: list[str] = []
        while remaining:
            best = max(
                remaining,
                key=lambda v: (sum(link.get((v, w), 0) for w in seq), weight[v], -p.variables.index(v)),
            )
            seq.append(best)
            remaining.remove(best)
        points = tuple(pt for v in seq for pt in p.points_of(v))
        S, SV = len(points), len(seq)
        pidx = {pt: k for k, pt in enumerate(points)}
        vidx = {v: k for k, v in enumerate(seq)}
        s_var = np.array([vidx[pt[0]] for pt in points], dtype=np.intc)
        s_cpt = np.full((S, S), -1, dtype=np.int8)
        for a, b, value in p.cpt_edges:
            s_cpt[pidx[a], pidx[b]] = s_cpt[pidx[b], pidx[a]] = int(value)
        s_lt = np.zeros((S, S), dtype=np.int8)
        for a, b in p.dom_closure:
            s_lt[pidx[a], pidx[b]] = 1
        s_ne = np.zeros((S, S), dtype=np.int8)
        for a, b in p.all_diseq:
            s_ne[pidx[a], pidx[b]] = s_ne[pidx[b], pidx[a]] = 1
        sv_lt = np.zeros((SV, SV), dtype=np.int8)
        for x, y in p.var_closure:
            sv_lt[vidx[x], vidx[y]] = 1
        for arr in (s_var, s_cpt, s_lt, s_ne, sv_lt):
            arr.setflags(write=False)
        return cls(tuple(seq), points, s_var, s_cpt, s_lt, s_ne, sv_lt)


# -- parsing ----------------------------------------------------------------


def parse_pattern(data: str | Mapping[str, Any]) -> Pattern:
    if isinstance(data, str):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as exc:
            raise PatternError(f"invalid JSON: {exc}") from exc
    if not isinstance(data, Mapping):
        raise PatternError("pattern must be a JSON object")

    def point(raw: Any) -> Point:
        if not isinstance(raw, list) or len(raw) != 2 or not all(isinstance(s, str) for s in raw):
            raise PatternError(f"point must be [variable, name], got {raw!r}")
        return (raw[0], raw[1])

    def pairs(key: str) -> list[tuple[Point, Point]]:
        raw = data.get(key, [])
        if not isinstance(raw, list):
            raise PatternError(f"{key} must be a list")
        out = []
        for item in raw:
            if not isinstance(item, list) or len(item) != 2:
                raise PatternError(f"{key} entries must be pairs")
            out.append((point(item[0]), point(item[1])))
        return out

    try:
        variables = data["variables"]
        points = data["points"]
    except KeyError as exc:
        raise PatternError(f"missing field {exc}") from exc
    if not isinstance(variables, list) or not all(isinstance(v, str) for v in variables):
        raise PatternError("variables must be a list of strings")
    if not isinstance(points, Mapping):
        raise PatternError("points must be an object")
    for v in points:
        if v not in variables:
            raise PatternError(f"points given for unknown variable {v!r}")
    var_order = data.get("varOrder", [])
    if not isinstance(var_order, list) or not all(
        isinstance(pr, list) and len(pr) == 2 and all(isinstance(s, str) for s in pr) for pr in var_order
    ):
        raise PatternError("varOrder must be a list of variable pairs")
    return Pattern.build(
        {v: list(points.get(v, [])) for v in variables},
        positive=pairs("positive"),
        negative=pairs("negative"),
        var_order=[tuple(pr) for pr in var_order],
        dom_order=pairs("domOrder"),
        diseq=pairs("diseq"),
        variables=variables,
    )


def serialize_pattern(p: Pattern, pretty: bool = False) -> str:
    if pretty:
        return json.dumps(p.to_json(), sort_keys=True, indent=2)
    return p.canonical()


# -- structural queries -----------------------------------------------------


def mergeable_pairs(p: Pattern) -> list[tuple[Point, Point]]:
    """Pairs of distinct points of one variable that no third point separates
    (no point is compatible with one and incompatible with the other)."""
    out = []
    for v in p.variables:
        for a, b in itertools.combinations(p.points_of(v), 2):
            for r in p.points:
                ca, cb = p.cpt(a, r), p.cpt(b, r)
                if ca is not None and cb is not None and ca != cb:
                    break
            else:
                out.append((a, b))
    return out


def dangling_points(p: Pattern) -> list[Point]:
    """Points outside the point order with at most one defined compatibility,
    which is TRUE."""
    ordered = {a for pair in p.dom_order for a in pair}
    out = []
    for a in p.points:
        if a in ordered:
            continue
        defined = [p.cpt(a, r) for r in p.points if p.cpt(a, r) is not None]
        if len(defined) == 0 or (len(defined) == 1 and defined[0]):
            out.append(a)
    return out


def is_simple(p: Pattern) -> bool:
    return not mergeable_pairs(p) and not dangling_points(p)


def inv_dom(p: Pattern) -> Pattern:
    """Reverse the order on the points of every variable."""
    return Pattern(p.variables, p.points, p.cpt_edges, p.var_order,
                   frozenset((b, a) for a, b in p.dom_order), p.diseq)


def inv_var(p: Pattern) -> Pattern:
    """Reverse the order on the variables."""
    return Pattern(p.variables, p.points, p.cpt_edges,
                   frozenset((y, x) for x, y in p.var_order), p.dom_order, p.diseq)


def unordered(p: Pattern) -> Pattern:
    """Drop both orders; disequalities are kept."""
    return Pattern(p.variables, p.points, p.cpt_edges, frozenset(), frozenset(), p.diseq)


def without_var_order(p: Pattern) -> Pattern:
    return Pattern(p.variables, p.points, p.cpt_edges, frozenset(), p.dom_order, p.diseq)


def without_dom_order(p: Pattern) -> Pattern:
    """Drop the point order, keeping the distinctness it implied."""
    return Pattern(p.variables, p.points, p.cpt_edges, p.var_order, frozenset(), p.all_diseq)


def canonical_form(p: Pattern) -> str:
    """A string equal for two patterns exactly when they are isomorphic.

    Minimises an encoding over all relabellings of variables and of the points
    within each variable. Intended for the small patterns used in enumeration.
    """
    best = None
    vars_ = p.variables
    per_var = {v: p.points_of(v) for v in vars_}
    for vperm in itertools.permutations(vars_):
        vpos = {v: k for k, v in enumerate(vperm)}
        for pperms in itertools.product(*(itertools.permutations(per_var[v]) for v in vperm)):
            label = {}
            for k, perm in enumerate(pperms):
                for m, pt in enumerate(perm):
                    label[pt] = (k, m)
            edges = tuple(sorted(
                tuple(sorted((label[a], label[b]))) + (int(val),) for a, b, val in p.cpt_edges
            ))
            key = (
                tuple(len(per_var[v]) for v in vperm),
                edges,
                tuple(sorted((vpos[x], vpos[y]) for x, y in p.var_closure)),
                tuple(sorted((label[a], label[b]) for a, b in p.dom_closure)),
                tuple(sorted(tuple(sorted((label[a], label[b]))) for a, b in p.diseq)),
            )
            if best is None or key < best:
                best = key
    return repr(best)


def relabel(p: Pattern, var_names: Mapping[str, str]) -> Pattern:
    """Rename variables (point names are kept)."""
    def pt(a: Point) -> Point:
        return (var_names[a[0]], a[1])

    return Pattern(
        tuple(var_names[v] for v in p.variables),
        tuple(pt(a) for a in p.points),
        frozenset((*_pair(pt(a), pt(b)), val) for a, b, val in p.cpt_edges),
        frozenset((var_names[x], var_names[y]) for x, y in p.var_order),
        frozenset((pt(a), pt(b)) for a, b in p.dom_order),
        frozenset(_pair(pt(a), pt(b)) for a, b in p.diseq),
    )
