"""Catalogue instances and the pattern classification built on them.

Each catalogue instance is arc consistent, has no solution, and avoids some
small patterns under suitable orders, so a pattern that can be avoided on
one of them does not define a class solved by arc consistency.
"""

from __future__ import annotations

import itertools
import random
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass
from typing import Literal

from .csp import Instance
from .figures import BAD_PATTERNS, maximal_patterns
from .occurrence import (
    DEFAULT_ORDER_CAP,
    CapExceeded,
    OccurrenceResult,
    OrderPair,
    in_class,
    occurs,
    occurs_in_instance,
)
from .pattern import Pattern, canonical_form, is_simple, mergeable_pairs

Literal_ = tuple[str, frozenset[int]]


def _disjunctions(
    variables: Sequence[str],
    universe: Sequence[int],
    domains: dict[str, Sequence[int]],
    clauses: Iterable[tuple[Literal_, Literal_]],
) -> Instance:
    """Instance whose constraints are binary disjunctions ``(x in S) or (y in T)``.

    Clauses on the same scope are conjoined.
    """
    rel: dict[tuple[str, str], set[tuple[int, int]]] = {}
    for (x, sx), (y, sy) in clauses:
        if (y, x) in rel:
            x, sx, y, sy = y, sy, x, sx
        allowed = {(a, b) for a in domains[x] for b in domains[y] if a in sx or b in sy}
        rel[(x, y)] = rel[(x, y)] & allowed if (x, y) in rel else allowed
    return Instance.build(variables, universe, domains, [(x, y, sorted(r)) for (x, y), r in rel.items()])


def _lit(var: str, *values: int) -> Literal_:
    return (var, frozenset(values))


def _pos(var: str) -> Literal_:
    return _lit(var, 1)


def _neg(var: str) -> Literal_:
    return _lit(var, 0)


def _boolean(names: Sequence[str], clauses) -> Instance:
    return _disjunctions(names, [0, 1], {v: [0, 1] for v in names}, clauses)


def _i_k4() -> Instance:
    xs = [f"x{i}" for i in range(1, 5)]
    clauses = [(_lit(f"x{i}", 1), _lit(f"x{j}", 3)) for i, j in [(1, 2), (2, 3), (3, 4), (4, 1)]]
    clauses += [(_lit(f"x{i}", 2), _lit(f"x{j}", 2)) for i, j in [(1, 3), (2, 4)]]
    return _disjunctions(xs, [1, 2, 3], {x: [1, 2, 3] for x in xs}, clauses)


def _i_4() -> Instance:
    xs = ["x0", "x1", "x2", "x3"]
    domains = {"x0": [1, 2, 3], "x1": [0, 1], "x2": [0, 1], "x3": [0, 1]}
    clauses = [(_pos(f"x{i}"), _pos(f"x{j}")) for i, j in itertools.combinations(range(1, 4), 2)]
    clauses += [(_lit("x0", i), _neg(f"x{i}")) for i in range(1, 4)]
    return _disjunctions(xs, [0, 1, 2, 3], domains, clauses)


def _i_sat_2d() -> Instance:
    xs = [f"x{i}" for i in range(1, 6)]
    clauses = [
        (_pos("x1"), _pos("x2")), (_pos("x3"), _pos("x4")),
        (_neg("x1"), _pos("x5")), (_neg("x2"), _pos("x5")),
        (_neg("x3"), _neg("x5")), (_neg("x4"), _neg("x5")),
    ]
    return _boolean(xs, clauses)


def _i_5() -> Instance:
    xs = ["w1", "w2", "w3", "x1", "x2"]
    domains = {"w1": [0, 1], "w2": [0, 1], "w3": [0, 1], "x1": [1, 2, 3], "x2": [1, 2, 3]}
    clauses = [(_neg(f"w{i}"), _lit("x1", i)) for i in range(1, 4)]
    clauses += [(_pos(f"w{i}"), _lit("x2", i)) for i in range(1, 4)]
    return _disjunctions(xs, [0, 1, 2, 3], domains, clauses)


def _i_sat_6() -> Instance:
    xs = [f"x{i}" for i in range(1, 7)]
    clauses = [
        (_neg("x1"), _neg("x2")), (_pos("x1"), _pos("x3")), (_pos("x2"), _pos("x3")),
        (_neg("x3"), _neg("x4")), (_pos("x4"), _pos("x5")), (_pos("x4"), _pos("x6")),
        (_neg("x5"), _neg("x6")),
    ]
    return _boolean(xs, clauses)


def _i_sat_k4() -> Instance:
    xs = [f"x{i}" for i in range(1, 5)]
    clauses = [(_neg("x1"), _neg("x2")), (_pos("x3"), _pos("x4"))]
    clauses += [(_pos(f"x{i}"), _neg(f"x{j}")) for i, j in [(1, 3), (1, 4), (2, 3), (2, 4)]]
    return _boolean(xs, clauses)


def _i_2col_3() -> Instance:
    xs = ["x1", "x2", "x3"]
    clauses = []
    for x, y in itertools.combinations(xs, 2):
        clauses += [(_pos(x), _pos(y)), (_neg(x), _neg(y))]
    return _boolean(xs, clauses)


_BUILDERS = {
    "I_2COL_3": _i_2col_3,
    "I_SAT_K4": _i_sat_k4,
    "I_K4": _i_k4,
    "I_4": _i_4,
    "I_SAT_2D": _i_sat_2d,
    "I_5": _i_5,
    "I_SAT_6": _i_sat_6,
}

# Ordered by the size of their order space, smallest first.
CATALOG_NAMES: tuple[str, ...] = tuple(_BUILDERS)

_CACHE: dict[str, Instance] = {}


def catalog_instance(name: str) -> Instance:
    """A catalogue instance; its natural variable order is declaration order."""
    key = name.upper()
    if key not in _BUILDERS:
        raise KeyError(f"unknown catalogue instance {name!r}")
    if key not in _CACHE:
        _CACHE[key] = _BUILDERS[key]()
    return _CACHE[key]


REFUTING_TABLE: dict[str, str] = {
    "a": "I_K4",
    "b": "I_4",
    "c": "I_SAT_2D",
    "d": "I_5", "e": "I_5", "f": "I_5",
    "g": "I_SAT_6", "h": "I_SAT_6", "i": "I_SAT_6",
    "j": "I_SAT_K4", "k": "I_SAT_K4", "l": "I_SAT_K4", "m": "I_SAT_K4",
    "n": "I_2COL_3", "o": "I_2COL_3", "p": "I_2COL_3", "q": "I_2COL_3", "r": "I_2COL_3", "s": "I_2COL_3",
}


def refuting_table() -> list[tuple[str, Pattern, str]]:
    """``(label, pattern, catalogue instance name)`` for the nineteen refuting patterns."""
    return [(label, BAD_PATTERNS[label], REFUTING_TABLE[label]) for label in BAD_PATTERNS]


def natural_orders(inst: Instance) -> OrderPair:
    return inst.variables, tuple(sorted(inst.universe))


# -- classification -----------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Classification:
    """Outcome of :func:`classify`.

    ``ac-solvable`` carries the maximal pattern and the per-extension
    homomorphisms; ``not-ac-solvable`` carries a catalogue instance and an
    order pair under which the pattern does not occur in it. ``unclassified``
    means neither certificate was found, which the classification theorem
    rules out for simple patterns within its bounds.
    """

    verdict: Literal["ac-solvable", "not-ac-solvable", "unsupported", "unclassified"]
    maximal: str | None = None
    occurrence: OccurrenceResult | None = None
    instance: str | None = None
    orders: OrderPair | None = None
    reason: str | None = None


_MAXIMAL = maximal_patterns()


def classify(p: Pattern, cap: int = DEFAULT_ORDER_CAP) -> Classification:
    if not is_simple(p):
        return Classification("unsupported", reason="pattern is not simple")
    for name, m in _MAXIMAL.items():
        result = occurs(p, m)
        if result.occurs:
            return Classification("ac-solvable", maximal=name, occurrence=result)
    for name in CATALOG_NAMES:
        inst = catalog_instance(name)
        if len(p.variables) > inst.n:
            continue
        try:
            orders = in_class(p, inst, cap)
        except CapExceeded:
            continue
        if orders is not None:
            return Classification("not-ac-solvable", instance=name, orders=orders)
    return Classification("unclassified", reason="no maximal pattern contains it and no catalogue instance refutes it")


def verify_classification(p: Pattern, c: Classification) -> bool:
    """Re-check the certificate carried by a classification."""
    if c.verdict == "ac-solvable":
        return occurs(p, _MAXIMAL[c.maximal]).occurs
    if c.verdict == "not-ac-solvable":
        inst = catalog_instance(c.instance)
        return not occurs_in_instance(p, inst, *c.orders).occurs
    return c.verdict == "unsupported" and not is_simple(p)


# -- enumeration of simple patterns -------------------------------------------


def _var_partial_orders(names: Sequence[str]) -> list[frozenset[tuple[str, str]]]:
    """All strict partial orders on ``names`` (as transitively closed pair sets)."""
    pairs = [(a, b) for a in names for b in names if a != b]
    out = []
    for mask in range(1 << len(pairs)):
        rel = {pairs[k] for k in range(len(pairs)) if mask >> k & 1}
        if any((b, a) in rel for a, b in rel):
            continue
        if any((a, c) not in rel for a, b in rel for b2, c in rel if b == b2 and a != c):
            continue
        if any(a == c for a, b in rel for b2, c in rel if b == b2):
            continue
        out.append(frozenset(rel))
    return out


def _structures(shape: Sequence[int], max_neg: int) -> Iterator[Pattern]:
    """Unordered patterns with the given points per variable and no mergeable points."""
    names = [f"v{k}" for k in range(len(shape))]
    points = {v: [f"p{m}" for m in range(size)] for v, size in zip(names, shape)}
    cross = [
        ((v, a), (w, b))
        for i, v in enumerate(names)
        for w in names[i + 1:]
        for a in points[v]
        for b in points[w]
    ]
    neg_sets = []
    for k in range(max_neg + 1):
        for combo in itertools.combinations(range(len(cross)), k):
            var_pairs = [(cross[c][0][0], cross[c][1][0]) for c in combo]
            if len(set(var_pairs)) == len(var_pairs):
                neg_sets.append(combo)
    for combo in neg_sets:
        free = [c for c in range(len(cross)) if c not in combo]
        negative = [cross[c] for c in combo]
        for mask in range(1 << len(free)):
            positive = [cross[free[k]] for k in range(len(free)) if mask >> k & 1]
            p = Pattern.build(points, positive=positive, negative=negative, variables=names)
            if not _has_mergeable(p):
                yield p


def _has_mergeable(p: Pattern) -> bool:
    return bool(mergeable_pairs(p))


def enumerate_simple_patterns(max_vars: int = 3, max_pts: int = 2, max_neg: int = 2) -> Iterator[Pattern]:
    """Every simple pattern within the bounds, once per isomorphism class.

    Negative edges never share a pair of variables. Patterns come out grouped
    by shape, smaller shapes first, in a deterministic order.
    """
    if max_vars > 3 or max_pts > 2 or max_neg > 2:
        raise ValueError("enumeration is limited to 3 variables, 2 points per variable, 2 negative edges")
    seen: set[str] = set()
    for k in range(1, max_vars + 1):
        for shape in itertools.combinations_with_replacement(range(1, max_pts + 1), k):
            names = [f"v{i}" for i in range(k)]
            var_orders = _var_partial_orders(names)
            bases: dict[str, Pattern] = {}
            for p in _structures(shape, max_neg):
                key = canonical_form(p)
                if key not in bases:
                    bases[key] = p
            for key in sorted(bases):
                base = bases[key]
                per_var_dom = []
                for v in base.variables:
                    pts = base.points_of(v)
                    if len(pts) == 2:
                        per_var_dom.append([(), ((pts[0], pts[1]),), ((pts[1], pts[0]),)])
                    else:
                        per_var_dom.append([()])
                for var_order in var_orders:
                    for doms in itertools.product(*per_var_dom):
                        dom_order = frozenset(pr for d in doms for pr in d)
                        p = Pattern(base.variables, base.points, base.cpt_edges, var_order, dom_order)
                        if not is_simple(p):
                            continue
                        ckey = canonical_form(p)
                        if ckey in seen:
                            continue
                        seen.add(ckey)
                        yield p


# -- corpus generators ----------------------------------------------------------


def random_instance(
    n_vars: int, dom_size: int, density: float, seed: int | random.Random, constrained: float = 1.0
) -> Instance:
    """Instance on ``x1..xn`` over values ``0..d-1``; each pair is constrained
    with probability ``constrained`` and each tuple allowed with probability ``density``."""
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    names = [f"x{i}" for i in range(1, n_vars + 1)]
    values = list(range(dom_size))
    constraints = []
    for i, j in itertools.combinations(range(n_vars), 2):
        if rng.random() >= constrained:
            continue
        allowed = [(a, b) for a in values for b in values if rng.random() < density]
        constraints.append((names[i], names[j], allowed))
    return Instance.build(names, values, {v: values for v in names}, constraints)


def tree_instance(n_vars: int, dom_size: int, density: float, seed: int) -> Instance:
    """Random relations on the edges of a random tree (vertex ``i`` hangs off an earlier vertex)."""
    rng = random.Random(seed)
    names = [f"x{i}" for i in range(1, n_vars + 1)]
    values = list(range(dom_size))
    constraints = []
    for i in range(1, n_vars):
        parent = rng.randrange(i)
        allowed = [(a, b) for a in values for b in values if rng.random() < density]
        constraints.append((names[parent], names[i], allowed))
    return Instance.build(names, values, {v: values for v in names}, constraints)


def _flip(inst: Instance, pairs: Iterable[tuple[str, int, str, int]]) -> Instance:
    compat = inst.compat.copy()
    for x, a, y, b in pairs:
        i, j = inst.var_index[x], inst.var_index[y]
        ia, ib = inst.value_index[a], inst.value_index[b]
        compat[i, j, ia, ib] = compat[j, i, ib, ia] = True
    return Instance(inst.variables, inst.universe, inst.domains, compat)


def gen_pattern_free_instance(
    p: Pattern, n_vars: int, dom_size: int, density: float, seed: int
) -> tuple[Instance, tuple[str, ...], tuple[int, ...]]:
    """Random instance in which ``p`` does not occur under the identity orders.

    While an occurrence exists, one of its negative edges (chosen at random)
    becomes compatible. Compatibilities only grow, so this terminates.
    """
    rng = random.Random(seed)
    inst = random_instance(n_vars, dom_size, density, rng)
    var_order, dom_order = inst.variables, tuple(inst.universe)
    negatives = p.negative
    while True:
        found = occurs_in_instance(p, inst, var_order, dom_order)
        if not found.occurs:
            return inst, var_order, dom_order
        m = found.witnesses[0]
        a, b = negatives[rng.randrange(len(negatives))]
        (x, u), (y, w) = m[a], m[b]
        inst = _flip(inst, [(x, u, y, w)])
