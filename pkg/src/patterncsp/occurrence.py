"""Homomorphisms, consistent linear extensions, and pattern occurrence.

A homomorphism from a pattern ``P`` into a totally ordered target preserves
defined compatibilities, maps variables injectively, keeps strict variable
and point orders strict, and sends disequal points to distinct points. Points
may otherwise share an image.

``P`` occurs in a pattern ``Q`` when it maps into every consistent linear
extension of ``Q``; it occurs in an instance under a pair of total orders
when it maps into the instance's point graph ordered that way.
"""

from __future__ import annotations

import itertools
from collections.abc import Iterator, Mapping, Sequence
from dataclasses import dataclass
from typing import Literal

import numpy as np

from . import kernels
from .csp import Instance
from .pattern import (
    Pattern,
    PatternError,
    Point,
    SearchPlan,
    mergeable_pairs,
    transitive_closure,
    without_dom_order,
    without_var_order,
)

Homomorphism = dict[Point, Point]
InstanceMap = dict[Point, tuple[str, int]]
OrderPair = tuple[tuple[str, ...], tuple[int, ...]]

DEFAULT_ORDER_CAP = 10**7


class CapExceeded(RuntimeError):
    """Raised when an exhaustive order search would exceed its cap."""


# -- linear extensions --------------------------------------------------------


def linear_extensions(items: Sequence, lt: frozenset | set) -> Iterator[tuple]:
    """All total orders of ``items`` (low to high) extending the strict order ``lt``."""
    items = list(items)
    preds = {a: {b for b in items if (b, a) in lt} for a in items}

    def rec(placed: list, rest: list) -> Iterator[tuple]:
        if not rest:
            yield tuple(placed)
            return
        done = set(placed)
        for a in rest:
            if preds[a] <= done:
                placed.append(a)
                yield from rec(placed, [b for b in rest if b != a])
                placed.pop()

    yield from rec([], items)


def _partitions(items: list, joinable) -> Iterator[list[list]]:
    """Set partitions of ``items`` whose blocks are pairwise joinable."""
    if not items:
        yield []
        return
    head, tail = items[0], items[1:]
    for rest in _partitions(tail, joinable):
        yield [[head]] + rest
        for k, block in enumerate(rest):
            if all(joinable(head, b) for b in block):
                yield rest[:k] + [[head] + block] + rest[k + 1:]


@dataclass(frozen=True, eq=False)
class LinearExtension:
    """A totally ordered pattern and the map from original points to its points."""

    pattern: Pattern
    merge: dict[Point, Point]


def consistent_linear_extensions(p: Pattern) -> Iterator[LinearExtension]:
    """Merge any set of pairwise mergeable, incomparable, not-disequal points of
    one variable, then totally order variables and points in every way that
    respects the merged orders. Merges producing a cyclic point order or a
    compatibility conflict are skipped."""
    mergeable = {frozenset(pr) for pr in mergeable_pairs(p)}
    diseq = {frozenset(pr) for pr in p.diseq}

    def joinable(a: Point, b: Point) -> bool:
        key = frozenset((a, b))
        return key in mergeable and key not in diseq and not p.comparable(a, b)

    per_var = [list(_partitions(list(p.points_of(v)), joinable)) for v in p.variables]
    var_exts = list(linear_extensions(p.variables, p.var_closure))
    order_index = {pt: k for k, pt in enumerate(p.points)}
    for choice in itertools.product(*per_var):
        rep: dict[Point, Point] = {}
        for blocks in choice:
            for block in blocks:
                head = min(block, key=order_index.__getitem__)
                for a in block:
                    rep[a] = head
        edges: dict[tuple[Point, Point], bool] = {}
        conflict = False
        for a, b, value in p.cpt_edges:
            ra, rb = rep[a], rep[b]
            key = (ra, rb) if ra <= rb else (rb, ra)
            if edges.setdefault(key, value) != value:
                conflict = True
                break
        if conflict:
            continue
        dom = {(rep[a], rep[b]) for a, b in p.dom_order}
        try:
            dom_closure = transitive_closure(dom)
        except PatternError:
            continue
        points = tuple(pt for pt in p.points if rep[pt] == pt)
        diseq_merged = frozenset(
            (rep[a], rep[b]) if rep[a] <= rep[b] else (rep[b], rep[a]) for a, b in p.diseq
        )
        point_exts = [
            list(linear_extensions([pt for pt in points if pt[0] == v], dom_closure))
            for v in p.variables
        ]
        cpt_edges = frozenset((a, b, v) for (a, b), v in edges.items())
        for var_chain in var_exts:
            var_order = frozenset(zip(var_chain, var_chain[1:]))
            for chains in itertools.product(*point_exts):
                dom_order = frozenset(pr for chain in chains for pr in zip(chain, chain[1:]))
                ext = Pattern(p.variables, points, cpt_edges, var_order, dom_order, diseq_merged)
                yield LinearExtension(ext, dict(rep))


# -- homomorphism search ------------------------------------------------------


def _run(
    plan: SearchPlan,
    t_var: np.ndarray,
    t_rank: np.ndarray,
    tv_rank: np.ndarray,
    t_cpt: np.ndarray,
    tv_start: np.ndarray,
    tv_pts: np.ndarray,
    limit: int,
    var_image: Sequence[int] | None = None,
) -> list[list[int]]:
    if var_image is None:
        var_image = [-1] * len(plan.var_seq)
    return kernels.find_homomorphisms(
        plan.s_var, plan.s_cpt, plan.s_lt, plan.s_ne, plan.sv_lt, list(var_image),
        t_var, t_rank, tv_rank, t_cpt, tv_start, tv_pts, limit,
    )


def _chain_rank(items: Sequence, lt: frozenset) -> dict:
    """Rank of each item in a total order given by its closure."""
    return {a: sum(1 for b in items if (b, a) in lt) for a in items}


def find_homomorphism(src: Pattern, tgt: Pattern) -> Homomorphism | None:
    """A homomorphism from ``src`` into the totally ordered pattern ``tgt``."""
    if not tgt.is_var_total() or not tgt.is_dom_total():
        raise ValueError("target pattern must be totally ordered")
    maps = _pattern_homs(src, tgt, 1)
    return maps[0] if maps else None


@dataclass(frozen=True, eq=False)
class _TargetArrays:
    points: list[Point]
    t_var: np.ndarray
    t_rank: np.ndarray
    tv_rank: np.ndarray
    t_cpt: np.ndarray
    tv_start: np.ndarray
    tv_pts: np.ndarray


def _target_arrays(tgt: Pattern) -> _TargetArrays:
    cached = tgt.memo.get("target")
    if cached is not None:
        return cached
    tpoints = [pt for v in tgt.variables for pt in tgt.points_of(v)]
    tidx = {pt: k for k, pt in enumerate(tpoints)}
    vidx = {v: k for k, v in enumerate(tgt.variables)}
    t_var = np.array([vidx[pt[0]] for pt in tpoints], dtype=np.intc)
    prank = _chain_rank(tpoints, tgt.dom_closure)
    t_rank = np.array([prank[pt] for pt in tpoints], dtype=np.intc)
    vrank = _chain_rank(tgt.variables, tgt.var_closure)
    tv_rank = np.array([vrank[v] for v in tgt.variables], dtype=np.intc)
    T = len(tpoints)
    t_cpt = np.full((T, T), -1, dtype=np.int8)
    for a, b, value in tgt.cpt_edges:
        t_cpt[tidx[a], tidx[b]] = t_cpt[tidx[b], tidx[a]] = int(value)
    tv_start = np.searchsorted(t_var, np.arange(len(tgt.variables) + 1)).astype(np.intc)
    tv_pts = np.arange(T, dtype=np.intc)
    arrays = _TargetArrays(tpoints, t_var, t_rank, tv_rank, t_cpt, tv_start, tv_pts)
    tgt.memo["target"] = arrays
    return arrays


def _pattern_homs(src: Pattern, tgt: Pattern, limit: int) -> list[Homomorphism]:
    plan = src.search_plan
    t = _target_arrays(tgt)
    raw = _run(plan, t.t_var, t.t_rank, t.tv_rank, t.t_cpt, t.tv_start, t.tv_pts, limit)
    return [{plan.points[k]: t.points[i] for k, i in enumerate(m)} for m in raw]


def _extensions(p: Pattern) -> list[LinearExtension]:
    exts = p.memo.get("extensions")
    if exts is None:
        exts = p.memo["extensions"] = list(consistent_linear_extensions(p))
    return exts


@dataclass(frozen=True, slots=True)
class OccurrenceResult:
    verdict: Literal["occurs", "not-occurs"]
    witnesses: tuple = ()
    extension: Pattern | None = None

    @property
    def occurs(self) -> bool:
        return self.verdict == "occurs"


def occurs(src: Pattern, tgt: Pattern) -> OccurrenceResult:
    """Whether ``src`` occurs in ``tgt``; witnesses are ``(extension, map)`` pairs,
    one per consistent linear extension, otherwise the extension that fails."""
    witnesses = []
    for ext in _extensions(tgt):
        maps = _pattern_homs(src, ext.pattern, 1)
        h = maps[0] if maps else None
        if h is None:
            return OccurrenceResult("not-occurs", extension=ext.pattern)
        witnesses.append((ext.pattern, h))
    return OccurrenceResult("occurs", witnesses=tuple(witnesses))


# -- occurrence in instances ---------------------------------------------------


def _ranks(inst: Instance, var_order: Sequence[str], dom_order: Sequence[int]) -> tuple[np.ndarray, np.ndarray]:
    if sorted(var_order) != sorted(inst.variables):
        raise ValueError("variable order must list every variable once")
    if sorted(dom_order) != sorted(inst.universe):
        raise ValueError("domain order must list every universe value once")
    tv_rank = np.empty(inst.n, dtype=np.intc)
    for r, v in enumerate(var_order):
        tv_rank[inst.var_index[v]] = r
    urank = np.empty(len(inst.universe), dtype=np.intc)
    for r, u in enumerate(dom_order):
        urank[inst.value_index[u]] = r
    return tv_rank, urank


def instance_homomorphisms(
    src: Pattern,
    inst: Instance,
    tv_rank: np.ndarray,
    value_rank: np.ndarray,
    limit: int = 1,
    var_image: Mapping[str, str] | None = None,
) -> list[InstanceMap]:
    """Homomorphisms from ``src`` into ``inst`` under the given ranks.

    ``tv_rank[i]`` ranks instance variable ``i``; ``value_rank[a]`` ranks
    universe index ``a``. ``var_image`` pins pattern variables to instance
    variables.
    """
    plan = src.search_plan
    point_var, point_val, tv_start, t_cpt = inst.point_table
    image = [-1] * len(plan.var_seq)
    if var_image:
        for v, target in var_image.items():
            image[plan.var_seq.index(v)] = inst.var_index[target]
        pinned = [x for x in image if x >= 0]
        if len(set(pinned)) != len(pinned):
            return []
        for (u, w) in src.var_closure:
            iu, iw = image[plan.var_seq.index(u)], image[plan.var_seq.index(w)]
            if iu >= 0 and iw >= 0 and not tv_rank[iu] < tv_rank[iw]:
                return []
    t_rank = np.asarray(value_rank, dtype=np.intc)[point_val]
    tv_pts = np.arange(len(point_var), dtype=np.intc)
    raw = _run(plan, point_var, t_rank, tv_rank, t_cpt, tv_start, tv_pts, limit, image)
    out = []
    for m in raw:
        out.append({
            plan.points[k]: (inst.variables[point_var[t]], inst.universe[point_val[t]])
            for k, t in enumerate(m)
        })
    return out


def occurs_in_instance(
    src: Pattern, inst: Instance, var_order: Sequence[str], dom_order: Sequence[int]
) -> OccurrenceResult:
    """Whether ``src`` maps into ``inst`` ordered by ``var_order`` (variables,
    low to high) and ``dom_order`` (universe values, low to high)."""
    tv_rank, urank = _ranks(inst, var_order, dom_order)
    maps = instance_homomorphisms(src, inst, tv_rank, urank, limit=1)
    if maps:
        return OccurrenceResult("occurs", witnesses=(maps[0],))
    return OccurrenceResult("not-occurs")


def _order_space(inst: Instance, cap: int) -> tuple[list[tuple[int, ...]], list[tuple[int, ...]]]:
    n, d = inst.n, len(inst.universe)
    total = 1
    for k in range(2, n + 1):
        total *= k
    for k in range(2, d + 1):
        total *= k
    if total > cap:
        raise CapExceeded(f"{n}! * {d}! order pairs exceeds the cap of {cap}")
    return list(itertools.permutations(range(n))), list(itertools.permutations(range(d)))


def _rank_matrix(perms: list[tuple[int, ...]], size: int) -> np.ndarray:
    ranks = np.empty((len(perms), size), dtype=np.intc)
    idx = np.arange(size)
    for r, perm in enumerate(perms):
        ranks[r, list(perm)] = idx
    return ranks


def in_class(src: Pattern, inst: Instance, cap: int = DEFAULT_ORDER_CAP) -> OrderPair | None:
    """First pair of total orders under which ``src`` does not occur in ``inst``.

    Order pairs are scanned with variable orders outermost, both in the
    lexicographic order of permutations of declaration order. Returns None
    when ``src`` occurs under every pair.

    Every order-free homomorphism is enumerated once and reduced to the
    variable and value precedences it needs; a pair of orders admits an
    occurrence exactly when some homomorphism's precedences all hold.
    """
    var_perms, dom_perms = _order_space(inst, cap)
    loose = without_dom_order(without_var_order(src))
    n, d = inst.n, len(inst.universe)
    zeros_v = np.zeros(n, dtype=np.intc)
    zeros_d = np.zeros(d, dtype=np.intc)
    maps = instance_homomorphisms(loose, inst, zeros_v, zeros_d, limit=-1)
    signatures = set()
    for m in maps:
        var_img = {u: inst.var_index[m[src.points_of(u)[0]][0]] for u in src.variables}
        vpairs = frozenset((var_img[u], var_img[w]) for u, w in src.var_closure)
        dpairs = frozenset(
            (inst.value_index[m[a][1]], inst.value_index[m[b][1]]) for a, b in src.dom_closure
        )
        signatures.add((vpairs, dpairs))
    if not signatures:
        return (
            tuple(inst.variables[i] for i in var_perms[0]),
            tuple(inst.universe[a] for a in dom_perms[0]),
        )
    if any(not v and not dv for v, dv in signatures):
        return None
    vr = _rank_matrix(var_perms, n)
    ur = _rank_matrix(dom_perms, d)
    sigs = sorted(signatures, key=lambda s: (sorted(s[0]), sorted(s[1])))
    V = np.ones((len(sigs), len(var_perms)), dtype=bool)
    W = np.ones((len(sigs), len(dom_perms)), dtype=bool)
    for k, (vpairs, dpairs) in enumerate(sigs):
        for i, j in vpairs:
            V[k] &= vr[:, i] < vr[:, j]
        for a, b in dpairs:
            W[k] &= ur[:, a] < ur[:, b]
    hits = V.T.astype(np.int32) @ W.astype(np.int32)
    free = np.argwhere(hits == 0)
    if len(free) == 0:
        return None
    pi, qi = free[0]
    return (
        tuple(inst.variables[i] for i in var_perms[pi]),
        tuple(inst.universe[a] for a in dom_perms[qi]),
    )


def in_class_bruteforce(src: Pattern, inst: Instance, cap: int = DEFAULT_ORDER_CAP) -> OrderPair | None:
    """Reference for :func:`in_class`: one occurrence check per order pair."""
    var_perms, dom_perms = _order_space(inst, cap)
    for vp in var_perms:
        var_order = tuple(inst.variables[i] for i in vp)
        for dp in dom_perms:
            dom_order = tuple(inst.universe[a] for a in dp)
            if not occurs_in_instance(src, inst, var_order, dom_order).occurs:
                return var_order, dom_order
    return None
