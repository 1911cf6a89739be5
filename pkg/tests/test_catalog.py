from __future__ import annotations

import itertools

import pytest

from conftest import naive_solutions
from patterncsp.catalog import (
    CATALOG_NAMES,
    catalog_instance,
    classify,
    enumerate_simple_patterns,
    refuting_table,
    gen_pattern_free_instance,
    natural_orders,
    random_instance,
    verify_classification,
)
from patterncsp.csp import enforce_ac, is_arc_consistent
from patterncsp.figures import builtin
from patterncsp.occurrence import in_class, occurs_in_instance
from patterncsp.pattern import Pattern, is_simple


# -- catalogue instances --------------------------------------------------------------


@pytest.mark.parametrize("name", CATALOG_NAMES)
def test_catalogue_instances_ac_and_unsat(name):
    inst = catalog_instance(name)
    assert is_arc_consistent(inst)
    assert not enforce_ac(inst)[1].wipeout
    assert naive_solutions(inst) == []


def test_catalogue_shapes():
    k4 = catalog_instance("I_K4")
    assert k4.n == 4 and len(k4.constrained_pairs) == 6
    assert len(catalog_instance("I_2COL_3").constrained_pairs) == 3
    assert catalog_instance("I_5").variables == ("w1", "w2", "w3", "x1", "x2")
    assert catalog_instance("i_k4") is k4
    with pytest.raises(KeyError):
        catalog_instance("I_9")


def test_refuting_table_certificates():
    table = refuting_table()
    assert len(table) == 19
    for label, p, name in table:
        orders = in_class(p, catalog_instance(name))
        assert orders is not None, label
        assert not occurs_in_instance(p, catalog_instance(name), *orders).occurs


def test_t1_avoided_in_i5():
    orders = in_class(builtin("t1"), catalog_instance("I_5"))
    assert orders is not None
    assert not occurs_in_instance(builtin("t1"), catalog_instance("I_5"), *orders).occurs


# -- classification -----------------------------------------------------------------------


@pytest.mark.parametrize("name, maximal", [
    ("btp_vo", "btp_vo"),
    ("mc", "emc"),
    ("lx", "lx_lt"),
    ("btp", "btp_vo"),
])
def test_classify_ac_solvable(name, maximal):
    c = classify(builtin(name))
    assert c.verdict == "ac-solvable" and c.maximal == maximal
    assert verify_classification(builtin(name), c)


@pytest.mark.parametrize("name", ["t1", "bad_a", "bad_d", "bad_e", "bad_p", "bad_q"])
def test_classify_not_ac_solvable(name):
    c = classify(builtin(name))
    assert c.verdict == "not-ac-solvable"
    assert verify_classification(builtin(name), c)


def test_classify_unsupported():
    # explicit disequalities do not stop points from being mergeable
    for name in ("p", "q", "bad_g", "bad_n"):
        c = classify(builtin(name))
        assert c.verdict == "unsupported"
        assert verify_classification(builtin(name), c)


def test_verify_rejects_wrong_certificate():
    c = classify(builtin("bad_a"))
    forged = type(c)("not-ac-solvable", instance=c.instance, orders=natural_orders(catalog_instance(c.instance)))
    assert verify_classification(builtin("emc"), forged) is False


# -- enumeration ------------------------------------------------------------------------------


def _iso_key(p: Pattern) -> tuple:
    """Smallest encoding over every renaming of variables and of points within a variable."""
    best = None
    vs = p.variables
    for perm in itertools.permutations(range(len(vs))):
        vmap = {vs[i]: perm[i] for i in range(len(vs))}
        per_var = [itertools.permutations(range(len(p.points_of(v)))) for v in vs]
        for point_perms in itertools.product(*[list(x) for x in per_var]):
            pmap = {}
            for v, pp in zip(vs, point_perms):
                for pt, k in zip(p.points_of(v), pp):
                    pmap[pt] = (vmap[v], k)
            sizes = tuple(sorted((vmap[v], len(p.points_of(v))) for v in vs))
            edges = tuple(sorted(tuple(sorted((pmap[a], pmap[b]))) + (val,) for a, b, val in p.cpt_edges))
            vo = tuple(sorted((vmap[a], vmap[b]) for a, b in p.var_closure))
            do = tuple(sorted((pmap[a], pmap[b]) for a, b in p.dom_closure))
            key = (sizes, edges, vo, do)
            if best is None or key < best:
                best = key
    return best


def _brute_simple_classes(max_vars: int, max_pts: int, max_neg: int) -> set[tuple]:
    """Generate every labelled pattern in the bounds and group by isomorphism."""
    keys = set()
    for k in range(1, max_vars + 1):
        names = [f"v{i}" for i in range(k)]
        var_pairs = [(a, b) for a in names for b in names if a != b]
        var_orders = []
        for mask in range(1 << len(var_pairs)):
            rel = {var_pairs[i] for i in range(len(var_pairs)) if mask >> i & 1}
            try:
                Pattern.build({v: ["p"] for v in names}, var_order=rel, variables=names)
            except ValueError:
                continue
            var_orders.append(rel)
        for sizes in itertools.product(range(1, max_pts + 1), repeat=k):
            points = {v: [f"p{m}" for m in range(s)] for v, s in zip(names, sizes)}
            flat = [(v, a) for v in names for a in points[v]]
            cross = [(s, t) for s, t in itertools.combinations(flat, 2) if s[0] != t[0]]
            dom_choices = [
                [[]] if len(points[v]) == 1 else [[], [((v, "p0"), (v, "p1"))], [((v, "p1"), (v, "p0"))]]
                for v in names
            ]
            for values in itertools.product([None, True, False], repeat=len(cross)):
                neg = [e for e, val in zip(cross, values) if val is False]
                if len(neg) > max_neg or len({(s[0], t[0]) for s, t in neg}) < len(neg):
                    continue
                pos = [e for e, val in zip(cross, values) if val is True]
                for vo in var_orders:
                    for doms in itertools.product(*dom_choices):
                        p = Pattern.build(points, pos, neg, vo, [x for d in doms for x in d], variables=names)
                        if is_simple(p):
                            keys.add(_iso_key(p))
    return keys


@pytest.mark.parametrize("bounds", [(2, 2, 1), (3, 1, 2), (2, 2, 2)])
def test_enumeration_matches_brute_force(bounds):
    got = list(enumerate_simple_patterns(*bounds))
    assert all(is_simple(p) for p in got)
    got_keys = [_iso_key(p) for p in got]
    assert len(set(got_keys)) == len(got_keys)
    assert set(got_keys) == _brute_simple_classes(*bounds)


def test_enumeration_counts():
    assert len(list(enumerate_simple_patterns(2, 2, 1))) == 30
    assert list(enumerate_simple_patterns(1, 2, 2)) == []


def test_enumeration_bounds():
    with pytest.raises(ValueError):
        list(enumerate_simple_patterns(4, 2, 2))


def test_enumeration_deterministic():
    a = [p.to_json() for p in enumerate_simple_patterns(2, 2, 2)]
    b = [p.to_json() for p in enumerate_simple_patterns(2, 2, 2)]
    assert a == b


# -- generators ----------------------------------------------------------------------------


@pytest.mark.parametrize("name", ["emc", "btx", "bti", "btp", "lx"])
def test_pattern_free_generator_certified(name):
    for seed in range(10):
        inst, vo, do = gen_pattern_free_instance(builtin(name), 4, 3, 0.5, seed)
        assert vo == inst.variables and do == inst.universe
        assert not occurs_in_instance(builtin(name), inst, vo, do).occurs


def test_pattern_free_generator_reproducible_and_monotone():
    a = gen_pattern_free_instance(builtin("emc"), 5, 3, 0.4, 11)[0]
    b = gen_pattern_free_instance(builtin("emc"), 5, 3, 0.4, 11)[0]
    assert (a.compat == b.compat).all()
    base = random_instance(5, 3, 0.4, 11)
    assert (a.compat | base.compat == a.compat).all()


def test_complete_relations_left_alone():
    inst = gen_pattern_free_instance(builtin("emc"), 4, 3, 1.0, 0)[0]
    assert (inst.compat == random_instance(4, 3, 1.0, 0).compat).all()
