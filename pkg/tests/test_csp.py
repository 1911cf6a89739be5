from __future__ import annotations

import itertools
import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import instances, naive_ac_domains, naive_solutions
from patterncsp.catalog import catalog_instance, random_instance
from patterncsp.csp import (
    BudgetExceeded,
    Instance,
    InstanceError,
    brute_force_solve,
    check_assignment,
    count_solutions,
    enforce_ac,
    is_arc_consistent,
    parse_instance,
    restrict,
    serialize_instance,
)

K4_TEXT = json.dumps({
    "universe": [1, 2, 3],
    "variables": ["x1", "x2", "x3", "x4"],
    "domains": {f"x{i}": [1, 2, 3] for i in range(1, 5)},
    "constraints": [
        # (x_i = 1) or (x_j = 3) around the 4-cycle, (x_i = 2) or (x_j = 2) on the diagonals
        {"scope": [f"x{i}", f"x{j}"],
         "allowed": [[a, b] for a in (1, 2, 3) for b in (1, 2, 3) if a == 1 or b == 3]}
        for i, j in [(1, 2), (2, 3), (3, 4), (4, 1)]
    ] + [
        {"scope": [f"x{i}", f"x{j}"],
         "allowed": [[a, b] for a in (1, 2, 3) for b in (1, 2, 3) if a == 2 or b == 2]}
        for i, j in [(1, 3), (2, 4)]
    ],
})


def two_var(dx, dy, allowed):
    return Instance.build(["x", "y"], sorted(set(dx) | set(dy)), {"x": dx, "y": dy}, [("x", "y", allowed)])


# -- parsing and serialization ------------------------------------------------


def test_parse_k4_file():
    inst = parse_instance(K4_TEXT)
    assert inst.variables == ("x1", "x2", "x3", "x4")
    assert all(dom == (1, 2, 3) for dom in inst.domains)
    assert len(inst.constrained_pairs) == 6
    assert inst == catalog_instance("I_K4")


def test_parse_minimal_instance():
    inst = parse_instance('{"universe":[7],"variables":["a"],"domains":{"a":[7]},"constraints":[]}')
    assert inst.n == 1 and inst.domain("a") == (7,)
    assert inst.constrained_pairs == ()


def test_omitted_pairs_are_complete():
    inst = parse_instance({"universe": [0, 1], "variables": ["a", "b"], "domains": {"a": [0, 1], "b": [0, 1]}})
    assert all(inst.compatible("a", s, "b", t) for s in (0, 1) for t in (0, 1))


def test_relation_is_symmetric_across_orientation():
    inst = two_var([1, 2], [1, 2], [(1, 2)])
    assert inst.compatible("x", 1, "y", 2) and inst.compatible("y", 2, "x", 1)
    assert not inst.compatible("y", 1, "x", 2)


@pytest.mark.parametrize("doc, message", [
    ("{not json", "invalid JSON"),
    ('{"universe":[1],"variables":["a"],"domains":{"a":[2]}}', "outside the universe"),
    ('{"universe":[1],"variables":["a"],"domains":{"a":[]}}', "empty domain"),
    ('{"universe":[1],"variables":["a","b"],"domains":{"a":[1],"b":[1]},'
     '"constraints":[{"scope":["a","b"],"allowed":[[1,1]]},{"scope":["b","a"],"allowed":[]}]}', "duplicate constraint"),
    ('{"universe":[1],"variables":["a"]}', "malformed"),
    ('{"universe":[1],"variables":["a","b"],"domains":{"a":[1],"b":[1]},'
     '"constraints":[{"scope":["a","b"],"allowed":[[1,2]]}]}', "outside the domains"),
    ('[1, 2]', "JSON object"),
])
def test_parse_errors(doc, message):
    with pytest.raises(InstanceError, match=message):
        parse_instance(doc)


@pytest.mark.parametrize("seed", range(5))
def test_round_trip_seeded(seed):
    inst = random_instance(5, 3, 0.6, seed)
    text = serialize_instance(inst)
    assert serialize_instance(parse_instance(text)) == text
    assert parse_instance(serialize_instance(inst, pretty=True)) == inst


@given(instances())
@settings(max_examples=60, deadline=None)
def test_round_trip_property(inst):
    assert parse_instance(serialize_instance(inst)) == inst


def test_canonical_text_sorts_scopes_and_tuples():
    inst = Instance.build(["a", "b"], [0, 1], {"a": [0, 1], "b": [0, 1]}, [("b", "a", [(1, 0), (0, 1)])])
    doc = json.loads(serialize_instance(inst))
    assert doc["constraints"] == [{"scope": ["a", "b"], "allowed": [[0, 1], [1, 0]]}]


# -- arc consistency -----------------------------------------------------------


def test_ac_k4_unchanged():
    inst = catalog_instance("I_K4")
    reduced, trace = enforce_ac(inst)
    assert reduced == inst and trace.removals == () and not trace.wipeout


def test_ac_complete_relations_unchanged():
    inst = Instance.build(["a", "b", "c"], [0, 1, 2], {v: [0, 1, 2] for v in "abc"})
    reduced, trace = enforce_ac(inst)
    assert reduced == inst and trace.removals == ()


def test_ac_single_revision():
    inst = two_var([1, 2], [1], [(1, 1)])
    assert not is_arc_consistent(inst)
    reduced, trace = enforce_ac(inst)
    assert reduced.domain("x") == (1,)
    assert trace.removals == (("x", 2, "y"),)
    assert is_arc_consistent(reduced)


def test_ac_wipeout_returns_input():
    inst = two_var([1, 2], [1, 2], [])
    reduced, trace = enforce_ac(inst)
    assert trace.wipeout and reduced is inst


def test_single_variable_is_arc_consistent():
    assert is_arc_consistent(Instance.build(["a"], [0, 1], {"a": [0, 1]}))


@pytest.mark.parametrize("name", ["I_K4", "I_4", "I_SAT_2D", "I_5", "I_SAT_6", "I_SAT_K4", "I_2COL_3"])
def test_catalogue_instances_are_arc_consistent(name):
    assert is_arc_consistent(catalog_instance(name))


@given(instances(), st.integers(0, 2**32 - 1))
@settings(max_examples=150, deadline=None)
def test_ac_confluence_and_closure(inst, seed):
    expected = naive_ac_domains(inst)
    reduced, trace = enforce_ac(inst)
    shuffled, trace2 = enforce_ac(inst, random.Random(seed))
    assert trace.wipeout == trace2.wipeout == (not all(expected))
    if not trace.wipeout:
        assert [set(d) for d in reduced.domains] == expected
        assert shuffled == reduced
        assert is_arc_consistent(reduced)
        again, t = enforce_ac(reduced)
        assert again == reduced and t.removals == ()


@given(instances(max_vars=5, max_values=3))
@settings(max_examples=150, deadline=None)
def test_ac_soundness_and_monotonicity(inst):
    sols = naive_solutions(inst)
    reduced, trace = enforce_ac(inst)
    present = {(v, a) for v, dom in zip(inst.variables, inst.domains) for a in dom}
    for v, a, _ in trace.removals:
        assert (v, a) in present
        present.discard((v, a))
        assert all(s[v] != a for s in sols)
    if trace.wipeout:
        assert sols == []
    else:
        assert all(set(r) <= set(d) for r, d in zip(reduced.domains, inst.domains))


# -- exhaustive search ---------------------------------------------------------


def test_k4_unsat():
    res = brute_force_solve(catalog_instance("I_K4"))
    assert res.status == "unsat" and res.solution is None


def test_complete_instance_first_tuple():
    inst = Instance.build(["a", "b"], [3, 1, 2], {"a": [1, 2], "b": [3, 2]})
    res = brute_force_solve(inst)
    assert res.status == "solution"
    assert res.solution == {"a": 1, "b": 3}  # values in universe order: 3 < 1 < 2


def test_count_small_cases():
    assert count_solutions(catalog_instance("I_2COL_3")) == 0
    assert count_solutions(Instance.build(["a"], [0, 1], {"a": [0, 1]})) == 2


@pytest.mark.parametrize("seed", range(10))
def test_count_matches_full_enumeration(seed):
    inst = random_instance(5, 3, 0.7, seed, constrained=0.6)
    assert count_solutions(inst) == len(naive_solutions(inst))


@given(instances())
@settings(max_examples=150, deadline=None)
def test_search_agrees_with_enumeration(inst):
    sols = naive_solutions(inst)
    res = brute_force_solve(inst)
    assert count_solutions(inst) == len(sols)
    assert (res.status == "unsat") == (len(sols) == 0)
    if sols:
        assert res.solution == sols[0]  # first in lexicographic order
        assert check_assignment(inst, res.solution)


def test_budget():
    inst = Instance.build([f"v{i}" for i in range(6)], [0, 1, 2], {f"v{i}": [0, 1, 2] for i in range(6)})
    assert brute_force_solve(inst, cap=6).status == "solution"  # one node per variable
    assert brute_force_solve(inst, cap=5).status == "budget-exceeded"
    with pytest.raises(BudgetExceeded):
        count_solutions(inst, cap=10)
    tight = Instance.build(["a", "b"], [0, 1], {"a": [0, 1], "b": [0, 1]}, [("a", "b", [(1, 1)])])
    assert brute_force_solve(tight, cap=1).status == "budget-exceeded"


def test_check_assignment():
    k4 = catalog_instance("I_K4")
    assert not check_assignment(k4, {v: 1 for v in k4.variables})
    complete = Instance.build(["a", "b"], [0, 1], {"a": [0, 1], "b": [0, 1]})
    for a, b in itertools.product((0, 1), repeat=2):
        assert check_assignment(complete, {"a": a, "b": b})
    with pytest.raises(ValueError):
        check_assignment(complete, {"a": 5, "b": 0})
    with pytest.raises(ValueError):
        check_assignment(complete, {"a": 0})


def test_restrict():
    inst = two_var([1, 2], [1, 2], [(1, 1), (2, 2)])
    r = restrict(inst, "x", 2)
    assert r.domain("x") == (2,) and r.domain("y") == (1, 2)
    assert enforce_ac(r)[0].domain("y") == (2,)
    with pytest.raises(ValueError):
        restrict(inst, "x", 3)
