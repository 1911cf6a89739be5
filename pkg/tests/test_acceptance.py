"""End-to-end acceptance checks, one test per criterion.

Each test is named ``test_cN_...``; the summary hook in ``conftest.py``
prints one PASS/FAIL line per criterion with its wall-clock time. Runtime
budgets are asserted alongside correctness.
"""

from __future__ import annotations

import itertools
import random
import time

import pytest

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
from patterncsp.csp import Instance, brute_force_solve, check_assignment, count_solutions, enforce_ac, is_arc_consistent
from patterncsp.figures import builtin
from patterncsp.occurrence import in_class, occurs, occurs_in_instance
from patterncsp.pattern import canonical_form, inv_dom, inv_var
from patterncsp.recognition import (
    TARGETS,
    assignment_to_order,
    collect_var_order_witnesses,
    find_var_order,
    gen_gadget,
)
from patterncsp.solvers import solve_bti, solve_btp, solve_btx, solve_emc, solve_lx

pytestmark = pytest.mark.acceptance


class Budget:
    def __init__(self, seconds: float) -> None:
        self.seconds = seconds

    def __enter__(self) -> Budget:
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc) -> None:
        self.elapsed = time.perf_counter() - self.start
        if exc[0] is None:
            assert self.elapsed < self.seconds, f"took {self.elapsed:.1f}s, budget {self.seconds}s"


def test_c1_catalogue_verification():
    with Budget(5):
        for name in CATALOG_NAMES:
            inst = catalog_instance(name)
            assert is_arc_consistent(inst), name
            assert count_solutions(inst) == 0, name


def test_c2_refuting_table():
    with Budget(60):
        table = refuting_table()
        assert len(table) == 19
        for label, p, name in table:
            inst = catalog_instance(name)
            orders = in_class(p, inst)
            assert orders is not None, label
            assert not occurs_in_instance(p, inst, *orders).occurs
            if p.var_order or p.dom_order:
                assert not occurs_in_instance(p, inst, *natural_orders(inst)).occurs, label


# -- decision property ------------------------------------------------------------------


def _class_corpus(name: str, count: int, seed0: int = 0):
    rng = random.Random(f"corpus-{name}-{seed0}")
    for k in range(count):
        n, d = rng.randint(2, 6), rng.randint(2, 4)
        density = rng.choice([0.3, 0.45, 0.6, 0.75, 0.9])
        yield gen_pattern_free_instance(builtin(name), n, d, density, seed0 + k)


def _class_solve(name: str, inst: Instance, vo, do):
    if name == "lx":
        return solve_lx(inst)
    if name == "btp":
        return solve_btp(inst, vo)
    return {"emc": solve_emc, "btx": solve_btx, "bti": solve_bti}[name](inst, vo, do)


@pytest.mark.parametrize("name", ["emc", "btx", "bti", "btp", "lx"])
def test_c3_decision_property(name):
    with Budget(300):
        solved = wiped = 0
        for inst, vo, do in _class_corpus(name, 500):
            assert inst.n <= 6 and len(inst.universe) <= 4
            reduced, trace = enforce_ac(inst)
            unsat = brute_force_solve(inst).status == "unsat"
            assert trace.wipeout == unsat
            if trace.wipeout:
                wiped += 1
                continue
            out = _class_solve(name, reduced, vo, do)
            assert out.status == "solution", out.diagnostic
            assert check_assignment(inst, out.assignment)
            # one decision per variable: nothing was undone
            assert len(out.trace) == inst.n
            solved += 1
        assert solved + wiped == 500 and solved > 0 and wiped > 0


def test_c4_prefix_locality():
    checked = 0
    seed = 0
    while checked < 100:
        rng = random.Random(seed)
        inst, vo, do = gen_pattern_free_instance(builtin("emc"), rng.randint(3, 6), rng.randint(2, 4), 0.6, seed)
        seed += 1
        reduced, trace = enforce_ac(inst)
        if trace.wipeout:
            continue
        assert tuple(vo) == reduced.variables
        full = [s.chosen for s in solve_emc(reduced, vo, do).trace]
        for i in range(1, len(vo) + 1):
            sub = Instance(vo[:i], reduced.universe, reduced.domains[:i], reduced.compat[:i, :i])
            part = [s.chosen for s in solve_emc(sub, vo[:i], do).trace]
            assert part == full[:i]
        checked += 1


# -- recognition -------------------------------------------------------------------------


def _recognition_corpus():
    rng = random.Random("recognition")
    for k in range(200):
        n = rng.randint(2, 6)
        d = rng.randint(2, 4)
        inst = random_instance(n, d, rng.choice([0.5, 0.65, 0.8, 0.9]), rng, constrained=rng.choice([0.4, 0.7, 1.0]))
        dom_order = list(inst.universe)
        rng.shuffle(dom_order)
        yield f"seed{k}", inst, tuple(dom_order)
    for name in CATALOG_NAMES:
        inst = catalog_instance(name)
        yield name, inst, tuple(inst.universe)


def test_c5_recognition_exhaustive():
    found = {t: 0 for t in TARGETS}
    with Budget(600):
        for label, inst, dom_order in _recognition_corpus():
            for target, pattern in TARGETS.items():
                res = find_var_order(inst, target, dom_order)
                avoiding = [
                    vo for vo in itertools.permutations(inst.variables)
                    if not occurs_in_instance(pattern, inst, vo, dom_order).occurs
                ]
                assert (res.order is not None) == bool(avoiding), (label, target)
                if res.order is not None:
                    found[target] += 1
                    assert not occurs_in_instance(pattern, inst, res.order, dom_order).occurs
    # the corpus exercises both outcomes for every target
    assert all(0 < v < 207 for v in found.values()), found


def test_c6_min_closedness():
    rng = random.Random("closure")
    emitted: dict[str, list] = {t: [] for t in TARGETS}
    for _, inst, dom_order in _recognition_corpus():
        for target in TARGETS:
            op = collect_var_order_witnesses(inst, target, dom_order)
            emitted[target].extend((op, c) for c in op.constraints)
    violations = 0
    for target, items in emitted.items():
        assert items, target
        assert {op.family for op, _ in items} == {"max" if target == "btp" else "min"}
        for _ in range(10_000):
            op, c = rng.choice(items)
            pick = max if op.family == "max" else min
            n = len(op.variables)
            pair = []
            while len(pair) < 2:
                t = [rng.randrange(n) for _ in range(n)]
                if c.holds(t):
                    pair.append(t)
            combined = [pick(a, b) for a, b in zip(*pair)]
            violations += not c.holds(combined)
    assert violations == 0


# -- gadget ---------------------------------------------------------------------------------


def test_c7_gadget_fidelity():
    with Budget(120):
        emc = builtin("emc")
        g = gen_gadget("emc", [[1, 2, 3]])
        for bits in itertools.product((False, True), repeat=3):
            if any(bits):
                order = assignment_to_order(g, bits)
                assert not occurs_in_instance(emc, g.instance, g.var_order, order).occurs, bits
        every = [[s1, 2 * s2, 3 * s3] for s1 in (1, -1) for s2 in (1, -1) for s3 in (1, -1)]
        g2 = gen_gadget("emc", every)
        for bits in itertools.product((False, True), repeat=3):
            order = assignment_to_order(g2, bits)
            assert occurs_in_instance(emc, g2.instance, g2.var_order, order).occurs, bits


# -- classification ------------------------------------------------------------------------


def test_c8_classification_exhaustive():
    with Budget(1800):
        verdicts: dict[str, str] = {}
        tally: dict[str, int] = {}
        patterns = list(enumerate_simple_patterns(3, 2, 2))
        for p in patterns:
            c = classify(p)
            assert c.verdict in ("ac-solvable", "not-ac-solvable"), canonical_form(p)
            if c.verdict == "ac-solvable":
                assert c.occurrence.occurs and c.occurrence.witnesses
            assert verify_classification(p, c)
            verdicts[canonical_form(p)] = c.verdict
            tally[c.verdict] = tally.get(c.verdict, 0) + 1
        for p in patterns:
            v = verdicts[canonical_form(p)]
            assert verdicts[canonical_form(inv_dom(p))] == v
            assert verdicts[canonical_form(inv_var(p))] == v
        print(f"classified {sum(tally.values())} patterns: {tally}")


def test_c9_occurrence_facts():
    with Budget(1):
        assert occurs(builtin("mc"), builtin("emc")).occurs
        assert not occurs(builtin("mc"), builtin("btp")).occurs
        assert not occurs(builtin("mc"), builtin("btx")).occurs
        assert occurs(builtin("q"), builtin("p")).occurs
        assert not occurs(builtin("p"), builtin("q")).occurs
        assert occurs(builtin("q"), builtin("v_gt")).occurs
