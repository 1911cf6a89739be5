"""Backtrack-free solvers for the pattern-defined classes.

Each solver assumes an arc-consistent instance avoiding its pattern under
the given orders. It does not check that promise up front; it builds an
assignment greedily and, if the assignment fails, reports
``precondition-violated`` with an occurrence of the pattern when one exists.
"""

from __future__ import annotations

from collections.abc import Callable, Sequence
from dataclasses import dataclass
from typing import Literal

from .csp import Assignment, Instance, check_assignment, enforce_ac, is_arc_consistent, restrict
from .figures import BTI, BTP, BTX, EMC, LX
from .occurrence import InstanceMap, occurs_in_instance
from .pattern import Pattern


@dataclass(frozen=True, slots=True)
class TraceStep:
    variable: str
    candidates: tuple[int, ...]
    chosen: int


@dataclass(frozen=True, slots=True)
class SolveOutcome:
    status: Literal["solution", "wipeout", "precondition-violated"]
    assignment: Assignment | None = None
    diagnostic: str | None = None
    witness: InstanceMap | None = None
    trace: tuple[TraceStep, ...] = ()


def _value_rank(inst: Instance, dom_order: Sequence[int]) -> dict[int, int]:
    if sorted(dom_order) != sorted(inst.universe):
        raise ValueError("domain order must list every universe value once")
    return {u: r for r, u in enumerate(dom_order)}


def _check_var_order(inst: Instance, var_order: Sequence[str]) -> None:
    if sorted(var_order) != sorted(inst.variables):
        raise ValueError("variable order must list every variable once")


def _violated(
    inst: Instance,
    pattern: Pattern,
    var_order: Sequence[str],
    dom_order: Sequence[int],
    diagnostic: str,
    trace: list[TraceStep],
) -> SolveOutcome:
    found = occurs_in_instance(pattern, inst, var_order, dom_order)
    witness = found.witnesses[0] if found.occurs else None
    return SolveOutcome("precondition-violated", None, diagnostic, witness, tuple(trace))


def _finish(
    inst: Instance,
    assignment: Assignment,
    pattern: Pattern,
    var_order: Sequence[str],
    dom_order: Sequence[int],
    trace: list[TraceStep],
) -> SolveOutcome:
    if check_assignment(inst, assignment):
        return SolveOutcome("solution", assignment, None, None, tuple(trace))
    return _violated(inst, pattern, var_order, dom_order, "constructed assignment violates a constraint", trace)


def solve_emc(inst: Instance, var_order: Sequence[str], dom_order: Sequence[int]) -> SolveOutcome:
    """Give the first variable its largest value, then each later variable the
    smallest of the largest values supported by each earlier assignment."""
    _check_var_order(inst, var_order)
    rank = _value_rank(inst, dom_order)
    assignment: Assignment = {}
    trace: list[TraceStep] = []
    for pos, x in enumerate(var_order):
        dom = inst.domain(x)
        if pos == 0:
            candidates = (max(dom, key=rank.__getitem__),)
        else:
            picks = []
            for y in var_order[:pos]:
                supported = [a for a in dom if inst.compatible(y, assignment[y], x, a)]
                if not supported:
                    return _violated(inst, EMC, var_order, dom_order, "not arc consistent", trace)
                picks.append(max(supported, key=rank.__getitem__))
            candidates = tuple(picks)
        chosen = min(candidates, key=rank.__getitem__)
        assignment[x] = chosen
        trace.append(TraceStep(x, candidates, chosen))
    return _finish(inst, assignment, EMC, var_order, dom_order, trace)


def solve_btx(inst: Instance, var_order: Sequence[str], dom_order: Sequence[int]) -> SolveOutcome:
    """Assign each variable its largest remaining value and restrict every later
    domain to the supports of that value."""
    _check_var_order(inst, var_order)
    rank = _value_rank(inst, dom_order)
    current = {x: list(inst.domain(x)) for x in var_order}
    assignment: Assignment = {}
    trace: list[TraceStep] = []
    for pos, x in enumerate(var_order):
        candidates = tuple(current[x])
        chosen = max(candidates, key=rank.__getitem__)
        assignment[x] = chosen
        trace.append(TraceStep(x, candidates, chosen))
        for y in var_order[pos + 1:]:
            current[y] = [b for b in current[y] if inst.compatible(x, chosen, y, b)]
            if not current[y]:
                return _violated(inst, BTX, var_order, dom_order, f"domain of {y!r} emptied", trace)
    return _finish(inst, assignment, BTX, var_order, dom_order, trace)


def solve_bti(inst: Instance, var_order: Sequence[str], dom_order: Sequence[int]) -> SolveOutcome:
    """Assign each variable the largest value compatible with all earlier assignments."""
    _check_var_order(inst, var_order)
    rank = _value_rank(inst, dom_order)
    assignment: Assignment = {}
    trace: list[TraceStep] = []
    for x in var_order:
        candidates = tuple(
            a for a in inst.domain(x)
            if all(inst.compatible(y, b, x, a) for y, b in assignment.items())
        )
        if not candidates:
            return _violated(inst, BTI, var_order, dom_order, f"no value of {x!r} fits the earlier assignments", trace)
        chosen = max(candidates, key=rank.__getitem__)
        assignment[x] = chosen
        trace.append(TraceStep(x, candidates, chosen))
    return _finish(inst, assignment, BTI, var_order, dom_order, trace)


VarPolicy = Callable[[Instance, Sequence[str]], str]
ValPolicy = Callable[[Instance, str], int]


def first_variable(inst: Instance, unassigned: Sequence[str]) -> str:
    return unassigned[0]


def first_value(inst: Instance, var: str) -> int:
    return inst.domain(var)[0]


def in_order(order: Sequence[str]) -> VarPolicy:
    """Variable policy following a fixed order."""
    position = {v: k for k, v in enumerate(order)}

    def pick(inst: Instance, unassigned: Sequence[str]) -> str:
        return min(unassigned, key=position.__getitem__)

    return pick


def solve_mac(
    inst: Instance,
    var_policy: VarPolicy = first_variable,
    val_policy: ValPolicy = first_value,
    pattern: Pattern | None = None,
    var_order: Sequence[str] | None = None,
) -> SolveOutcome:
    """Assign variables one at a time, re-establishing arc consistency after
    each choice; a wipeout is reported, never backtracked over.

    ``pattern`` and ``var_order`` only serve the witness search on failure.
    """
    trace: list[TraceStep] = []

    def fail(diagnostic: str) -> SolveOutcome:
        if pattern is None:
            return SolveOutcome("precondition-violated", None, diagnostic, None, tuple(trace))
        order = var_order if var_order is not None else inst.variables
        return _violated(inst, pattern, order, sorted(inst.universe), diagnostic, trace)

    if not is_arc_consistent(inst):
        return fail("not arc consistent")
    current = inst
    unassigned = list(inst.variables)
    while unassigned:
        x = var_policy(current, unassigned)
        chosen = val_policy(current, x)
        trace.append(TraceStep(x, current.domain(x), chosen))
        current, ac = enforce_ac(restrict(current, x, chosen))
        if ac.wipeout:
            return fail(f"wipeout after assigning {x!r}")
        unassigned.remove(x)
    assignment = {v: current.domain(v)[0] for v in inst.variables}
    if not check_assignment(inst, assignment):
        return fail("constructed assignment violates a constraint")
    return SolveOutcome("solution", assignment, None, None, tuple(trace))


def solve_lx(inst: Instance) -> SolveOutcome:
    """Maintain arc consistency with first-variable, first-value choices."""
    return solve_mac(inst, first_variable, first_value, pattern=LX)


def solve_btp(inst: Instance, var_order: Sequence[str]) -> SolveOutcome:
    """Maintain arc consistency assigning variables in ``var_order``."""
    _check_var_order(inst, var_order)
    return solve_mac(inst, in_order(var_order), first_value, pattern=BTP, var_order=var_order)


SOLVERS = {"emc": solve_emc, "btx": solve_btx, "bti": solve_bti}
