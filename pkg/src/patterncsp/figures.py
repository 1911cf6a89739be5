"""Named patterns: the tractable-class patterns and the small refuting patterns.

Point names follow the Greek letters used for these patterns (``alpha`` ...
``eps``); patterns whose variables carry a single point call it ``p``.
Orders are written ``(lower, higher)``.
"""

from __future__ import annotations

from collections.abc import Callable

from .pattern import Pattern, inv_dom, inv_var

A, B, G, D, E = "alpha", "beta", "gamma", "delta", "eps"


def _btp(var_order: list[tuple[str, str]], dom_order: list) -> Pattern:
    return Pattern.build(
        {"x": ["p"], "y": ["p"], "z": [G, D]},
        positive=[(("x", "p"), ("y", "p")), (("y", "p"), ("z", D)), (("x", "p"), ("z", G))],
        negative=[(("y", "p"), ("z", G)), (("x", "p"), ("z", D))],
        var_order=var_order,
        dom_order=dom_order,
    )


def _emc_shape(var_order: list[tuple[str, str]], dom_order: list) -> Pattern:
    # y holds alpha > beta, z holds gamma > delta, x holds eps
    return Pattern.build(
        {"y": [A, B], "x": [E], "z": [G, D]},
        positive=[
            (("y", A), ("z", D)), (("y", B), ("z", G)),
            (("y", A), ("x", E)), (("x", E), ("z", G)),
        ],
        negative=[(("y", A), ("z", G)), (("x", E), ("z", D))],
        var_order=var_order,
        dom_order=dom_order,
    )


def _lx(var_order: list[tuple[str, str]]) -> Pattern:
    return Pattern.build(
        {"y": [A, B], "x": [E], "z": [G, D]},
        positive=[
            (("y", A), ("z", D)), (("y", B), ("z", G)),
            (("y", A), ("x", E)), (("x", E), ("z", G)),
        ],
        negative=[(("y", B), ("x", E)), (("x", E), ("z", D))],
        var_order=var_order,
    )


def _v_gt(var_order: list[tuple[str, str]]) -> Pattern:
    return Pattern.build(
        {"x": [A], "z": [G, D]},
        positive=[(("x", A), ("z", G))],
        negative=[(("x", A), ("z", D))],
        var_order=var_order,
        dom_order=[(("z", D), ("z", G))],
    )


def _p_shape(dom_order: list) -> Pattern:
    return Pattern.build(
        {"x": [A], "y": [B, G, D]},
        positive=[(("x", A), ("y", G)), (("x", A), ("y", B))],
        negative=[(("x", A), ("y", D))],
        dom_order=dom_order,
    )


BTP = _btp([("x", "z"), ("y", "z")], [])
BTP_VO = _btp([("x", "y"), ("y", "z")], [])
BTP_DO = _btp([("x", "z"), ("y", "z")], [(("z", D), ("z", G))])
MC = Pattern.build(
    {"x": [A, B], "y": [G, D]},
    positive=[(("x", A), ("y", D)), (("x", B), ("y", G))],
    negative=[(("x", A), ("y", G))],
    dom_order=[(("x", B), ("x", A)), (("y", D), ("y", G))],
)
_EMC_DOM = [(("y", B), ("y", A)), (("z", D), ("z", G))]
EMC = _emc_shape([("y", "z")], _EMC_DOM)
EMC_MINUS = _emc_shape([], _EMC_DOM)
BTX = _emc_shape([("y", "x"), ("y", "z")], [(("y", B), ("y", A))])
BTI = _emc_shape([("x", "z")], [(("y", B), ("y", A))])
LX = _lx([])
LX_LT = _lx([("y", "z")])
V_GT = _v_gt([])
V_GT_LT = _v_gt([("x", "z")])
P = _p_shape([(("y", G), ("y", B)), (("y", D), ("y", G))])
Q = _p_shape([(("y", D), ("y", B)), (("y", D), ("y", G))])


def _small(points, positive=(), negative=(), var_order=(), dom_order=(), diseq=()) -> Pattern:
    return Pattern.build(points, positive, negative, var_order, dom_order, diseq)


# The nineteen three-or-fewer-variable patterns paired with catalogue instances.
BAD_PATTERNS: dict[str, Pattern] = {
    "a": _small(
        {"L": ["a", "b"], "M": ["e"], "R": ["c", "d"]},
        positive=[(("L", "a"), ("R", "d")), (("L", "b"), ("R", "c")),
                  (("L", "b"), ("M", "e")), (("M", "e"), ("R", "d"))],
        negative=[(("L", "a"), ("R", "c"))],
    ),
    "b": _small(
        {"L": ["a", "b"], "M": ["e", "f"], "R": ["c", "d"]},
        positive=[(("L", "b"), ("R", "c")), (("M", "f"), ("R", "d")), (("M", "f"), ("L", "b"))],
        negative=[(("L", "a"), ("R", "c")), (("M", "e"), ("R", "d"))],
        diseq=[(("R", "c"), ("R", "d"))],
    ),
    "c": _small(
        {"i": ["a", "b"], "j": ["p"], "k": ["p"]},
        negative=[(("i", "a"), ("j", "p"))],
        var_order=[("i", "k"), ("j", "k")],
        dom_order=[(("i", "b"), ("i", "a"))],
    ),
    "d": _small(
        {"L": ["p"], "M": ["u", "l"], "R": ["p"]},
        positive=[(("L", "p"), ("M", "l")), (("M", "l"), ("R", "p"))],
        negative=[(("L", "p"), ("M", "u")), (("M", "u"), ("R", "p"))],
    ),
    "e": _small(
        {"L": ["p"], "j": ["p"], "k": ["p"]},
        negative=[(("L", "p"), ("j", "p")), (("j", "p"), ("k", "p"))],
        var_order=[("j", "k")],
    ),
    "f": _small(
        {"i": ["p"], "j": ["e", "f"], "k": ["p"]},
        negative=[(("i", "p"), ("j", "e")), (("j", "f"), ("k", "p"))],
        var_order=[("i", "j"), ("j", "k")],
        diseq=[(("j", "e"), ("j", "f"))],
    ),
    "g": _small(
        {"L": ["a", "b"], "R": ["hi", "lo"]},
        negative=[(("L", "b"), ("R", "lo")), (("L", "a"), ("R", "hi"))],
        dom_order=[(("R", "lo"), ("R", "hi"))],
        diseq=[(("L", "a"), ("L", "b"))],
    ),
    "h": _small(
        {"L": ["a", "b"], "M": ["p"], "R": ["p"]},
        negative=[(("L", "a"), ("R", "p")), (("M", "p"), ("R", "p"))],
        dom_order=[(("L", "b"), ("L", "a"))],
    ),
    "i": _small(
        {"L": ["p"], "M": ["p"], "R": ["c", "d"]},
        negative=[(("L", "p"), ("R", "c")), (("M", "p"), ("R", "c"))],
        dom_order=[(("R", "d"), ("R", "c"))],
    ),
    "j": _small(
        {"i": ["a", "b"], "j": ["p"], "k": ["p"]},
        negative=[(("i", "a"), ("k", "p"))],
        var_order=[("i", "k"), ("j", "k")],
        dom_order=[(("i", "b"), ("i", "a"))],
    ),
    "k": _small(
        {"L": ["a", "b"], "j": ["p"], "k": ["c", "d"]},
        negative=[(("L", "a"), ("k", "c"))],
        var_order=[("j", "k")],
        dom_order=[(("L", "b"), ("L", "a")), (("k", "d"), ("k", "c"))],
    ),
    "l": _small(
        {"i": ["p"], "j": ["p"], "k": ["c", "d"]},
        negative=[(("i", "p"), ("k", "d")), (("j", "p"), ("k", "c"))],
        var_order=[("i", "j")],
        dom_order=[(("k", "d"), ("k", "c"))],
    ),
    "m": _small(
        {"L": ["a", "b"], "M": ["e", "f"], "R": ["hi", "lo"]},
        negative=[(("L", "a"), ("R", "hi")), (("M", "f"), ("R", "lo"))],
        dom_order=[(("L", "b"), ("L", "a")), (("M", "f"), ("M", "e"))],
    ),
    "n": _small(
        {"L": ["p"], "M": ["p"], "R": ["c", "d"]},
        positive=[(("M", "p"), ("L", "p")), (("M", "p"), ("R", "d"))],
        negative=[(("L", "p"), ("R", "c"))],
        diseq=[(("R", "c"), ("R", "d"))],
    ),
    "o": _small(
        {"L": ["a", "b"], "R": ["c", "d"]},
        negative=[(("L", "b"), ("R", "c"))],
        dom_order=[(("L", "b"), ("L", "a")), (("R", "d"), ("R", "c"))],
    ),
    "p": _small(
        {"L": ["p"], "M": ["p"], "R": ["p"]},
        positive=[(("L", "p"), ("M", "p")), (("M", "p"), ("R", "p")), (("L", "p"), ("R", "p"))],
    ),
    "q": _small(
        {"L": ["p"], "M": ["p"], "R": ["p"]},
        positive=[(("M", "p"), ("L", "p"))],
        negative=[(("L", "p"), ("R", "p")), (("M", "p"), ("R", "p"))],
    ),
    "r": _small(
        {"L": ["a", "b"], "R": ["c", "d"]},
        positive=[(("L", "b"), ("R", "d"))],
        negative=[(("L", "a"), ("R", "c"))],
        diseq=[(("L", "a"), ("L", "b")), (("R", "c"), ("R", "d"))],
    ),
    "s": _small(
        {"L": ["a", "b"], "R": ["p"]},
        positive=[(("L", "a"), ("R", "p")), (("L", "b"), ("R", "p"))],
        diseq=[(("L", "a"), ("L", "b"))],
    ),
}

BUILTINS: dict[str, Pattern] = {
    "btp": BTP,
    "btp_vo": BTP_VO,
    "btp_do": BTP_DO,
    "mc": MC,
    "emc": EMC,
    "emc_minus": EMC_MINUS,
    "btx": BTX,
    "bti": BTI,
    "lx": LX,
    "lx_lt": LX_LT,
    "v_gt": V_GT,
    "v_gt_lt": V_GT_LT,
    "p": P,
    "q": Q,
    "t1": BAD_PATTERNS["d"],
    **{f"bad_{k}": v for k, v in BAD_PATTERNS.items()},
}

# Patterns defining the maximal arc-consistency-solvable classes, before
# closing under reversal of the variable and point orders.
MAXIMAL_BASE: dict[str, Pattern] = {
    "lx_lt": LX_LT,
    "emc": EMC,
    "btp_vo": BTP_VO,
    "btp_do": BTP_DO,
    "btx": BTX,
    "bti": BTI,
}

_VARIANTS: tuple[tuple[str, Callable[[Pattern], Pattern]], ...] = (
    ("", lambda p: p),
    ("^dom", inv_dom),
    ("^var", inv_var),
    ("^dom^var", lambda p: inv_var(inv_dom(p))),
)


def builtin(name: str) -> Pattern:
    try:
        return BUILTINS[name.lower()]
    except KeyError:
        raise KeyError(f"unknown builtin pattern {name!r}") from None


def maximal_patterns() -> dict[str, Pattern]:
    """The maximal patterns closed under reversal, duplicates removed."""
    out: dict[str, Pattern] = {}
    for name, base in MAXIMAL_BASE.items():
        for suffix, op in _VARIANTS:
            variant = op(base)
            if any(variant == seen for seen in out.values()):
                continue
            out[name + suffix] = variant
    return out
