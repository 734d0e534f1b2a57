"""Formula progression, sound simplification, and progression closures.

``progress`` rewrites a formula against one truth assignment, returning the
residual obligation; reaching ``TRUE``/``FALSE`` signals satisfaction or
falsification. Results are normalized by ``simplify``, a fixed rewrite
system that is sound on all traces, never grows a formula, and is
idempotent. Syntactic entailment (``implies_syntactic``) powers the
absorption rules and is sound but deliberately incomplete.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Iterable

from .formula import (
    FALSE,
    TRUE,
    Always,
    And,
    Eventually,
    FalseFormula,
    Formula,
    Next,
    Not,
    Or,
    Prop,
    TrueFormula,
    Until,
    render,
)

__all__ = [
    "progress",
    "simplify",
    "implies_syntactic",
    "closure",
    "ClosureCapExceeded",
]

_CONSTANTS = (TRUE, FALSE)


class ClosureCapExceeded(RuntimeError):
    """Progression closure outgrew the requested cap."""

    def __init__(self, cap: int, frontier_size: int):
        super().__init__(
            f"progression closure exceeds cap {cap} (frontier size {frontier_size})"
        )
        self.cap = cap
        self.frontier_size = frontier_size


def progress(sigma: Iterable[str], f: Formula) -> Formula:
    """Residual of ``f`` after one step in which exactly ``sigma`` holds."""
    return _progress(frozenset(sigma), f)


@lru_cache(maxsize=None)
def _progress(sigma: frozenset, f: Formula) -> Formula:
    return simplify(_prog(sigma, f))


def _prog(sigma: frozenset, f: Formula) -> Formula:
    if isinstance(f, (TrueFormula, FalseFormula)):
        return f
    if isinstance(f, Prop):
        return TRUE if f.name in sigma else FALSE
    if isinstance(f, Not):
        return Not(_prog(sigma, f.child))
    if isinstance(f, And):
        return And(_prog(sigma, f.left), _prog(sigma, f.right))
    if isinstance(f, Or):
        return Or(_prog(sigma, f.left), _prog(sigma, f.right))
    if isinstance(f, Next):
        return f.child
    if isinstance(f, Until):
        return Or(_prog(sigma, f.right), And(_prog(sigma, f.left), f))
    if isinstance(f, Eventually):
        return Or(_prog(sigma, f.child), f)
    if isinstance(f, Always):
        return And(_prog(sigma, f.child), f)
    raise TypeError(f"not a formula: {f!r}")


# --- simplification -------------------------------------------------------
#
# Rewrite set: constant folding; identity/annihilator for and/or; double
# negation; FF/GG collapse; flatten + canonical sort (by rendered text) +
# dedup for and/or chains, rebuilt right-associated; absorption through
# implies_syntactic (drop a disjunct that entails another, drop a conjunct
# entailed by another). Every rule is size-nonincreasing, so iterating to a
# fixed point terminates and makes simplify idempotent.


@lru_cache(maxsize=None)
def simplify(f: Formula) -> Formula:
    current = f
    for _ in range(1000):
        nxt = _pass(current)
        if nxt == current:
            return nxt
        current = nxt
    raise AssertionError(f"simplify did not stabilize on {render(f)}")


def _pass(f: Formula) -> Formula:
    if isinstance(f, (TrueFormula, FalseFormula, Prop)):
        return f
    if isinstance(f, Not):
        c = _pass(f.child)
        if c == TRUE:
            return FALSE
        if c == FALSE:
            return TRUE
        if isinstance(c, Not):
            return c.child
        return Not(c)
    if isinstance(f, Next):
        c = _pass(f.child)
        return c if c in _CONSTANTS else Next(c)
    if isinstance(f, Eventually):
        c = _pass(f.child)
        if c in _CONSTANTS:
            return c
        if isinstance(c, Eventually):
            return c
        return Eventually(c)
    if isinstance(f, Always):
        c = _pass(f.child)
        if c in _CONSTANTS:
            return c
        if isinstance(c, Always):
            return c
        return Always(c)
    if isinstance(f, Until):
        left, right = _pass(f.left), _pass(f.right)
        if right in _CONSTANTS:
            return right
        if left == FALSE:
            return right
        if left == TRUE:
            return Eventually(right)
        return Until(left, right)
    if isinstance(f, (And, Or)):
        return _rebuild_chain(f)
    raise TypeError(f"not a formula: {f!r}")


def _flatten(f: Formula, kind: type) -> list[Formula]:
    if isinstance(f, kind):
        return _flatten(f.left, kind) + _flatten(f.right, kind)
    return [f]


def _rebuild_chain(f: Formula) -> Formula:
    kind = type(f)
    identity, annihilator = (TRUE, FALSE) if kind is And else (FALSE, TRUE)
    items = [_pass(g) for g in _flatten(f, kind)]
    if any(g == annihilator for g in items):
        return annihilator
    items = [g for g in items if g != identity]
    if not items:
        return identity
    # canonical order and structural dedup
    items = sorted(set(items), key=render)
    items = _absorb(items, kind)
    result = items[-1]
    for g in reversed(items[:-1]):
        result = kind(g, result)
    return result


def _absorb(items: list[Formula], kind: type) -> list[Formula]:
    kept = list(items)
    i = 0
    while i < len(kept):
        x = kept[i]
        if kind is Or:
            redundant = any(
                j != i and _implies(x, kept[j]) for j in range(len(kept))
            )
        else:
            redundant = any(
                j != i and _implies(kept[j], x) for j in range(len(kept))
            )
        if redundant:
            del kept[i]
        else:
            i += 1
    return kept


# --- syntactic entailment --------------------------------------------------


def implies_syntactic(f: Formula, g: Formula) -> bool:
    """Sound check that ``f`` entails ``g`` on every trace.

    ``False`` carries no information: the rule set is incomplete by design.
    Inputs are canonicalized through ``simplify`` first, so reflexivity is
    up to simplification.
    """
    return _implies(simplify(f), simplify(g))


@lru_cache(maxsize=None)
def _implies(f: Formula, g: Formula) -> bool:
    if f == g or f == FALSE or g == TRUE:
        return True
    if isinstance(f, And) and (_implies(f.left, g) or _implies(f.right, g)):
        return True
    if isinstance(f, Or) and _implies(f.left, g) and _implies(f.right, g):
        return True
    if isinstance(g, Or) and (_implies(f, g.left) or _implies(f, g.right)):
        return True
    if isinstance(g, And) and _implies(f, g.left) and _implies(f, g.right):
        return True
    if isinstance(g, Eventually) and f == g.child:
        return True
    if isinstance(f, Eventually) and isinstance(g, Eventually):
        if _implies(f.child, g.child) or _implies(f.child, g):
            return True
    if isinstance(f, Until) and _implies(Eventually(f.right), g):
        return True
    if isinstance(f, Always) and _implies(f.child, g):
        return True
    return False


# --- progression closure ----------------------------------------------------


def closure(
    phis: Iterable[Formula],
    assignments: Iterable[Iterable[str]],
    cap: int,
) -> frozenset:
    """Smallest set containing ``phis`` closed under progression by the
    given assignments, with formulas deduplicated after simplification.

    Raises :class:`ClosureCapExceeded` as soon as the set would outgrow
    ``cap``.
    """
    sigmas = [frozenset(a) for a in assignments]
    seen = {simplify(f) for f in phis}
    if len(seen) > cap:
        raise ClosureCapExceeded(cap, len(seen))
    frontier = sorted(seen, key=render)
    while frontier:
        fresh = []
        for f in frontier:
            for sigma in sigmas:
                g = _progress(sigma, f)
                if g not in seen:
                    seen.add(g)
                    fresh.append(g)
                    if len(seen) > cap:
                        raise ClosureCapExceeded(cap, len(fresh))
        frontier = fresh
    return frozenset(seen)
