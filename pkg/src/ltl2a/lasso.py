"""Ultimately periodic traces and exact formula evaluation over them.

A lasso trace is a finite prefix followed by a repeating, nonempty loop of
truth assignments. Evaluation is by backward fixpoint over the distinct
positions (prefix plus one loop copy) with loop-consistency iteration
until stable, which is exact for this class of traces. It shares no code
with progression, so it serves as an independent semantics oracle.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .formula import (
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
)

__all__ = ["LassoTrace", "eval_lasso"]


def _normalize(steps: Iterable[Iterable[str]]) -> tuple[frozenset, ...]:
    return tuple(frozenset(step) for step in steps)


@dataclass(frozen=True)
class LassoTrace:
    """Infinite trace ``prefix . loop . loop . ...`` of truth assignments."""

    prefix: tuple[frozenset, ...]
    loop: tuple[frozenset, ...]

    def __post_init__(self):
        object.__setattr__(self, "prefix", _normalize(self.prefix))
        object.__setattr__(self, "loop", _normalize(self.loop))
        if not self.loop:
            raise ValueError("lasso loop must be nonempty")

    def at(self, i: int) -> frozenset:
        """Truth assignment at position ``i`` of the infinite trace."""
        if i < 0:
            raise IndexError("trace positions start at 0")
        if i < len(self.prefix):
            return self.prefix[i]
        return self.loop[(i - len(self.prefix)) % len(self.loop)]

    def drop(self, i: int) -> "LassoTrace":
        """The trace with position ``i`` removed (later positions shift down).

        Dropping inside the loop region rotates the loop accordingly, so the
        result is again a lasso over the same assignments.
        """
        if i < 0:
            raise IndexError("trace positions start at 0")
        start = max(i + 1, len(self.prefix))
        new_prefix = tuple(
            self.at(j if j < i else j + 1) for j in range(start - 1)
        )
        new_loop = tuple(self.at(start + t) for t in range(len(self.loop)))
        return LassoTrace(new_prefix, new_loop)


def eval_lasso(trace: LassoTrace, i: int, f: Formula) -> bool:
    """Whether ``f`` holds at position ``i`` of ``trace``.

    Computes, per subformula, a truth table over the distinct positions of
    the trace. Until / eventually are least fixpoints (start false, expand);
    always is a greatest fixpoint (start true, shrink). Each fixpoint
    stabilizes in at most one pass per position.
    """
    if i < 0:
        raise IndexError("trace positions start at 0")
    n_pre, n_loop = len(trace.prefix), len(trace.loop)
    n = n_pre + n_loop
    positions = trace.prefix + trace.loop
    succ = [c + 1 for c in range(n)]
    succ[n - 1] = n_pre

    memo: dict[Formula, tuple[bool, ...]] = {}

    def table(g: Formula) -> tuple[bool, ...]:
        cached = memo.get(g)
        if cached is not None:
            return cached
        if isinstance(g, TrueFormula):
            t = (True,) * n
        elif isinstance(g, FalseFormula):
            t = (False,) * n
        elif isinstance(g, Prop):
            t = tuple(g.name in positions[c] for c in range(n))
        elif isinstance(g, Not):
            t = tuple(not v for v in table(g.child))
        elif isinstance(g, And):
            tl, tr = table(g.left), table(g.right)
            t = tuple(a and b for a, b in zip(tl, tr))
        elif isinstance(g, Or):
            tl, tr = table(g.left), table(g.right)
            t = tuple(a or b for a, b in zip(tl, tr))
        elif isinstance(g, Next):
            tc = table(g.child)
            t = tuple(tc[succ[c]] for c in range(n))
        elif isinstance(g, Until):
            t = _lfp(table(g.right), table(g.left))
        elif isinstance(g, Eventually):
            t = _lfp(table(g.child), (True,) * n)
        elif isinstance(g, Always):
            tc = table(g.child)
            v = [True] * n
            changed = True
            while changed:
                changed = False
                for c in range(n - 1, -1, -1):
                    nv = tc[c] and v[succ[c]]
                    if nv != v[c]:
                        v[c] = nv
                        changed = True
            t = tuple(v)
        else:
            raise TypeError(f"not a formula: {g!r}")
        memo[g] = t
        return t

    def _lfp(goal: tuple[bool, ...], hold: tuple[bool, ...]) -> tuple[bool, ...]:
        v = [False] * n
        changed = True
        while changed:
            changed = False
            for c in range(n - 1, -1, -1):
                nv = goal[c] or (hold[c] and v[succ[c]])
                if nv != v[c]:
                    v[c] = nv
                    changed = True
        return tuple(v)

    cls = i if i < n_pre else n_pre + (i - n_pre) % n_loop
    return table(f)[cls]
