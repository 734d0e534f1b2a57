"""Randomized property checks and the generators backing them.

The central property: progressing a formula by the assignment at position
``i`` and re-evaluating on the trace with that position removed must agree
with evaluating the original formula at ``i``. It ties ``progress`` to the
independent lasso-semantics oracle and is run at scale by the ``check``
CLI subcommand and the acceptance suite.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .formula import (
    FALSE,
    TRUE,
    Always,
    And,
    Eventually,
    Formula,
    Next,
    Not,
    Or,
    Prop,
    Until,
    render,
)
from .lasso import LassoTrace, eval_lasso
from .progression import progress
from .streams import stream

__all__ = [
    "random_formula",
    "random_lasso",
    "progression_soundness",
    "CheckReport",
]

_UNARY = (Not, Next, Eventually, Always)
_BINARY = (And, Or, Until)


def random_formula(
    rng: np.random.Generator,
    max_nodes: int = 15,
    props: tuple[str, ...] = ("a", "b", "c", "d", "e"),
    constant_prob: float = 0.03,
) -> Formula:
    """Random formula with at most ``max_nodes`` AST nodes over ``props``."""
    budget = int(rng.integers(1, max_nodes + 1))
    return _grow(rng, budget, props, constant_prob)


def _grow(rng, budget, props, constant_prob) -> Formula:
    if budget <= 1:
        if rng.random() < constant_prob:
            return TRUE if rng.random() < 0.5 else FALSE
        return Prop(props[int(rng.integers(len(props)))])
    roll = rng.random()
    if budget >= 3 and roll < 0.45:
        kind = _BINARY[int(rng.integers(len(_BINARY)))]
        left_budget = int(rng.integers(1, budget - 1))
        left = _grow(rng, left_budget, props, constant_prob)
        right = _grow(rng, budget - 1 - left_budget, props, constant_prob)
        return kind(left, right)
    if roll < 0.80:
        kind = _UNARY[int(rng.integers(len(_UNARY)))]
        return kind(_grow(rng, budget - 1, props, constant_prob))
    return _grow(rng, 1, props, constant_prob)


def random_lasso(
    rng: np.random.Generator,
    props: tuple[str, ...] = ("a", "b", "c", "d", "e"),
    prefix_max: int = 4,
    loop_max: int = 3,
) -> LassoTrace:
    """Random lasso trace; each position holds each proposition with p=0.5."""

    def step() -> frozenset:
        return frozenset(p for p in props if rng.random() < 0.5)

    prefix = tuple(step() for _ in range(int(rng.integers(0, prefix_max + 1))))
    loop = tuple(step() for _ in range(int(rng.integers(1, loop_max + 1))))
    return LassoTrace(prefix, loop)


@dataclass
class CheckReport:
    cases: int
    passes: int
    failures: list

    @property
    def ok(self) -> bool:
        return self.passes == self.cases


def progression_soundness(
    cases: int,
    seed: int,
    max_nodes: int = 15,
    props: tuple[str, ...] = ("a", "b", "c", "d", "e"),
    prefix_max: int = 4,
    loop_max: int = 3,
    position_max: int = 3,
) -> CheckReport:
    """Run ``cases`` random progression-vs-semantics checks.

    Each case samples a formula, a lasso, and a position ``i``, then checks
    that the formula holds at ``i`` iff its progression by the assignment
    at ``i`` holds on the trace with position ``i`` dropped.
    """
    failures = []
    for case in range(cases):
        rng = stream(seed, case)
        f = random_formula(rng, max_nodes, props)
        trace = random_lasso(rng, props, prefix_max, loop_max)
        i = int(rng.integers(0, position_max + 1))
        direct = eval_lasso(trace, i, f)
        residual = progress(trace.at(i), f)
        progressed = eval_lasso(trace.drop(i), i, residual)
        if direct != progressed:
            failures.append(
                {
                    "case": case,
                    "formula": render(f),
                    "prefix": [sorted(s) for s in trace.prefix],
                    "loop": [sorted(s) for s in trace.loop],
                    "position": i,
                    "direct": direct,
                    "progressed": progressed,
                }
            )
    return CheckReport(cases=cases, passes=cases - len(failures), failures=failures)
