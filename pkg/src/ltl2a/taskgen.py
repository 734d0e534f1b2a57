"""Procedural task samplers and exact counters for the two task grammars.

Partially-ordered tasks are conjunctions of eventually-sequences::

    formula  -> sequence & formula | sequence
    sequence -> F (term & sequence) | F term
    term     -> prop | prop "|" prop

Avoidance tasks are conjunctions of until-chains with forbidden heads::

    formula  -> sequence & formula | sequence
    sequence -> ! prop U (prop & sequence) | ! prop U prop

Avoidance chains never reuse a proposition anywhere in the formula, which
keeps every sample satisfiable; the sampler draws the whole formula's
propositions without replacement, so no rejection loop is needed.

Counting convention (documented, conservative): a task is a set of k
distinct sequences, k within the conjunct range; disjunction terms are
unordered pairs of distinct propositions. Counts are exact big integers.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np

from .formula import (
    And,
    Eventually,
    Formula,
    Not,
    Or,
    Prop,
    Until,
    Vocabulary,
    props_of,
)
from .parsing import parse
from .streams import DEFAULT_SEED, stream

__all__ = [
    "PartiallyOrderedParams",
    "AvoidanceParams",
    "ExplicitTasks",
    "TaskDistribution",
    "VocabularyTooSmall",
    "sample_partially_ordered",
    "sample_avoidance",
    "count_tasks",
    "is_partially_ordered",
    "is_avoidance",
    "preset",
    "PRESETS",
    "load_task_params",
    "LETTERS_12",
    "ZONE_COLORS",
]

LETTERS_12 = tuple("abcdefghijkl")
ZONE_COLORS = ("blue", "green", "red", "yellow")


class VocabularyTooSmall(ValueError):
    """Avoidance sampling needs 2 * conjuncts_max * depth_max propositions."""


def _check_range(lo: int, hi: int, what: str) -> None:
    if not (1 <= lo <= hi):
        raise ValueError(f"need 1 <= {what}_min <= {what}_max, got [{lo}, {hi}]")


@dataclass(frozen=True)
class PartiallyOrderedParams:
    conjuncts_min: int
    conjuncts_max: int
    depth_min: int
    depth_max: int
    disjunction_prob: float
    vocabulary: Vocabulary

    def __post_init__(self):
        _check_range(self.conjuncts_min, self.conjuncts_max, "conjuncts")
        _check_range(self.depth_min, self.depth_max, "depth")
        if not 0.0 <= self.disjunction_prob <= 1.0:
            raise ValueError("disjunction_prob must be in [0, 1]")
        if len(self.vocabulary) < (2 if self.disjunction_prob > 0 else 1):
            raise ValueError("vocabulary too small for the term kinds in use")


@dataclass(frozen=True)
class AvoidanceParams:
    conjuncts_min: int
    conjuncts_max: int
    depth_min: int
    depth_max: int
    vocabulary: Vocabulary

    def __post_init__(self):
        _check_range(self.conjuncts_min, self.conjuncts_max, "conjuncts")
        _check_range(self.depth_min, self.depth_max, "depth")
        need = 2 * self.conjuncts_max * self.depth_max
        if len(self.vocabulary) < need:
            raise VocabularyTooSmall(
                f"avoidance needs {need} propositions, vocabulary has "
                f"{len(self.vocabulary)}"
            )


@dataclass(frozen=True)
class ExplicitTasks:
    formulas: tuple[Formula, ...]
    weights: tuple[float, ...]

    def __post_init__(self):
        if len(self.formulas) != len(self.weights) or not self.formulas:
            raise ValueError("need one positive weight per formula")
        if any(not (w > 0 and math.isfinite(w)) for w in self.weights):
            raise ValueError("weights must be positive and finite")

    @classmethod
    def uniform(cls, formulas) -> "ExplicitTasks":
        formulas = tuple(formulas)
        return cls(formulas, (1.0,) * len(formulas))


Params = Union[PartiallyOrderedParams, AvoidanceParams, ExplicitTasks]


def sample_partially_ordered(
    params: PartiallyOrderedParams, rng: np.random.Generator
) -> Formula:
    names = params.vocabulary.names
    n = len(names)

    def term() -> Formula:
        if rng.random() < params.disjunction_prob:
            i, j = rng.choice(n, size=2, replace=False)
            return Or(Prop(names[i]), Prop(names[j]))
        return Prop(names[int(rng.integers(n))])

    def sequence() -> Formula:
        depth = int(rng.integers(params.depth_min, params.depth_max + 1))
        seq = Eventually(term())
        for _ in range(depth - 1):
            seq = Eventually(And(term(), seq))
        return seq

    k = int(rng.integers(params.conjuncts_min, params.conjuncts_max + 1))
    conjuncts = [sequence() for _ in range(k)]
    result = conjuncts[-1]
    for g in reversed(conjuncts[:-1]):
        result = And(g, result)
    return result


def sample_avoidance(params: AvoidanceParams, rng: np.random.Generator) -> Formula:
    names = params.vocabulary.names
    k = int(rng.integers(params.conjuncts_min, params.conjuncts_max + 1))
    depths = [
        int(rng.integers(params.depth_min, params.depth_max + 1)) for _ in range(k)
    ]
    total = 2 * sum(depths)
    picks = [names[i] for i in rng.choice(len(names), size=total, replace=False)]

    conjuncts = []
    at = 0
    for depth in depths:
        pairs = [(picks[at + 2 * j], picks[at + 2 * j + 1]) for j in range(depth)]
        at += 2 * depth
        avoid, reach = pairs[-1]
        seq: Formula = Until(Not(Prop(avoid)), Prop(reach))
        for avoid, reach in reversed(pairs[:-1]):
            seq = Until(Not(Prop(avoid)), And(Prop(reach), seq))
        conjuncts.append(seq)
    result = conjuncts[-1]
    for g in reversed(conjuncts[:-1]):
        result = And(g, result)
    return result


# --- shape recognizers (used by property tests and the samplers' contract) --


def _split_and(f: Formula) -> list[Formula]:
    return _split_and(f.left) + _split_and(f.right) if isinstance(f, And) else [f]


def _po_sequence_depth(f: Formula) -> int | None:
    """Depth of an F-sequence, or None if the shape does not match."""
    if not isinstance(f, Eventually):
        return None
    body = f.child
    if _po_term_ok(body):
        return 1
    if isinstance(body, And) and _po_term_ok(body.left):
        rest = _po_sequence_depth(body.right)
        return None if rest is None else rest + 1
    return None


def _po_term_ok(f: Formula) -> bool:
    if isinstance(f, Prop):
        return True
    return (
        isinstance(f, Or)
        and isinstance(f.left, Prop)
        and isinstance(f.right, Prop)
        and f.left != f.right
    )


def is_partially_ordered(f: Formula, params: PartiallyOrderedParams) -> bool:
    conjuncts = _split_and(f)
    if not (params.conjuncts_min <= len(conjuncts) <= params.conjuncts_max):
        return False
    for seq in conjuncts:
        depth = _po_sequence_depth(seq)
        if depth is None or not (params.depth_min <= depth <= params.depth_max):
            return False
    return props_of(f) <= frozenset(params.vocabulary)


def _avoid_chain_depth(f: Formula) -> int | None:
    if not (isinstance(f, Until) and isinstance(f.left, Not)
            and isinstance(f.left.child, Prop)):
        return None
    body = f.right
    if isinstance(body, Prop):
        return 1
    if isinstance(body, And) and isinstance(body.left, Prop):
        rest = _avoid_chain_depth(body.right)
        return None if rest is None else rest + 1
    return None


def is_avoidance(f: Formula, params: AvoidanceParams) -> bool:
    conjuncts = _split_and(f)
    if not (params.conjuncts_min <= len(conjuncts) <= params.conjuncts_max):
        return False
    total_props = 0
    for seq in conjuncts:
        depth = _avoid_chain_depth(seq)
        if depth is None or not (params.depth_min <= depth <= params.depth_max):
            return False
        total_props += 2 * depth
    names = [n.name for n in _iter_props(f)]
    if len(names) != total_props or len(set(names)) != total_props:
        return False  # a proposition was reused
    return set(names) <= set(params.vocabulary)


def _iter_props(f: Formula):
    from .formula import iter_nodes

    return (n for n in iter_nodes(f) if isinstance(n, Prop))


# --- exact counting ---------------------------------------------------------


def _po_count(params: PartiallyOrderedParams) -> int:
    n = len(params.vocabulary)
    p = params.disjunction_prob
    terms = 0
    if p < 1.0:
        terms += n
    if p > 0.0:
        terms += math.comb(n, 2)
    sequences = sum(
        terms**d for d in range(params.depth_min, params.depth_max + 1)
    )
    return sum(
        math.comb(sequences, k)
        for k in range(params.conjuncts_min, params.conjuncts_max + 1)
    )


def _avoidance_count(params: AvoidanceParams) -> int:
    n = len(params.vocabulary)
    total = 0
    for k in range(params.conjuncts_min, params.conjuncts_max + 1):
        # group ordered depth profiles by their sum
        profiles: dict[int, int] = {0: 1}
        for _ in range(k):
            nxt: dict[int, int] = {}
            for s, ways in profiles.items():
                for d in range(params.depth_min, params.depth_max + 1):
                    nxt[s + d] = nxt.get(s + d, 0) + ways
            profiles = nxt
        ordered = sum(
            ways * math.perm(n, 2 * s) for s, ways in profiles.items()
        )
        quotient, remainder = divmod(ordered, math.factorial(k))
        assert remainder == 0, "conjunct sets must divide evenly"
        total += quotient
    return total


def count_tasks(dist: "TaskDistribution | Params") -> int:
    """Exact number of distinct tasks in the sampler's support.

    Conjunct lists count as unordered sets without repetition and
    disjunction terms as unordered pairs of distinct propositions.
    """
    params = dist.kind if isinstance(dist, TaskDistribution) else dist
    if isinstance(params, PartiallyOrderedParams):
        return _po_count(params)
    if isinstance(params, AvoidanceParams):
        return _avoidance_count(params)
    raise TypeError("counting is defined for the two grammar-based task spaces")


# --- distributions ----------------------------------------------------------


@dataclass(frozen=True)
class TaskDistribution:
    """A task space plus a seed; draw ``index`` is reproducible in isolation."""

    kind: Params
    seed: int = DEFAULT_SEED

    def sample(self, index: int) -> Formula:
        return self.sample_with(stream(self.seed, index))

    def sample_with(self, rng: np.random.Generator) -> Formula:
        if isinstance(self.kind, PartiallyOrderedParams):
            return sample_partially_ordered(self.kind, rng)
        if isinstance(self.kind, AvoidanceParams):
            return sample_avoidance(self.kind, rng)
        weights = np.asarray(self.kind.weights, dtype=float)
        idx = int(rng.choice(len(weights), p=weights / weights.sum()))
        return self.kind.formulas[idx]

    @property
    def vocabulary(self) -> Vocabulary:
        if isinstance(self.kind, ExplicitTasks):
            return Vocabulary.from_formulas(*self.kind.formulas)
        return self.kind.vocabulary


# --- presets and parameter files -------------------------------------------

_LETTER_VOCAB = Vocabulary(LETTERS_12)
_ZONE_VOCAB = Vocabulary(ZONE_COLORS)

PRESETS: dict[str, Params] = {
    # training-scale spaces for the 12-letter grid
    "letterworld-po": PartiallyOrderedParams(1, 4, 1, 5, 0.25, _LETTER_VOCAB),
    "letterworld-avoid": AvoidanceParams(1, 2, 1, 3, _LETTER_VOCAB),
    # upward-generalization spaces (larger than training)
    "upgen-depth": AvoidanceParams(1, 1, 6, 6, _LETTER_VOCAB),
    "upgen-conjuncts": AvoidanceParams(3, 3, 2, 2, _LETTER_VOCAB),
    "upgen-depth-po": PartiallyOrderedParams(2, 4, 15, 15, 0.25, _LETTER_VOCAB),
    "upgen-conjuncts-po": PartiallyOrderedParams(12, 12, 3, 5, 0.25, _LETTER_VOCAB),
    # short chains over the four zone colours
    "zoneenv-avoid": AvoidanceParams(1, 1, 1, 2, _ZONE_VOCAB),
}


def preset(name: str, seed: int = DEFAULT_SEED) -> TaskDistribution:
    try:
        return TaskDistribution(PRESETS[name], seed)
    except KeyError:
        known = ", ".join(sorted(PRESETS))
        raise KeyError(f"unknown task preset {name!r} (known: {known})") from None


def load_task_params(source: "str | Path | dict") -> Params:
    """Load sampler parameters from a JSON file or an equivalent dict."""
    if not isinstance(source, dict):
        source = json.loads(Path(source).read_text())
    kind = source.get("kind")
    if kind == "partially-ordered":
        return PartiallyOrderedParams(
            conjuncts_min=source["conjuncts_min"],
            conjuncts_max=source["conjuncts_max"],
            depth_min=source["depth_min"],
            depth_max=source["depth_max"],
            disjunction_prob=source["disjunction_prob"],
            vocabulary=Vocabulary(source["vocabulary"]),
        )
    if kind == "avoidance":
        return AvoidanceParams(
            conjuncts_min=source["conjuncts_min"],
            conjuncts_max=source["conjuncts_max"],
            depth_min=source["depth_min"],
            depth_max=source["depth_max"],
            vocabulary=Vocabulary(source["vocabulary"]),
        )
    if kind == "explicit":
        formulas = tuple(parse(text) for text in source["formulas"])
        weights = tuple(source.get("weights", [1.0] * len(formulas)))
        return ExplicitTasks(formulas, weights)
    raise ValueError(f"unknown task kind {kind!r}")
