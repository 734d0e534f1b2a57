"""Per-proposition effect classification, the myopic observation.

For each proposition, report what making it (alone) true right now would
do to the task: progress it, leave it unchanged, or falsify it. A myopic
agent conditions on this map instead of on the formula itself, which is
exactly what makes it blind to how subgoals interact later.
"""

from __future__ import annotations

import json
from enum import Enum

from .formula import FALSE, TRUE, Formula, Vocabulary
from .progression import progress, simplify

__all__ = ["PropositionEffect", "classify_propositions", "classification_key"]


class PropositionEffect(str, Enum):
    PROGRESS = "Progress"
    NO_EFFECT = "NoEffect"
    FALSIFY = "Falsify"


def classify_propositions(f: Formula, vocab: Vocabulary) -> dict:
    """Map each proposition name to its :class:`PropositionEffect` on ``f``.

    Unsatisfiability is detected as progression-then-simplification
    reaching false; sound, though incomplete for LTL at large.
    """
    if f in (TRUE, FALSE):
        raise ValueError("cannot classify propositions of a resolved task")
    base = simplify(f)
    effects = {}
    for name in vocab:
        residual = progress({name}, f)
        if residual == FALSE:
            effects[name] = PropositionEffect.FALSIFY
        elif residual == base:
            effects[name] = PropositionEffect.NO_EFFECT
        else:
            effects[name] = PropositionEffect.PROGRESS
    return effects


def classification_key(f: Formula, vocab: Vocabulary) -> tuple:
    """Hashable form of the classification map, in vocabulary order."""
    effects = classify_propositions(f, vocab)
    return tuple(effects[name].value for name in vocab)


def classification_json(f: Formula, vocab: Vocabulary) -> str:
    effects = classify_propositions(f, vocab)
    payload = {
        "schema": "classification/1",
        "effects": {name: effect.value for name, effect in effects.items()},
    }
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))
