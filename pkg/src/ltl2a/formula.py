"""Immutable LTL formula trees, vocabularies, and text rendering.

Formula nodes are frozen dataclasses: structural equality, hashable, safe
to share across threads and to use as dict keys. The concrete syntax is
the usual ASCII one (`!`, `&`, `|`, `X`, `U`, `F`, `G`, `true`, `false`);
see :mod:`ltl2a.parsing` for the grammar.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator

__all__ = [
    "Formula",
    "TrueFormula",
    "FalseFormula",
    "Prop",
    "Not",
    "And",
    "Or",
    "Next",
    "Until",
    "Eventually",
    "Always",
    "TRUE",
    "FALSE",
    "TruthAssignment",
    "Vocabulary",
    "size",
    "props_of",
    "iter_nodes",
    "render",
    "prefix_tokens",
]


class Formula:
    """Base class for all formula nodes."""

    __slots__ = ()

    def __and__(self, other: "Formula") -> "And":
        return And(self, other)

    def __or__(self, other: "Formula") -> "Or":
        return Or(self, other)

    def __invert__(self) -> "Not":
        return Not(self)

    def __str__(self) -> str:
        return render(self)


@dataclass(frozen=True, slots=True)
class TrueFormula(Formula):
    pass


@dataclass(frozen=True, slots=True)
class FalseFormula(Formula):
    pass


@dataclass(frozen=True, slots=True)
class Prop(Formula):
    """Atomic proposition. ``name`` must be a valid identifier."""

    name: str


@dataclass(frozen=True, slots=True)
class Not(Formula):
    child: Formula


@dataclass(frozen=True, slots=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Next(Formula):
    child: Formula


@dataclass(frozen=True, slots=True)
class Until(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Eventually(Formula):
    child: Formula


@dataclass(frozen=True, slots=True)
class Always(Formula):
    child: Formula


TRUE = TrueFormula()
FALSE = FalseFormula()

# A truth assignment is the set of proposition names that hold at one step.
TruthAssignment = frozenset

_NAME_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")

# "true"/"false" are constant keywords; a proposition named "U" could never
# be parsed back (U is always the binary operator).
_RESERVED_NAMES = frozenset({"true", "false", "U"})


def valid_prop_name(name: str) -> bool:
    return bool(_NAME_RE.match(name)) and name not in _RESERVED_NAMES


class Vocabulary:
    """Ordered, immutable set of proposition names.

    Positions are 0..n-1 in construction order; the order is stable for a
    given input, so feature indices and sampling are reproducible.
    """

    __slots__ = ("_names", "_index")

    def __init__(self, names: Iterable[str]):
        seen: dict[str, int] = {}
        for name in names:
            if not valid_prop_name(name):
                raise ValueError(f"invalid proposition name: {name!r}")
            if name in seen:
                raise ValueError(f"duplicate proposition name: {name!r}")
            seen[name] = len(seen)
        self._names: tuple[str, ...] = tuple(seen)
        self._index: dict[str, int] = seen

    @classmethod
    def from_formulas(cls, *formulas: Formula) -> "Vocabulary":
        """Vocabulary of all propositions, in first-occurrence order."""
        names: dict[str, None] = {}
        for f in formulas:
            for node in iter_nodes(f):
                if isinstance(node, Prop):
                    names.setdefault(node.name, None)
        return cls(names)

    @property
    def names(self) -> tuple[str, ...]:
        return self._names

    def index(self, name: str) -> int:
        return self._index[name]

    def union(self, names: Iterable[str]) -> "Vocabulary":
        """New vocabulary with ``names`` appended (first occurrence wins)."""
        merged = dict.fromkeys(self._names)
        for name in names:
            merged.setdefault(name, None)
        return Vocabulary(merged)

    def __contains__(self, name: object) -> bool:
        return name in self._index

    def __len__(self) -> int:
        return len(self._names)

    def __iter__(self) -> Iterator[str]:
        return iter(self._names)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Vocabulary) and self._names == other._names

    def __hash__(self) -> int:
        return hash(self._names)

    def __repr__(self) -> str:
        return f"Vocabulary({list(self._names)!r})"


def iter_nodes(f: Formula) -> Iterator[Formula]:
    """Yield all nodes of ``f`` in pre-order (root first)."""
    stack = [f]
    while stack:
        node = stack.pop()
        yield node
        if isinstance(node, (Not, Next, Eventually, Always)):
            stack.append(node.child)
        elif isinstance(node, (And, Or, Until)):
            stack.append(node.right)
            stack.append(node.left)


def size(f: Formula) -> int:
    """Number of AST nodes (always >= 1)."""
    return sum(1 for _ in iter_nodes(f))


def props_of(f: Formula) -> frozenset:
    """Set of proposition names occurring in ``f``."""
    return frozenset(n.name for n in iter_nodes(f) if isinstance(n, Prop))


# Precedence levels, high binds tighter. Mirrors the parser:
# unary (!, X, F, G) > U (right-assoc) > & > |.
_PREC_OR = 1
_PREC_AND = 2
_PREC_UNTIL = 3
_PREC_UNARY = 4
_PREC_ATOM = 5

_UNARY_TOKEN = {Not: "!", Next: "X", Eventually: "F", Always: "G"}


def _prec(f: Formula) -> int:
    if isinstance(f, Or):
        return _PREC_OR
    if isinstance(f, And):
        return _PREC_AND
    if isinstance(f, Until):
        return _PREC_UNTIL
    if isinstance(f, (Not, Next, Eventually, Always)):
        return _PREC_UNARY
    return _PREC_ATOM


def _wrap(f: Formula, minimum: int) -> str:
    text = _infix(f)
    return f"({text})" if _prec(f) < minimum else text


def _infix(f: Formula) -> str:
    if isinstance(f, TrueFormula):
        return "true"
    if isinstance(f, FalseFormula):
        return "false"
    if isinstance(f, Prop):
        return f.name
    if isinstance(f, (Not, Next, Eventually, Always)):
        return f"{_UNARY_TOKEN[type(f)]} {_wrap(f.child, _PREC_UNARY)}"
    if isinstance(f, Until):
        # left operand sits at unary level, right continues the U chain
        return f"{_wrap(f.left, _PREC_UNARY)} U {_wrap(f.right, _PREC_UNTIL)}"
    if isinstance(f, And):
        return f"{_wrap(f.left, _PREC_UNTIL)} & {_wrap(f.right, _PREC_AND)}"
    if isinstance(f, Or):
        return f"{_wrap(f.left, _PREC_AND)} | {_wrap(f.right, _PREC_OR)}"
    raise TypeError(f"not a formula: {f!r}")


def prefix_tokens(f: Formula) -> list[str]:
    """Pre-order token stream, one token per AST node."""
    out: list[str] = []
    for node in iter_nodes(f):
        if isinstance(node, TrueFormula):
            out.append("true")
        elif isinstance(node, FalseFormula):
            out.append("false")
        elif isinstance(node, Prop):
            out.append(node.name)
        elif isinstance(node, (Not, Next, Eventually, Always)):
            out.append(_UNARY_TOKEN[type(node)])
        elif isinstance(node, And):
            out.append("&")
        elif isinstance(node, Or):
            out.append("|")
        elif isinstance(node, Until):
            out.append("U")
    return out


def render(f: Formula, notation: str = "infix") -> str:
    """Render ``f`` as text.

    ``infix`` output re-parses to a structurally identical tree; ``prefix``
    is the whitespace-separated pre-order token stream.
    """
    if notation == "infix":
        return _infix(f)
    if notation == "prefix":
        return " ".join(prefix_tokens(f))
    raise ValueError(f"unknown notation: {notation!r}")
