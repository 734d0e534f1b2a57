"""Formula and observation encodings for external (neural) consumers.

A formula exports as a directed labeled graph: one node per AST node in
pre-order, a self-loop on every node, and one typed tree edge per child
pointing child -> parent (``unary``, ``binary_left``, ``binary_right``),
so messages flow bottom-up and the root embedding summarizes the formula.

Node features are either one-hot over a fixed operator vocabulary
followed by the proposition vocabulary, or, for propositions only, a
random-but-fixed unit vector keyed by (name, seed) so the same symbol is
encoded identically in formulas and in grid observations.

All serializers emit schema-versioned JSON with sorted keys and compact
separators, so identical payloads are byte-identical; feature numbers are
written as decimal strings.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

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
    Vocabulary,
    prefix_tokens,
    size,
)
from .product import EpisodeRecord
from .solve import Metrics

__all__ = [
    "OPERATOR_TOKENS",
    "SELF_LOOP",
    "UNARY",
    "BINARY_LEFT",
    "BINARY_RIGHT",
    "OneHot",
    "RandomFixed",
    "LabeledGraph",
    "formula_to_graph",
    "graph_to_formula",
    "encode_features",
    "grid_observation",
    "serialize",
]

# Fixed operator vocabulary with stable indices 0..8; propositions follow
# in vocabulary order.
OPERATOR_TOKENS = ("true", "false", "!", "&", "|", "X", "U", "F", "G")

SELF_LOOP = "self_loop"
UNARY = "unary"
BINARY_LEFT = "binary_left"
BINARY_RIGHT = "binary_right"

_NODE_TOKEN = {
    TrueFormula: ("const", "true"),
    FalseFormula: ("const", "false"),
    Not: ("op", "!"),
    And: ("op", "&"),
    Or: ("op", "|"),
    Next: ("op", "X"),
    Until: ("op", "U"),
    Eventually: ("op", "F"),
    Always: ("op", "G"),
}


@dataclass(frozen=True)
class OneHot:
    pass


@dataclass(frozen=True)
class RandomFixed:
    """Propositions get fixed seeded unit vectors; operators stay one-hot."""

    dim: int = 3
    seed: int = 0


FeatureMode = Union[OneHot, RandomFixed]


@dataclass(frozen=True)
class LabeledGraph:
    nodes: tuple  # (kind, token) per node, pre-order
    features: tuple  # feature vector (tuple of floats) per node
    edges: tuple  # (src, edge_type, dst), child -> parent, plus self-loops
    root: int

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    def tree_edges(self) -> list:
        return [e for e in self.edges if e[1] != SELF_LOOP]


def _prop_vector(name: str, dim: int, seed: int) -> np.ndarray:
    entropy = [seed] + list(name.encode())
    rng = np.random.default_rng(np.random.SeedSequence(entropy))
    while True:
        v = rng.standard_normal(dim)
        norm = np.linalg.norm(v)
        if norm > 1e-9:
            return v / norm


def encode_features(token: str, mode: FeatureMode, vocab: Vocabulary) -> np.ndarray:
    """Feature vector for one token under the given mode.

    One-hot length is ``len(OPERATOR_TOKENS) + len(vocab)``. In
    ``RandomFixed`` mode all vectors have length ``9 + dim``: operators
    keep their one-hot block, propositions carry a unit vector in the
    trailing block, identical wherever that proposition appears.
    """
    n_ops = len(OPERATOR_TOKENS)
    if isinstance(mode, OneHot):
        out = np.zeros(n_ops + len(vocab))
        if token in OPERATOR_TOKENS:
            out[OPERATOR_TOKENS.index(token)] = 1.0
        elif token in vocab:
            out[n_ops + vocab.index(token)] = 1.0
        else:
            raise KeyError(f"unknown token {token!r}")
        return out
    out = np.zeros(n_ops + mode.dim)
    if token in OPERATOR_TOKENS:
        out[OPERATOR_TOKENS.index(token)] = 1.0
    elif token in vocab:
        out[n_ops:] = _prop_vector(token, mode.dim, mode.seed)
    else:
        raise KeyError(f"unknown token {token!r}")
    return out


def formula_to_graph(
    f: Formula, vocab: Vocabulary, mode: FeatureMode = OneHot()
) -> LabeledGraph:
    """Typed-edge graph of the AST: self-loops plus child->parent edges."""
    nodes: list = []
    edges: list = []

    def visit(node: Formula) -> int:
        my_id = len(nodes)
        if isinstance(node, Prop):
            nodes.append(("prop", node.name))
        else:
            nodes.append(_NODE_TOKEN[type(node)])
        edges.append((my_id, SELF_LOOP, my_id))
        if isinstance(node, (Not, Next, Eventually, Always)):
            child = visit(node.child)
            edges.append((child, UNARY, my_id))
        elif isinstance(node, (And, Or, Until)):
            left = visit(node.left)
            edges.append((left, BINARY_LEFT, my_id))
            right = visit(node.right)
            edges.append((right, BINARY_RIGHT, my_id))
        return my_id

    visit(f)
    features = tuple(
        tuple(float(x) for x in encode_features(token, mode, vocab))
        for _, token in nodes
    )
    return LabeledGraph(
        nodes=tuple(nodes), features=features, edges=tuple(edges), root=0
    )


def graph_to_formula(graph: LabeledGraph) -> Formula:
    """Rebuild the formula from a labeled graph (round-trip check)."""
    children: dict[int, dict[str, int]] = {i: {} for i in range(graph.n_nodes)}
    for src, edge_type, dst in graph.edges:
        if edge_type != SELF_LOOP:
            children[dst][edge_type] = src

    unary = {"!": Not, "X": Next, "F": Eventually, "G": Always}
    binary = {"&": And, "|": Or, "U": Until}

    def build(i: int) -> Formula:
        kind, token = graph.nodes[i]
        if kind == "prop":
            return Prop(token)
        if kind == "const":
            return TRUE if token == "true" else FALSE
        if token in unary:
            return unary[token](build(children[i][UNARY]))
        return binary[token](
            build(children[i][BINARY_LEFT]), build(children[i][BINARY_RIGHT])
        )

    return build(graph.root)


# --- grid observation export --------------------------------------------------


def grid_observation(env, state, egocentric: bool = False) -> np.ndarray:
    """Per-letter one-hot planes plus an agent plane, shape (L+1, H, W).

    The egocentric variant is a centered crop: the grid is translated so
    the agent sits at the center cell and cells shifted off the border are
    zero padding.
    """
    height, width = env.height, env.width
    letters = env.vocabulary.names
    # planes 0..L-1 are the letters, plane L the agent position
    planes = np.zeros((len(letters) + 1, height, width))
    for r, c, letter in state.layout.cells:
        planes[letters.index(letter), r, c] = 1.0
    planes[len(letters), state.agent[0], state.agent[1]] = 1.0
    if not egocentric:
        return planes
    out = np.zeros_like(planes)
    dr = height // 2 - state.agent[0]
    dc = width // 2 - state.agent[1]
    for r in range(height):
        for c in range(width):
            r2, c2 = r + dr, c + dc
            if 0 <= r2 < height and 0 <= c2 < width:
                out[:, r2, c2] = planes[:, r, c]
    return out


# --- JSON serialization ---------------------------------------------------------


def _dumps(payload) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def _graph_payload(graph: LabeledGraph) -> dict:
    return {
        "schema": "graph/1",
        "nodes": [
            {
                "id": i,
                "kind": kind,
                "token": token,
                "features": [str(x) for x in graph.features[i]],
            }
            for i, (kind, token) in enumerate(graph.nodes)
        ],
        "edges": [
            {"src": src, "type": edge_type, "dst": dst}
            for src, edge_type, dst in graph.edges
        ],
        "root": graph.root,
    }


def serialize(payload, env=None) -> str:
    """Schema-versioned JSON text; identical payloads give identical bytes."""
    if isinstance(payload, LabeledGraph):
        return _dumps(_graph_payload(payload))
    if isinstance(payload, Formula):
        return _dumps({"schema": "prefix/1", "tokens": prefix_tokens(payload)})
    if isinstance(payload, EpisodeRecord):
        return payload.to_json(env)
    if isinstance(payload, Metrics):
        return payload.to_json()
    if isinstance(payload, np.ndarray):
        return _dumps(
            {
                "schema": "observation/1",
                "shape": list(payload.shape),
                "planes": [str(x) for x in payload.reshape(-1)],
            }
        )
    raise TypeError(f"do not know how to serialize {type(payload).__name__}")
