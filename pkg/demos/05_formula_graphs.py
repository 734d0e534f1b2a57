"""Formula and observation encodings for neural consumers.

Exports a formula as a typed-edge graph (self-loops plus child-to-parent
tree edges), shows both feature modes, reconstructs the formula from the
graph, and dumps a grid observation.
"""

import json

import numpy as np

from ltl2a.envs import LetterWorld
from ltl2a.export import (
    OneHot,
    RandomFixed,
    encode_features,
    formula_to_graph,
    graph_to_formula,
    grid_observation,
    serialize,
)
from ltl2a.formula import Vocabulary, render
from ltl2a.parsing import parse
from ltl2a.streams import stream

formula = parse("! r U (j & (! p U k))")
vocab = Vocabulary(["r", "j", "p", "k"])
print("formula:", render(formula))
print("prefix: ", render(formula, "prefix"))

graph = formula_to_graph(formula, vocab)
print(f"\ngraph: {graph.n_nodes} nodes, {len(graph.tree_edges())} tree edges,"
      f" root token {graph.nodes[graph.root][1]!r}")
for src, edge_type, dst in graph.tree_edges():
    print(f"  {graph.nodes[src][1]:>2} --{edge_type}--> {graph.nodes[dst][1]}")
print("reconstruction matches:", graph_to_formula(graph) == formula)

print("\n-- feature modes --")
print("one-hot for 'U':      ", encode_features("U", OneHot(), vocab))
mode = RandomFixed(dim=3, seed=0)
vec = encode_features("j", mode, vocab)
print("random-fixed for 'j': ", np.round(vec, 4), "norm", np.linalg.norm(vec))
print("same everywhere:      ",
      np.array_equal(vec, encode_features("j", mode, Vocabulary(["q", "j"]))))

print("\n-- serialized graph (first 240 bytes) --")
print(serialize(formula_to_graph(formula, vocab, mode))[:240], "...")

print("\n-- grid observation --")
env = LetterWorld(placement_seed=3)
state = env.reset(stream(0))
planes = grid_observation(env, state)
print("shape:", planes.shape, "| letter cells:", int(planes[:-1].sum()),
      "| agent plane sum:", int(planes[-1].sum()))
payload = json.loads(serialize(planes))
print("observation schema:", payload["schema"], "shape:", payload["shape"])
