"""Solving tasks in the single-state practice environment.

Every action makes exactly one proposition true, so the environment is
pure task semantics: ideal for checking solvers against hand-computable
values and for cheap tabular learning.
"""

from ltl2a.envs import Bootcamp
from ltl2a.formula import Vocabulary, render
from ltl2a.parsing import parse
from ltl2a.product import enumerate_product
from ltl2a.solve import (
    QHyper,
    evaluate,
    exhaustive_optimum,
    q_learning,
    qtable_policy,
    value_iteration,
)
from ltl2a.taskgen import AvoidanceParams, ExplicitTasks, TaskDistribution

env = Bootcamp(["a", "b"])
phi = parse("F (a & F b)")
print("task:", render(phi), f"(gamma={env.gamma})")

mdp = enumerate_product(env, [phi])
values, table = value_iteration(mdp)
print("value iteration optimum:", values.values[mdp.initial[0][0]])
print("exhaustive depth-2 optimum:", exhaustive_optimum(env, phi, horizon=2))
print(mdp.to_table_text())

print("-- tabular Q-learning on random depth<=2 avoidance tasks --")
vocab = Vocabulary(["a", "b", "c", "d"])
env4 = Bootcamp(vocab)
dist = TaskDistribution(AvoidanceParams(1, 1, 1, 2, vocab), seed=5)
learner = q_learning(env4, dist, QHyper(episodes=10_000, seed=6))
print(f"trained on {learner.episodes} episodes, {learner.steps} steps,"
      f" {len(learner.q)} table entries")
metrics = evaluate(env4, dist, qtable_policy(env4, learner), 1_000, rng=42)
print("greedy policy:", metrics.to_json())
