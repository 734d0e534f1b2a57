"""Why seeing the whole task matters: the locked-rooms gap, exactly.

Two rooms, doors that lock behind the agent. The episode's task is
either "blue then green" or "blue then red", equally likely. Blue exists
in both rooms, but green only on the right and red only on the left, so
committing to a room before knowing the tail is a coin flip.

A policy that sees the progressed formula solves every episode (expected
total reward 1.0). The best policy that sees only the per-proposition
effect map (progress / no effect / falsify) cannot distinguish the two
tasks before touching blue, and provably earns exactly 0.5.
"""

from ltl2a.envs import LOCKED_ROOMS_MAP, LockedRooms
from ltl2a.formula import render
from ltl2a.guidance import classify_propositions
from ltl2a.parsing import parse
from ltl2a.product import enumerate_product, run_episode
from ltl2a.solve import (
    greedy_policy,
    myopic_policy,
    myopic_restricted_optimum,
    value_iteration,
)
from ltl2a.streams import stream
from ltl2a.taskgen import ExplicitTasks, TaskDistribution

print("\n".join(LOCKED_ROOMS_MAP))

env = LockedRooms()
tasks = [parse("F (B & F G)"), parse("F (B & F R)")]

print("\n-- the myopic observation cannot tell the tasks apart --")
for phi in tasks:
    effects = classify_propositions(phi, env.vocabulary)
    print(f"{render(phi)}: {{", ", ".join(f"{k}: {v.value}" for k, v in effects.items()), "}")

print("\n-- full-information optimum --")
total = enumerate_product(env, tasks, gamma=1.0)
values, _ = value_iteration(total)
print("expected total reward:", total.expected_initial(values.values))

disc = enumerate_product(env, tasks)
_, table = value_iteration(disc)
policy = greedy_policy(disc, table)
for phi in tasks:
    dist = TaskDistribution(ExplicitTasks.uniform([phi]), seed=0)
    rec = run_episode(env, dist, policy, stream(0))
    path = "".join(step.action[0] for step in rec.steps)
    print(f"  {render(phi)}: {rec.outcome} in {len(rec.steps)} steps ({path}),"
          f" discounted {rec.discounted_return:.4f}")

print("\n-- best effect-map-restricted policy --")
optimum = myopic_restricted_optimum(env, tasks)
print("exact optimum of the restricted class:", optimum.upper)
blind = myopic_policy(env, tasks)
for phi in tasks:
    dist = TaskDistribution(ExplicitTasks.uniform([phi]), seed=0)
    rec = run_episode(env, dist, blind, stream(0))
    print(f"  {render(phi)}: {rec.outcome}, total reward {rec.total_reward:g}")
