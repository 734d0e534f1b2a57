"""Product of an environment with a progressed task formula.

The product pairs each environment state with the current residual
formula. Stepping progresses the formula by the step's label; reward is
+1 when the residual hits true, -1 when it hits false, else 0, and the
pair is terminal exactly on those events (or on a terminal environment
state). Episodes that outrun the timeout end with outcome ``Timeout``
and no terminal reward; the timeout belongs to evaluation, not to the
MDP, so exact solvers work on the unbounded product.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .formula import FALSE, TRUE, Formula, render
from .progression import progress, simplify
from .taskgen import TaskDistribution

__all__ = [
    "ProductState",
    "product_step",
    "initial_product_state",
    "EpisodeStep",
    "EpisodeRecord",
    "run_episode",
    "ExplicitMDP",
    "enumerate_product",
    "StateCapExceeded",
]

SUCCESS = "Success"
FAILURE = "Failure"
TIMEOUT = "Timeout"


class StateCapExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class ProductState:
    """Environment state plus the simplify-normalized residual task."""

    env_state: object
    task: Formula


def is_terminal(env, st: ProductState) -> bool:
    return st.task in (TRUE, FALSE) or env.is_terminal(st.env_state)


def initial_product_state(env, task: Formula, rng) -> ProductState:
    return ProductState(env.reset(rng), simplify(task))


def product_step(env, st: ProductState, action) -> tuple[ProductState, int, bool]:
    """One product transition: ``(next state, reward, terminal)``."""
    if is_terminal(env, st):
        raise ValueError("cannot step a terminal product state")
    label = env.label(st.env_state, action)
    env_next = env.step(st.env_state, action)
    task_next = progress(label, st.task)
    if task_next == TRUE:
        reward = 1
    elif task_next == FALSE:
        reward = -1
    else:
        reward = 0
    nxt = ProductState(env_next, task_next)
    return nxt, reward, is_terminal(env, nxt)


# --- episodes ----------------------------------------------------------------


@dataclass(frozen=True)
class EpisodeStep:
    env_state: object  # state the action was taken from
    action: object
    label: frozenset
    task: Formula  # residual after the step
    reward: int


@dataclass(frozen=True)
class EpisodeRecord:
    initial_task: Formula
    gamma: float
    steps: tuple[EpisodeStep, ...]
    outcome: str  # Success | Failure | Timeout
    discounted_return: float
    total_reward: float

    def to_json(self, env=None) -> str:
        def state_json(s):
            return env.state_json(s) if env is not None else repr(s)

        payload = {
            "schema": "episode/1",
            "initial_task": render(self.initial_task),
            "gamma": self.gamma,
            "steps": [
                {
                    "env_state": state_json(s.env_state),
                    "action": s.action,
                    "label": sorted(s.label),
                    "task": render(s.task),
                    "reward": s.reward,
                }
                for s in self.steps
            ],
            "outcome": self.outcome,
            "discounted_return": self.discounted_return,
            "total_reward": self.total_reward,
        }
        return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def run_episode(
    env,
    dist: TaskDistribution,
    policy: Callable,
    rng: np.random.Generator,
    timeout: Optional[int] = None,
) -> EpisodeRecord:
    """Sample a task, reset the environment, and act until the task
    resolves, the environment terminates, or the step budget runs out.

    ``policy`` is called as ``policy(product_state, rng)``. Discounting
    starts at the first action (k = 0). A task that is already constant
    yields a zero-step episode labelled by its verdict.
    """
    task0 = dist.sample_with(rng)
    st = initial_product_state(env, task0, rng)
    limit = env.timeout if timeout is None else int(timeout)
    steps: list[EpisodeStep] = []
    discounted = 0.0
    total = 0.0
    outcome = TIMEOUT
    if st.task == TRUE:
        outcome = SUCCESS
    elif st.task == FALSE:
        outcome = FAILURE
    else:
        for k in range(limit):
            action = policy(st, rng)
            nxt, reward, terminal = product_step(env, st, action)
            steps.append(
                EpisodeStep(
                    env_state=st.env_state,
                    action=action,
                    label=env.label(st.env_state, action),
                    task=nxt.task,
                    reward=reward,
                )
            )
            discounted += (env.gamma**k) * reward
            total += reward
            st = nxt
            if terminal:
                if reward > 0:
                    outcome = SUCCESS
                elif reward < 0:
                    outcome = FAILURE
                break
    return EpisodeRecord(
        initial_task=simplify(task0),
        gamma=env.gamma,
        steps=tuple(steps),
        outcome=outcome,
        discounted_return=discounted,
        total_reward=total,
    )


# --- explicit enumeration ----------------------------------------------------


@dataclass
class ExplicitMDP:
    """Fully enumerated product: deterministic tables for exact solvers.

    ``succ[s, a]`` / ``reward[s, a]`` are total over non-terminal states;
    terminal rows carry successor -1 and reward 0 (no outgoing entries).
    """

    states: list[ProductState]
    state_index: dict
    actions: tuple
    succ: np.ndarray  # (S, A) int64, -1 on terminal rows
    reward: np.ndarray  # (S, A) float64
    terminal: np.ndarray  # (S,) bool
    gamma: float
    initial: list[tuple[int, float]]  # (state index, probability)
    env: object = field(repr=False, default=None)

    @property
    def n_states(self) -> int:
        return len(self.states)

    def expected_initial(self, values: np.ndarray) -> float:
        return float(sum(w * values[i] for i, w in self.initial))

    def to_table_text(self) -> str:
        lines = [f"# product MDP: {self.n_states} states, gamma={self.gamma}"]
        lines.append("# initial: " + ", ".join(f"{i}:{w:g}" for i, w in self.initial))
        for i, st in enumerate(self.states):
            mark = " *" if self.terminal[i] else ""
            key = self.env.state_key(st.env_state) if self.env else st.env_state
            lines.append(f"state {i}{mark}: {key} | {render(st.task)}")
            if not self.terminal[i]:
                for a, name in enumerate(self.actions):
                    lines.append(
                        f"  {name} -> {int(self.succ[i, a])}"
                        f" r={self.reward[i, a]:+g}"
                    )
        return "\n".join(lines) + "\n"


def enumerate_product(
    env,
    phis,
    weights=None,
    gamma: Optional[float] = None,
    max_states: int = 200_000,
    max_formulas: int = 10_000,
) -> ExplicitMDP:
    """Enumerate all product states reachable from the initial tasks.

    The environment's start state must be deterministic (pin LetterWorld
    with ``placement_seed``). ``weights`` defaults to uniform over
    ``phis``.
    """
    from .progression import ClosureCapExceeded
    from .streams import stream

    phis = list(phis)
    if weights is None:
        weights = [1.0] * len(phis)
    total_w = float(sum(weights))

    if getattr(env, "placement_seed", "n/a") is None:
        raise ValueError("enumeration needs a pinned layout (set placement_seed)")

    rng = stream(0)
    start_env = env.reset(rng)

    states: list[ProductState] = []
    index: dict[ProductState, int] = {}
    formulas: set[Formula] = set()

    def intern(ps: ProductState) -> int:
        idx = index.get(ps)
        if idx is None:
            idx = len(states)
            if idx >= max_states:
                raise StateCapExceeded(f"product exceeds {max_states} states")
            index[ps] = idx
            states.append(ps)
            formulas.add(ps.task)
            if len(formulas) > max_formulas:
                raise ClosureCapExceeded(max_formulas, len(formulas))
        return idx

    initial = []
    for phi, w in zip(phis, weights):
        idx = intern(ProductState(start_env, simplify(phi)))
        initial.append((idx, w / total_w))

    actions = tuple(env.actions)
    succ_rows: list[list[int]] = []
    reward_rows: list[list[float]] = []
    cursor = 0
    while cursor < len(states):
        st = states[cursor]
        if is_terminal(env, st):
            succ_rows.append([-1] * len(actions))
            reward_rows.append([0.0] * len(actions))
        else:
            srow, rrow = [], []
            for action in actions:
                nxt, reward, _ = product_step(env, st, action)
                srow.append(intern(nxt))
                rrow.append(float(reward))
            succ_rows.append(srow)
            reward_rows.append(rrow)
        cursor += 1

    terminal = np.array([is_terminal(env, st) for st in states], dtype=bool)
    return ExplicitMDP(
        states=states,
        state_index=index,
        actions=actions,
        succ=np.array(succ_rows, dtype=np.int64),
        reward=np.array(reward_rows, dtype=np.float64),
        terminal=terminal,
        gamma=env.gamma if gamma is None else float(gamma),
        initial=initial,
        env=env,
    )
