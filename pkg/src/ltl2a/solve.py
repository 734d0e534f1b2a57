"""Exact and tabular solvers over product MDPs.

* ``value_iteration``: synchronous sweeps to a sup-norm residual, greedy
  ties broken by lowest action index.
* ``exhaustive_optimum``: brute-force maximum over all depth-H action
  trees from the start state, rewards replayed by progressing the
  initial formula along the label path. No state merging across
  histories, so it is a genuinely history-dependent optimum and an
  independent check that the stationary product optimum matches it.
* ``q_learning``: lazy tabular learner keyed by (environment state,
  rendered residual formula), deterministic per seed.
* ``evaluate``: episode rollouts aggregated into :class:`Metrics`.
* ``myopic_restricted_optimum``: exact best expected total reward over
  policies that see only (environment state, per-proposition effect map)
  instead of the formula, via value iteration on the induced belief MDP
  in exact rational arithmetic, certified by a stationary witness.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from .formula import FALSE, TRUE, Formula, render
from .guidance import classification_key
from .product import (
    FAILURE,
    SUCCESS,
    TIMEOUT,
    EpisodeRecord,
    ExplicitMDP,
    ProductState,
    run_episode,
)
from .progression import progress, simplify
from .streams import stream
from .taskgen import TaskDistribution

__all__ = [
    "ValueTable",
    "PolicyTable",
    "value_iteration",
    "deterministic_policy_value",
    "exhaustive_optimum",
    "BudgetExceeded",
    "QHyper",
    "QTable",
    "q_learning",
    "Metrics",
    "evaluate",
    "MyopicOptimum",
    "myopic_restricted_optimum",
    "greedy_policy",
    "random_policy",
    "myopic_policy",
]

Z90 = 1.6448536269514722  # two-sided 90% normal quantile


@dataclass(frozen=True)
class ValueTable:
    values: np.ndarray  # (S,), zero on terminals
    residual: float
    sweeps: int


@dataclass(frozen=True)
class PolicyTable:
    greedy: np.ndarray  # (S,) action index; meaningful on non-terminals only
    actions: tuple


def value_iteration(
    mdp: ExplicitMDP, tol: float = 1e-9, max_sweeps: int = 1_000_000
) -> tuple[ValueTable, PolicyTable]:
    """Synchronous value iteration until the Bellman residual drops below
    ``tol``; terminal values stay 0."""
    succ = np.where(mdp.succ < 0, 0, mdp.succ)
    live = ~mdp.terminal
    values = np.zeros(mdp.n_states)
    residual = math.inf
    sweeps = 0
    while residual >= tol:
        if sweeps >= max_sweeps:
            raise RuntimeError(f"no convergence after {max_sweeps} sweeps")
        q = mdp.reward + mdp.gamma * values[succ]
        updated = np.where(live, q.max(axis=1), 0.0)
        residual = float(np.abs(updated - values).max())
        values = updated
        sweeps += 1
    q = mdp.reward + mdp.gamma * values[succ]
    greedy = q.argmax(axis=1)  # argmax takes the lowest index on ties
    return (
        ValueTable(values=values, residual=residual, sweeps=sweeps),
        PolicyTable(greedy=greedy, actions=mdp.actions),
    )


def deterministic_policy_value(
    mdp: ExplicitMDP, greedy: np.ndarray, start: int, exact: bool = False
):
    """Exact return of a deterministic policy from ``start`` by rollout.

    Rewards occur only on transitions into terminal states, so once a
    state repeats the remaining return is zero and the rollout stops.
    With ``exact`` the result is a :class:`fractions.Fraction` (gamma must
    then be rational, e.g. 1).
    """
    gamma = Fraction(mdp.gamma) if exact else mdp.gamma
    total = Fraction(0) if exact else 0.0
    factor = Fraction(1) if exact else 1.0
    seen = set()
    state = start
    while not mdp.terminal[state] and state not in seen:
        seen.add(state)
        action = int(greedy[state])
        total += factor * (
            Fraction(int(mdp.reward[state, action])) if exact
            else mdp.reward[state, action]
        )
        factor *= gamma
        state = int(mdp.succ[state, action])
    return total


# --- exhaustive finite-horizon optimum ---------------------------------------


class BudgetExceeded(RuntimeError):
    pass


def exhaustive_optimum(
    env,
    phi: Formula,
    horizon: int,
    budget: int = 10**7,
    gamma: Optional[float] = None,
) -> float:
    """Best discounted return over every depth-``horizon`` action tree.

    Enumerates all action sequences from the deterministic start state;
    each path replays progression from the initial formula over its own
    label sequence and stops at the first resolution. ``budget`` caps the
    number of explored root-to-leaf paths.
    """
    if horizon < 0:
        raise ValueError("horizon must be >= 0")
    if horizon == 0:
        return 0.0
    g = env.gamma if gamma is None else float(gamma)
    start = env.reset(stream(0))
    base = simplify(phi)
    if base == TRUE or base == FALSE:
        return 0.0
    actions = tuple(env.actions)

    # interning makes the per-node work cheap; the search itself never
    # merges histories
    formulas: list[Formula] = [base]
    findex: dict[Formula, int] = {base: 0}
    step_cache: dict = {}  # (env state, action) -> (next state, label)
    prog_cache: dict = {}  # (formula idx, label) -> formula idx | +/-1 sentinel

    leaves = 0

    def explore(state, fidx: int, depth: int) -> float:
        nonlocal leaves
        best = -math.inf
        for action in actions:
            key = (state, action)
            hop = step_cache.get(key)
            if hop is None:
                hop = (env.step(state, action), env.label(state, action))
                step_cache[key] = hop
            nxt, label = hop
            pkey = (fidx, label)
            res = prog_cache.get(pkey)
            if res is None:
                residual = progress(label, formulas[fidx])
                if residual == TRUE:
                    res = "+"
                elif residual == FALSE:
                    res = "-"
                else:
                    res = findex.get(residual)
                    if res is None:
                        res = len(formulas)
                        findex[residual] = res
                        formulas.append(residual)
                prog_cache[pkey] = res
            if res == "+":
                value = 1.0
                leaves += 1
            elif res == "-":
                value = -1.0
                leaves += 1
            elif depth == 1:
                value = 0.0
                leaves += 1
            else:
                value = g * explore(nxt, res, depth - 1)
            if leaves > budget:
                raise BudgetExceeded(
                    f"more than {budget} trajectories at horizon {horizon}"
                )
            if value > best:
                best = value
        return best

    return explore(start, 0, horizon)


# --- tabular Q-learning -------------------------------------------------------


@dataclass(frozen=True)
class QHyper:
    episodes: int = 10_000
    step_size: float = 0.1
    eps_start: float = 1.0
    eps_end: float = 0.05
    seed: int = 0
    max_steps: Optional[int] = None  # global cap on environment steps


@dataclass
class QTable:
    q: dict = field(default_factory=dict)  # (state key, action idx) -> value
    visits: dict = field(default_factory=dict)
    actions: tuple = ()
    episodes: int = 0
    steps: int = 0

    def value(self, key, action: int) -> float:
        return self.q.get((key, action), 0.0)

    def best_action(self, key) -> int:
        best, best_v = 0, -math.inf
        for a in range(len(self.actions)):
            v = self.value(key, a)
            if v > best_v:
                best, best_v = a, v
        return best

    def visited(self, key, action: int) -> bool:
        return (key, action) in self.visits


def _state_key(env, st: ProductState):
    return (env.state_key(st.env_state), render(st.task))


def q_learning(env, dist: TaskDistribution, hyper: QHyper = QHyper()) -> QTable:
    """Epsilon-greedy tabular Q-learning over product episodes.

    Exploration decays linearly from ``eps_start`` to ``eps_end`` over the
    first half of the episodes. Deterministic for a given seed.
    """
    table = QTable(actions=tuple(env.actions))
    half = max(1, hyper.episodes // 2)
    alpha = hyper.step_size
    n_actions = len(table.actions)
    for episode in range(hyper.episodes):
        if hyper.max_steps is not None and table.steps >= hyper.max_steps:
            break
        rng = stream(hyper.seed, episode)
        frac = min(1.0, episode / half)
        eps = hyper.eps_start + (hyper.eps_end - hyper.eps_start) * frac
        task = simplify(dist.sample_with(rng))
        state = env.reset(rng)
        if task in (TRUE, FALSE):
            table.episodes += 1
            continue
        key = (env.state_key(state), render(task))
        for _ in range(env.timeout):
            if hyper.max_steps is not None and table.steps >= hyper.max_steps:
                break
            if rng.random() < eps:
                action = int(rng.integers(n_actions))
            else:
                action = table.best_action(key)
            label = env.label(state, table.actions[action])
            state = env.step(state, table.actions[action])
            residual = progress(label, task)
            if residual == TRUE:
                reward, terminal = 1.0, True
            elif residual == FALSE:
                reward, terminal = -1.0, True
            else:
                reward, terminal = 0.0, env.is_terminal(state)
            next_key = (env.state_key(state), render(residual))
            if terminal:
                target = reward
            else:
                target = reward + env.gamma * max(
                    table.value(next_key, a) for a in range(n_actions)
                )
            old = table.value(key, action)
            table.q[(key, action)] = old + alpha * (target - old)
            table.visits[(key, action)] = table.visits.get((key, action), 0) + 1
            table.steps += 1
            task, key = residual, next_key
            if terminal:
                break
        table.episodes += 1
    return table


# --- policies -----------------------------------------------------------------


def greedy_policy(mdp: ExplicitMDP, policy: PolicyTable) -> Callable:
    """Product policy following the greedy table; solves lazily for states
    outside the enumerated product (cannot happen when the product is
    closed over the task distribution's support)."""

    def act(st: ProductState, rng) -> object:
        idx = mdp.state_index.get(st)
        if idx is None:
            raise KeyError(f"state not in the enumerated product: {st}")
        return mdp.actions[int(policy.greedy[idx])]

    return act


def random_policy(env) -> Callable:
    actions = tuple(env.actions)

    def act(st: ProductState, rng) -> object:
        return actions[int(rng.integers(len(actions)))]

    return act


def qtable_policy(env, table: QTable) -> Callable:
    def act(st: ProductState, rng) -> object:
        return table.actions[table.best_action(_state_key(env, st))]

    return act


# --- evaluation metrics --------------------------------------------------------


@dataclass(frozen=True)
class Metrics:
    episodes: int
    success_rate: float
    failure_rate: float
    timeout_rate: float
    mean_discounted_return: float
    mean_total_reward: float
    ci90: float  # half-width for the mean total reward, normal approximation

    def to_json(self) -> str:
        payload = {"schema": "metrics/1", **self.__dict__}
        return json.dumps(payload, sort_keys=True, separators=(",", ":"))

    @staticmethod
    def csv_header() -> str:
        return (
            "env,task_dist,policy,n,success_rate,"
            "mean_discounted_return,mean_total_reward,ci90"
        )

    def csv_row(self, env_name: str, dist_name: str, policy_name: str) -> str:
        return (
            f"{env_name},{dist_name},{policy_name},{self.episodes},"
            f"{self.success_rate:.6f},{self.mean_discounted_return:.6f},"
            f"{self.mean_total_reward:.6f},{self.ci90:.6f}"
        )


def summarize(records: list[EpisodeRecord]) -> Metrics:
    n = len(records)
    if n < 1:
        raise ValueError("need at least one episode")
    outcomes = [r.outcome for r in records]
    totals = np.array([r.total_reward for r in records])
    discounted = np.array([r.discounted_return for r in records])
    spread = float(totals.std(ddof=1)) if n > 1 else 0.0
    return Metrics(
        episodes=n,
        success_rate=outcomes.count(SUCCESS) / n,
        failure_rate=outcomes.count(FAILURE) / n,
        timeout_rate=outcomes.count(TIMEOUT) / n,
        mean_discounted_return=float(discounted.mean()),
        mean_total_reward=float(totals.mean()),
        ci90=Z90 * spread / math.sqrt(n),
    )


def evaluate(
    env,
    dist: TaskDistribution,
    policy: Callable,
    episodes: int,
    rng: "np.random.Generator | int",
    timeout: Optional[int] = None,
) -> Metrics:
    """Run independent episodes and aggregate.

    Episode ``i`` draws its own child stream, so results are independent
    of execution order and can be merged associatively across workers.
    """
    if episodes < 1:
        raise ValueError("need at least one episode")
    if isinstance(rng, (int, np.integer)):
        children = [stream(int(rng), i) for i in range(episodes)]
    else:
        children = rng.spawn(episodes)
    records = [
        run_episode(env, dist, policy, child, timeout=timeout) for child in children
    ]
    return summarize(records)


# --- exact myopic-class optimum -------------------------------------------------


@dataclass(frozen=True)
class MyopicOptimum:
    """Exact optimum over effect-map-measurable policies.

    ``upper`` is the optimum over all policies that condition on the
    observation history of (environment state, effect map); ``stationary``
    is the exact value of the stationary policy extracted from it. When
    they agree (they do whenever a stationary witness attains the bound)
    the common value is the exact optimum of the stationary restricted
    class as well.
    """

    upper: Fraction
    stationary: Fraction
    policy: dict  # (state key, effect map key) -> action


def myopic_restricted_optimum(
    env, phis, weights=None, max_beliefs: int = 100_000
) -> MyopicOptimum:
    """Best expected total reward achievable while observing only the
    per-proposition effect map instead of the task formula."""
    vocab = env.vocabulary
    phis = [simplify(p) for p in phis]
    if weights is None:
        weights = [1] * len(phis)
    total_w = sum(Fraction(w) for w in weights)

    start = env.reset(stream(0))
    actions = tuple(env.actions)

    cmap_cache: dict[Formula, tuple] = {}

    def cmap(f: Formula) -> tuple:
        key = cmap_cache.get(f)
        if key is None:
            key = classification_key(f, vocab)
            cmap_cache[f] = key
        return key

    # belief: (env state, tuple of (formula, conditional weight)) where all
    # formulas share one effect map
    def make_belief(state, pairs):
        return (state, tuple(sorted(pairs, key=lambda p: render(p[0]))))

    groups: dict[tuple, list] = {}
    for phi, w in zip(phis, weights):
        groups.setdefault(cmap(phi), []).append((phi, Fraction(w) / total_w))
    roots = []  # (belief, absolute probability)
    for pairs in groups.values():
        mass = sum(w for _, w in pairs)
        belief = make_belief(start, [(f, w / mass) for f, w in pairs])
        roots.append((belief, mass))

    # enumerate reachable beliefs; transitions: (immediate reward, branches)
    transitions: dict = {}
    queue = [b for b, _ in roots]
    seen = {b for b, _ in roots}
    while queue:
        belief = queue.pop()
        state, pairs = belief
        per_action = []
        for action in actions:
            label = env.label(state, action)
            nxt = env.step(state, action)
            immediate = Fraction(0)
            branch_groups: dict[tuple, list] = {}
            for f, w in pairs:
                residual = progress(label, f)
                if residual == TRUE:
                    immediate += w
                elif residual == FALSE:
                    immediate -= w
                else:
                    branch_groups.setdefault(cmap(residual), []).append((residual, w))
            branches = []
            for bpairs in branch_groups.values():
                mass = sum(w for _, w in bpairs)
                child = make_belief(nxt, [(f, w / mass) for f, w in bpairs])
                branches.append((child, mass))
                if child not in seen:
                    if len(seen) >= max_beliefs:
                        raise StateCapExceededForBeliefs(max_beliefs)
                    seen.add(child)
                    queue.append(child)
            per_action.append((immediate, branches))
        transitions[belief] = per_action

    def belief_vi(gamma: Fraction, allowed=None) -> dict:
        # Rewards occur only on resolution and stochastic branching only on
        # task splits, so values stabilize after finitely many exact sweeps.
        values: dict = {b: Fraction(0) for b in transitions}
        for _ in range(4 * len(transitions) + 16):
            changed = False
            for belief, per_action in transitions.items():
                candidates = (
                    per_action
                    if allowed is None
                    else [per_action[a] for a in allowed[belief]]
                )
                best = max(
                    imm
                    + gamma * sum(mass * values[child] for child, mass in branches)
                    for imm, branches in candidates
                )
                if best != values[belief]:
                    values[belief] = best
                    changed = True
            if not changed:
                return values
        raise RuntimeError("belief value iteration did not stabilize")

    def q_value(belief, action, values, gamma: Fraction) -> Fraction:
        imm, branches = transitions[belief][action]
        return imm + gamma * sum(mass * values[child] for child, mass in branches)

    total_values = belief_vi(Fraction(1))
    upper = sum(mass * total_values[belief] for belief, mass in roots)

    # Extraction: with no discount, idling can tie with resolving, so first
    # restrict to total-reward-greedy actions, then break ties by an exact
    # discounted pass that strictly prefers earlier resolution.
    allowed = {
        belief: [
            a
            for a in range(len(actions))
            if q_value(belief, a, total_values, Fraction(1)) == total_values[belief]
        ]
        for belief in transitions
    }
    tie_gamma = Fraction(9, 10)
    disc_values = belief_vi(tie_gamma, allowed)

    # stationary (state, effect map) -> action; first belief reached with a
    # given observation wins
    policy: dict = {}
    for belief, per_action in transitions.items():
        state, pairs = belief
        obs = (env.state_key(state), cmap(pairs[0][0]))
        if obs in policy:
            continue
        best_a, best_v = None, None
        for a in allowed[belief]:
            v = q_value(belief, a, disc_values, tie_gamma)
            if best_v is None or v > best_v:
                best_a, best_v = a, v
        policy[obs] = best_a

    # evaluate the stationary policy exactly on each task
    stationary = Fraction(0)
    for phi, w in zip(phis, weights):
        stationary += (Fraction(w) / total_w) * _rollout_stationary(
            env, start, phi, policy, cmap, actions
        )
    return MyopicOptimum(upper=upper, stationary=stationary, policy=policy)


def _rollout_stationary(env, start, phi, policy, cmap, actions) -> Fraction:
    state, task = start, simplify(phi)
    visited = set()
    while task not in (TRUE, FALSE):
        node = (env.state_key(state), render(task))
        if node in visited:
            return Fraction(0)  # loops forever, no further reward
        visited.add(node)
        action_idx = policy.get((env.state_key(state), cmap(task)), 0)
        action = actions[action_idx]
        label = env.label(state, action)
        state = env.step(state, action)
        task = progress(label, task)
    return Fraction(1) if task == TRUE else Fraction(-1)


class StateCapExceededForBeliefs(RuntimeError):
    def __init__(self, cap: int):
        super().__init__(f"belief space exceeds {cap} states")


def myopic_policy(env, phis, weights=None) -> Callable:
    """Stationary policy over (environment state, effect map) extracted
    from the exact restricted-class optimization."""
    optimum = myopic_restricted_optimum(env, phis, weights)
    vocab = env.vocabulary
    actions = tuple(env.actions)

    def act(st: ProductState, rng) -> object:
        obs = (env.state_key(st.env_state), classification_key(st.task, vocab))
        return actions[optimum.policy.get(obs, 0)]

    return act
