"""Acceptance suite: one test per criterion, each printing a PASS line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines. Every
tolerance is pinned here; time limits are asserted per criterion.
"""

import io
import time
from contextlib import redirect_stdout
from fractions import Fraction

import numpy as np

from helpers import (
    avoidance_chain,
    enumerate_avoidance_count,
    enumerate_po_count,
)
from ltl2a.checks import progression_soundness, random_formula, random_lasso
from ltl2a.cli import dispatch
from ltl2a.envs import Bootcamp, LetterWorld, LockedRooms
from ltl2a.export import SELF_LOOP, formula_to_graph, graph_to_formula
from ltl2a.formula import Vocabulary, render, size
from ltl2a.lasso import eval_lasso
from ltl2a.parsing import parse
from ltl2a.product import enumerate_product, run_episode
from ltl2a.progression import simplify
from ltl2a.solve import (
    QHyper,
    deterministic_policy_value,
    evaluate,
    exhaustive_optimum,
    greedy_policy,
    myopic_restricted_optimum,
    q_learning,
    qtable_policy,
    value_iteration,
)
from ltl2a.streams import stream
from ltl2a.taskgen import (
    AvoidanceParams,
    ExplicitTasks,
    PartiallyOrderedParams,
    TaskDistribution,
    count_tasks,
    preset,
)

FIG_PAIR = [parse("F (B & F G)"), parse("F (B & F R)")]


class timer:
    def __init__(self, limit_s: float):
        self.limit = limit_s

    def __enter__(self):
        self.t0 = time.monotonic()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.monotonic() - self.t0
        if exc[0] is None:
            assert self.elapsed < self.limit, (
                f"took {self.elapsed:.1f}s, limit {self.limit}s"
            )
        return False


def report(n: int, detail: str, t: timer) -> None:
    print(f"\n[acceptance] criterion {n} PASS: {detail} ({t.elapsed:.1f}s)")


def test_criterion_1_progression_soundness():
    with timer(60) as t:
        rep = progression_soundness(
            10_000, seed=20_250_810, max_nodes=15,
            props=("a", "b", "c", "d", "e"),
            prefix_max=4, loop_max=3, position_max=3,
        )
        assert rep.ok, rep.failures[:3]
    report(1, f"{rep.passes}/{rep.cases} progression-vs-semantics cases", t)


def test_criterion_2_locked_rooms_exact_gap():
    with timer(30) as t:
        env = LockedRooms()
        # full-information optimum, undiscounted
        total_mdp = enumerate_product(env, FIG_PAIR, gamma=1.0)
        total_values, _ = value_iteration(total_mdp)
        expected_total = total_mdp.expected_initial(total_values.values)
        assert expected_total == 1.0

        # an executable optimal policy (discounting breaks idle ties)
        disc_mdp = enumerate_product(env, FIG_PAIR)
        _, table = value_iteration(disc_mdp)
        policy = greedy_policy(disc_mdp, table)
        outcomes = []
        for phi in FIG_PAIR:
            dist = TaskDistribution(ExplicitTasks.uniform([phi]), seed=0)
            outcomes.append(run_episode(env, dist, policy, stream(0)).outcome)
        assert outcomes == ["Success", "Success"]  # success rate 1.0, exact

        # best effect-map-restricted policy: exactly one half
        opt = myopic_restricted_optimum(env, FIG_PAIR)
        assert opt.upper == Fraction(1, 2)
        assert opt.stationary == Fraction(1, 2)
    report(2, "full policy 1.0 vs best myopic-class 0.5 (both exact)", t)


def test_criterion_3_stationary_matches_history_optimum():
    horizon = 12
    checked = 0
    with timer(300) as t:
        # every depth<=2 avoidance task over four propositions
        env = Bootcamp(["a", "b", "c", "d"])
        names = env.vocabulary.names
        from itertools import permutations

        formulas = [avoidance_chain([(p, q)]) for p, q in permutations(names, 2)]
        formulas += [
            avoidance_chain([(w, x), (y, z)])
            for w, x, y, z in permutations(names, 4)
        ]
        assert len(formulas) == 36
        tol = env.gamma**horizon + 1e-6
        for phi in formulas:
            mdp = enumerate_product(env, [phi])
            values, _ = value_iteration(mdp)
            v0 = values.values[mdp.initial[0][0]]
            ex = exhaustive_optimum(env, phi, horizon=horizon)
            assert abs(v0 - ex) <= tol, (render(phi), v0, ex)
            checked += 1

        rooms = LockedRooms()
        tol = rooms.gamma**horizon + 1e-6
        for phi in FIG_PAIR:
            mdp = enumerate_product(rooms, [phi])
            values, _ = value_iteration(mdp)
            v0 = values.values[mdp.initial[0][0]]
            ex = exhaustive_optimum(rooms, phi, horizon=horizon, budget=2 * 4**horizon)
            assert abs(v0 - ex) <= tol, (render(phi), v0, ex)
            checked += 1
    report(3, f"{checked} products: VI value = depth-{horizon} history optimum", t)


def test_criterion_4_task_space_cardinality():
    with timer(60) as t:
        avoid = count_tasks(preset("letterworld-avoid"))
        assert 5 * 10**8 <= avoid <= 5 * 10**9
        po = count_tasks(preset("letterworld-po"))
        assert po >= 10**36

        # enumeration agreement wherever enumeration is feasible
        small = [
            PartiallyOrderedParams(1, 2, 1, 2, 0.5, Vocabulary(["a", "b", "c"])),
            PartiallyOrderedParams(1, 2, 1, 2, 0.25, Vocabulary(["a", "b", "c", "d"])),
            PartiallyOrderedParams(1, 1, 1, 3, 1.0, Vocabulary(["a", "b", "c"])),
        ]
        for params in small:
            expected = enumerate_po_count(params)
            assert expected <= 100_000 and count_tasks(params) == expected
        small_avoid = [
            AvoidanceParams(1, 1, 1, 1, Vocabulary(["a", "b", "c", "d"])),
            AvoidanceParams(1, 2, 1, 1, Vocabulary(["a", "b", "c", "d", "e"])),
            AvoidanceParams(1, 2, 1, 2, Vocabulary(list("abcdefgh"))),
        ]
        for params in small_avoid:
            expected = enumerate_avoidance_count(params)
            assert expected <= 100_000 and count_tasks(params) == expected
    report(
        4,
        "avoidance count "
        f"{avoid} in [5e8, 5e9]; partially-ordered count {po} >= 1e36 "
        "(convention: unordered conjunct sets, unordered distinct disjunct pairs); "
        "enumeration agreement on 6 small spaces",
        t,
    )


def test_criterion_5_bootcamp_golden_values():
    with timer(120) as t:
        env = Bootcamp(["a", "b"])
        phi = parse("F (a & F b)")
        mdp = enumerate_product(env, [phi])
        values, _ = value_iteration(mdp)
        assert values.values[mdp.initial[0][0]] == 0.9

        dist = TaskDistribution(ExplicitTasks.uniform([phi]), seed=2)
        table = q_learning(env, dist, QHyper(episodes=10_000, seed=3))
        greedy = np.zeros(mdp.n_states, dtype=int)
        for i, st in enumerate(mdp.states):
            if not mdp.terminal[i]:
                key = (env.state_key(st.env_state), render(st.task))
                greedy[i] = table.best_action(key)
        learned = deterministic_policy_value(mdp, greedy, mdp.initial[0][0])
        assert learned == 0.9
    report(5, "optimal return 0.9 exact, matched by the learned greedy policy", t)


def test_criterion_6_letterworld_tabular_learning():
    with timer(600) as t:
        letters = ["a", "b", "c", "d"]
        env = LetterWorld(letters=letters, placement_seed=5)
        dist = TaskDistribution(
            AvoidanceParams(1, 1, 1, 1, Vocabulary(letters)), seed=8
        )
        table = q_learning(
            env, dist, QHyper(episodes=1_000_000, seed=4, max_steps=200_000)
        )
        assert table.steps <= 200_000
        policy = qtable_policy(env, table)
        metrics = evaluate(env, dist, policy, 1_000, rng=99)
        assert metrics.success_rate >= 0.95
    report(
        6,
        f"greedy success {metrics.success_rate:.3f} after {table.steps} "
        "training steps",
        t,
    )


def test_criterion_7_graph_export_structure():
    with timer(60) as t:
        reference = parse("! r U (j & (! p U k))")
        g = formula_to_graph(reference, Vocabulary(["r", "j", "p", "k"]))
        assert g.n_nodes == 9 and len(g.tree_edges()) == 8

        vocab = Vocabulary(["a", "b", "c", "d", "e"])
        for case in range(10_000):
            f = random_formula(stream(404, case), 16)
            graph = formula_to_graph(f, vocab)
            n = graph.n_nodes
            assert sum(1 for e in graph.edges if e[1] == SELF_LOOP) == n
            assert len(graph.tree_edges()) == n - 1
            assert graph_to_formula(graph) == f
    report(7, "10000 graphs: structure and exact reconstruction", t)


def test_criterion_8_simplifier_soundness():
    with timer(300) as t:
        changed = 0
        for case in range(2_000):
            rng = stream(505, case)
            f = random_formula(rng, 20)
            s = simplify(f)
            assert simplify(s) == s  # idempotent
            assert size(s) <= size(f)
            if s == f:
                continue  # structurally identical, nothing to compare
            changed += 1
            for _ in range(500):
                tr = random_lasso(rng)
                i = int(rng.integers(0, 4))
                assert eval_lasso(tr, i, f) == eval_lasso(tr, i, s), (
                    render(f),
                    render(s),
                )
        assert changed > 500  # the rewrite system must actually fire
    report(8, f"2000 formulas ({changed} rewritten) x 500 lassos, 0 disagreements", t)


def test_criterion_9_cli_determinism():
    commands = [
        ["sample", "--preset", "letterworld-po", "-n", "5", "--seed", "11", "--json"],
        ["progress", "--formula", "F (R & F G)", "R", "--json"],
        ["check", "--cases", "200", "--seed", "7", "--json"],
        ["count", "--preset", "letterworld-avoid", "--json"],
        ["count", "--preset", "letterworld-po", "--json"],
        [
            "solve", "--env", "lockedrooms",
            "--tasks", "explicit:F (B & F G);F (B & F R)",
            "--episodes", "10", "--seed", "3", "--json",
        ],
        [
            "run", "--env", "lockedrooms",
            "--tasks", "explicit:F (B & F G);F (B & F R)",
            "--policy", "optimal", "--episodes", "4", "--seed", "5", "--json",
        ],
        [
            "run", "--env", "bootcamp", "--tasks", "explicit:F (a & F b)",
            "--policy", "qlearn", "--train-episodes", "200",
            "--episodes", "3", "--seed", "6", "--json",
        ],
        [
            "eval", "--env", "letterworld", "--preset", "letterworld-avoid",
            "--policy", "random", "--episodes", "25", "--seed", "13", "--json",
        ],
        [
            "export", "--what", "graph", "--formula", "! r U (j & (! p U k))",
            "--features", "random", "--seed", "2",
        ],
        ["export", "--what", "observation", "--env", "letterworld", "--seed", "4"],
    ]
    with timer(120) as t:
        for argv in commands:
            outputs = []
            for _ in range(2):
                buffer = io.StringIO()
                with redirect_stdout(buffer):
                    code = dispatch(list(argv))
                assert code == 0, argv
                outputs.append(buffer.getvalue())
            assert outputs[0] == outputs[1], argv
    report(9, f"{len(commands)} CLI commands byte-identical across two runs", t)
