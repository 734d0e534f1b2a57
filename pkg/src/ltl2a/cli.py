"""Command-line surface: sample, progress, check, count, solve, run, eval,
export.

Every subcommand is deterministic given ``--seed`` (fallback: the
``LTL2A_SEED`` environment variable, then 0); machine output is sorted,
compact JSON so identical runs are byte-identical. Exit codes: 0 success,
1 domain error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from .checks import progression_soundness
from .envs import load_env
from .export import (
    OneHot,
    RandomFixed,
    formula_to_graph,
    grid_observation,
    serialize,
)
from .formula import Vocabulary, props_of, render
from .parsing import ParseError, parse
from .product import ProductState, enumerate_product, run_episode
from .progression import progress
from .solve import (
    evaluate,
    greedy_policy,
    myopic_policy,
    q_learning,
    qtable_policy,
    QHyper,
    random_policy,
    summarize,
    value_iteration,
)
from .streams import DEFAULT_SEED, stream
from .taskgen import (
    ExplicitTasks,
    TaskDistribution,
    count_tasks,
    load_task_params,
    preset,
    PRESETS,
)

__all__ = ["main", "dispatch"]


def _env_seed_default() -> int:
    raw = os.environ.get("LTL2A_SEED")
    if raw is None:
        return DEFAULT_SEED
    return int(raw)


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text + ("" if text.endswith("\n") else "\n"))
    else:
        print(text)


def _task_distribution(args) -> TaskDistribution:
    if getattr(args, "preset", None) and getattr(args, "tasks", None):
        raise ValueError("give either --preset or --tasks, not both")
    name = getattr(args, "preset", None)
    if name:
        return preset(name, args.seed)
    source = getattr(args, "tasks", None)
    if source is None:
        raise ValueError("a task space is required (--preset or --tasks)")
    if source in PRESETS:
        return preset(source, args.seed)
    if source.startswith("explicit:"):
        formulas = [parse(t.strip()) for t in source[len("explicit:"):].split(";")]
        return TaskDistribution(ExplicitTasks.uniform(formulas), args.seed)
    return TaskDistribution(load_task_params(source), args.seed)


def _load_env(args):
    placement = getattr(args, "placement_seed", None)
    if placement is None and getattr(args, "env", "") == "letterworld":
        placement = args.seed
    env = load_env(args.env, placement_seed=placement)
    gamma = getattr(args, "gamma_override", None)
    if gamma is not None:
        env.gamma = float(gamma)
    return env


def _policy(args, env, dist):
    name = args.policy
    if name == "random":
        return random_policy(env)
    if name == "optimal":
        return _lazy_optimal_policy(env)
    if name == "myopic-optimal":
        if not isinstance(dist.kind, ExplicitTasks):
            raise ValueError(
                "myopic-optimal needs an explicit task list "
                "(the restricted optimization enumerates the support)"
            )
        return myopic_policy(env, dist.kind.formulas, dist.kind.weights)
    if name == "qlearn":
        hyper = QHyper(episodes=args.train_episodes, seed=args.seed)
        table = q_learning(env, dist, hyper)
        return qtable_policy(env, table)
    raise ValueError(f"unknown policy {name!r}")


def _lazy_optimal_policy(env):
    """Greedy product policy, solving each initial task's product once."""
    action_of: dict[ProductState, object] = {}

    def act(st: ProductState, rng):
        cached = action_of.get(st)
        if cached is None:
            mdp = enumerate_product(env, [st.task])
            _, table = value_iteration(mdp)
            for i, state in enumerate(mdp.states):
                if not mdp.terminal[i]:
                    action_of.setdefault(state, mdp.actions[int(table.greedy[i])])
            cached = action_of[st]
        return cached

    return act


# --- subcommands ----------------------------------------------------------------


def _cmd_sample(args) -> int:
    dist = _task_distribution(args)
    formulas = [dist.sample(i) for i in range(args.n)]
    if args.json:
        payload = {
            "schema": "samples/1",
            "seed": args.seed,
            "formulas": [render(f) for f in formulas],
        }
        _emit(json.dumps(payload, sort_keys=True, separators=(",", ":")), args.out)
    else:
        _emit("\n".join(render(f) for f in formulas), args.out)
    return 0


def _parse_assignment(text: str) -> frozenset:
    text = text.strip()
    if text in ("", "."):
        return frozenset()
    return frozenset(p for p in text.replace(",", " ").split() if p)


def _cmd_progress(args) -> int:
    f = parse(args.formula)
    lines = args.assignments if args.assignments else sys.stdin.read().splitlines()
    steps = []
    for line in lines:
        sigma = _parse_assignment(line)
        f = progress(sigma, f)
        steps.append({"assignment": sorted(sigma), "residual": render(f)})
    if args.json:
        payload = {"schema": "progress/1", "formula": args.formula, "steps": steps}
        _emit(json.dumps(payload, sort_keys=True, separators=(",", ":")), args.out)
    else:
        _emit("\n".join(s["residual"] for s in steps), args.out)
    return 0


def _cmd_check(args) -> int:
    report = progression_soundness(args.cases, args.seed)
    if args.json:
        payload = {
            "schema": "check/1",
            "cases": report.cases,
            "passes": report.passes,
            "failures": report.failures,
        }
        _emit(json.dumps(payload, sort_keys=True, separators=(",", ":")), args.out)
    else:
        _emit(f"{report.passes}/{report.cases} pass", args.out)
    return 0 if report.ok else 1


def _cmd_count(args) -> int:
    dist = _task_distribution(args)
    value = count_tasks(dist)
    convention = (
        "unordered conjunct sets without repetition; "
        "disjunction terms are unordered pairs of distinct propositions"
    )
    if args.json:
        payload = {"schema": "count/1", "count": value, "convention": convention}
        _emit(json.dumps(payload, sort_keys=True, separators=(",", ":")), args.out)
    else:
        _emit(f"{value}\n# convention: {convention}", args.out)
    return 0


def _cmd_solve(args) -> int:
    env = _load_env(args)
    dist = _task_distribution(args)
    if not isinstance(dist.kind, ExplicitTasks):
        raise ValueError("solve needs an explicit task list (the product is enumerated)")
    mdp = enumerate_product(
        env, list(dist.kind.formulas), weights=list(dist.kind.weights)
    )
    values, table = value_iteration(mdp)
    expected = mdp.expected_initial(values.values)
    pol = greedy_policy(mdp, table)
    metrics = evaluate(env, dist, pol, args.episodes, rng=args.seed,
                       timeout=args.timeout)
    if args.json:
        payload = {
            "schema": "solve/1",
            "env": args.env,
            "gamma": mdp.gamma,
            "n_states": mdp.n_states,
            "expected_initial_value": expected,
            "greedy_metrics": json.loads(metrics.to_json()),
            "states": [
                {
                    "id": i,
                    "env_state": env.state_json(st.env_state),
                    "task": render(st.task),
                    "value": float(values.values[i]),
                    "action": (
                        None if mdp.terminal[i] else mdp.actions[int(table.greedy[i])]
                    ),
                }
                for i, st in enumerate(mdp.states)
            ],
        }
        _emit(json.dumps(payload, sort_keys=True, separators=(",", ":")), args.out)
    else:
        _emit(
            f"states: {mdp.n_states}\n"
            f"expected initial value: {expected}\n"
            f"greedy success rate over {args.episodes} episodes: "
            f"{metrics.success_rate}",
            args.out,
        )
    return 0


def _cmd_run(args) -> int:
    env = _load_env(args)
    dist = _task_distribution(args)
    policy = _policy(args, env, dist)
    records = [
        run_episode(env, dist, policy, stream(args.seed, i), timeout=args.timeout)
        for i in range(args.episodes)
    ]
    if args.json:
        body = ",".join(r.to_json(env) for r in records)
        _emit(f'{{"schema":"episodes/1","episodes":[{body}]}}', args.out)
    else:
        lines = [
            f"{i}: {r.outcome} total={r.total_reward:g} "
            f"discounted={r.discounted_return:.6f} task={render(r.initial_task)}"
            for i, r in enumerate(records)
        ]
        _emit("\n".join(lines), args.out)
    return 0


def _cmd_eval(args) -> int:
    env = _load_env(args)
    dist = _task_distribution(args)
    policy = _policy(args, env, dist)
    metrics = evaluate(env, dist, policy, args.episodes, rng=args.seed,
                       timeout=args.timeout)
    dist_name = args.preset or args.tasks or "?"
    if args.json:
        _emit(metrics.to_json(), args.out)
    else:
        _emit(
            metrics.csv_header() + "\n"
            + metrics.csv_row(args.env, dist_name, args.policy),
            args.out,
        )
    return 0


def _cmd_export(args) -> int:
    if args.what in ("graph", "prefix"):
        if not args.formula:
            raise ValueError("export graph/prefix needs --formula")
        f = parse(args.formula)
        vocab = Vocabulary(args.vocab.split(",")) if args.vocab else (
            Vocabulary(sorted(props_of(f)))
        )
        if args.what == "prefix":
            _emit(serialize(f), args.out)
        else:
            mode = (
                RandomFixed(dim=args.dim, seed=args.seed)
                if args.features == "random"
                else OneHot()
            )
            _emit(serialize(formula_to_graph(f, vocab, mode)), args.out)
        return 0
    if args.what == "observation":
        env = _load_env(args)
        if env.kind != "letterworld":
            raise ValueError("observation export is defined for letterworld")
        state = env.reset(stream(args.seed))
        _emit(serialize(grid_observation(env, state, egocentric=args.egocentric)),
              args.out)
        return 0
    raise ValueError(f"unknown export {args.what!r}")


# --- argument parsing --------------------------------------------------------------


def _add_common(p, env=False, tasks=False, episodes=None):
    p.add_argument("--seed", type=int, default=None, help="RNG seed "
                   "(default: $LTL2A_SEED or 0)")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.add_argument("--out", help="write output to this path instead of stdout")
    if env:
        p.add_argument("--env", default="lockedrooms",
                       help="environment preset or JSON config path")
        p.add_argument("--placement-seed", dest="placement_seed", type=int,
                       default=None, help="pin the letterworld layout")
        p.add_argument("--gamma-override", dest="gamma_override", type=float,
                       default=None)
        p.add_argument("--timeout", type=int, default=None,
                       help="episode step limit override")
    if tasks:
        p.add_argument("--preset", choices=sorted(PRESETS), default=None)
        p.add_argument("--tasks", default=None,
                       help="preset name, params JSON path, or 'explicit:f1;f2'")
    if episodes is not None:
        p.add_argument("--episodes", type=int, default=episodes)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ltl2a",
        description="LTL task engine: sampling, progression, products, solvers, exports",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="sample task formulas")
    _add_common(p, tasks=True)
    p.add_argument("-n", type=int, default=10, help="number of formulas")
    p.set_defaults(fn=_cmd_sample)

    p = sub.add_parser("progress", help="progress a formula through assignments")
    _add_common(p)
    p.add_argument("--formula", required=True)
    p.add_argument("assignments", nargs="*",
                   help="assignments like 'R' or 'a,b'; '.' for empty; "
                        "stdin lines when omitted")
    p.set_defaults(fn=_cmd_progress)

    p = sub.add_parser("check", help="progression-vs-semantics property run")
    _add_common(p)
    p.add_argument("--cases", type=int, default=10_000)
    p.add_argument("--workers", type=int, default=1,
                   help="accepted for compatibility; results are order-independent")
    p.set_defaults(fn=_cmd_check)

    p = sub.add_parser("count", help="exact task-space cardinality")
    _add_common(p, tasks=True)
    p.set_defaults(fn=_cmd_count)

    p = sub.add_parser("solve", help="value iteration on an explicit product")
    _add_common(p, env=True, tasks=True, episodes=100)
    p.set_defaults(fn=_cmd_solve)

    p = sub.add_parser("run", help="roll out episodes under a named policy")
    _add_common(p, env=True, tasks=True, episodes=5)
    p.add_argument("--policy", default="optimal",
                   choices=["optimal", "myopic-optimal", "random", "qlearn"])
    p.add_argument("--train-episodes", type=int, default=5000,
                   help="qlearn training episodes")
    p.set_defaults(fn=_cmd_run)

    p = sub.add_parser("eval", help="aggregate metrics over episodes")
    _add_common(p, env=True, tasks=True, episodes=100)
    p.add_argument("--policy", default="optimal",
                   choices=["optimal", "myopic-optimal", "random", "qlearn"])
    p.add_argument("--train-episodes", type=int, default=5000)
    p.add_argument("--workers", type=int, default=1,
                   help="accepted for compatibility; results are order-independent")
    p.set_defaults(fn=_cmd_eval)

    p = sub.add_parser("export", help="emit graph/prefix/observation JSON")
    _add_common(p, env=True)
    p.add_argument("--what", required=True, choices=["graph", "prefix", "observation"])
    p.add_argument("--formula", default=None)
    p.add_argument("--vocab", default=None,
                   help="comma-separated proposition order for features")
    p.add_argument("--features", default="onehot", choices=["onehot", "random"])
    p.add_argument("--dim", type=int, default=3)
    p.add_argument("--egocentric", action="store_true")
    p.set_defaults(fn=_cmd_export)

    return parser


def dispatch(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(args, "seed", None) is None:
        args.seed = _env_seed_default()
    if getattr(args, "workers", 1) < 1:
        print("error: --workers must be >= 1", file=sys.stderr)
        return 2
    try:
        return args.fn(args)
    except (ValueError, TypeError, KeyError, RuntimeError, OSError, ParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main(argv=None) -> int:
    return dispatch(argv)


if __name__ == "__main__":
    raise SystemExit(main())
