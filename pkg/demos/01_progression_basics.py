"""Formulas, progression, and the trace-semantics oracle.

Walks through the core loop: parse a temporal task, progress it one
assignment at a time, and cross-check progression against direct
evaluation on ultimately periodic traces.
"""

from ltl2a import (
    LassoTrace,
    closure,
    eval_lasso,
    parse,
    progress,
    props_of,
    render,
    simplify,
)

task = parse("F (R & F G)")  # reach red, then reach green
print("task:           ", render(task))
print("prefix notation:", render(task, "prefix"))
print("propositions:   ", sorted(props_of(task)))

print("\n-- progression --")
residual = task
for step, seen in enumerate([set(), {"R"}, {"B"}, {"G"}]):
    residual = progress(seen, residual)
    print(f"after step {step} with {sorted(seen) or '{}'}: {render(residual)}")

print("\n-- safety tasks fail fast --")
safety = parse("G ! B")
print(f"{render(safety)} after seeing B:", render(progress({'B'}, safety)))

print("\n-- the trace oracle agrees --")
trace = LassoTrace(
    prefix=[set(), {"R"}, {"B"}, {"G"}],
    loop=[set()],
)
print("trace satisfies task:", eval_lasso(trace, 0, task))
print("trace satisfies safety:", eval_lasso(trace, 0, safety))

# progression soundness, by hand on this trace: evaluating at position i
# equals progressing by position i and evaluating the rest
for i in range(3):
    direct = eval_lasso(trace, i, task)
    stepped = eval_lasso(trace.drop(i), i, progress(trace.at(i), task))
    print(f"position {i}: direct={direct} progressed={stepped}")

print("\n-- progression closure --")
members = closure({task}, [set(), {"R"}, {"G"}, {"B"}], cap=20)
for f in sorted(members, key=render):
    print("  ", render(f))

print("\n-- simplification --")
messy = parse("F G1 | F (R & F G1)")
print(f"{render(messy)}  ->  {render(simplify(messy))}")
