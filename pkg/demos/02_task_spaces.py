"""The two procedural task grammars: sampling, exact counting, sizes.

Samples both families at training-scale parameters, prints the exact
cardinality of each space under the documented convention, and reports
the largest formula (in AST nodes) seen over many draws. Pass a number
to change the size-report sample count (default 1,000,000; that pass
takes about a minute).
"""

import sys

from ltl2a.formula import render, size
from ltl2a.taskgen import PRESETS, TaskDistribution, count_tasks, preset

n_report = int(sys.argv[1]) if len(sys.argv) > 1 else 1_000_000

print("-- sampling --")
po = preset("letterworld-po", seed=7)
avoid = preset("letterworld-avoid", seed=7)
for i in range(3):
    print("partially-ordered:", render(po.sample(i)))
for i in range(3):
    print("avoidance:        ", render(avoid.sample(i)))

print("\n-- exact counts (unordered conjunct sets, unordered disjunct pairs) --")
for name in ("letterworld-avoid", "letterworld-po", "zoneenv-avoid"):
    print(f"{name}: {count_tasks(preset(name))}")

print("\n-- formula sizes --")
for name in ("letterworld-po", "letterworld-avoid"):
    dist = preset(name, seed=1)
    biggest = max(size(dist.sample(i)) for i in range(n_report))
    print(f"max AST nodes over {n_report} draws of {name}: {biggest}")

for name in ("upgen-depth-po", "upgen-conjuncts-po", "upgen-depth", "upgen-conjuncts"):
    dist = TaskDistribution(PRESETS[name], seed=1)
    biggest = max(size(dist.sample(i)) for i in range(min(n_report, 20_000)))
    print(f"max AST nodes ({name}): {biggest}")
