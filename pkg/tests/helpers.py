"""Independent oracles shared by the tests.

These deliberately avoid the library's counting/solver code paths: counts
come from explicit enumeration, witnesses from the grammar structure.
"""

from itertools import combinations, permutations, product

from ltl2a.formula import And, Eventually, Formula, Not, Or, Prop, Until, render
from ltl2a.lasso import LassoTrace


def po_sequences(params) -> list[Formula]:
    """Every distinct F-sequence in the partially-ordered grammar."""
    names = params.vocabulary.names
    terms: list[Formula] = []
    if params.disjunction_prob < 1.0:
        terms += [Prop(n) for n in names]
    if params.disjunction_prob > 0.0:
        terms += [Or(Prop(a), Prop(b)) for a, b in combinations(names, 2)]
    seqs = []
    for depth in range(params.depth_min, params.depth_max + 1):
        for combo in product(terms, repeat=depth):
            seq = Eventually(combo[-1])
            for term in reversed(combo[:-1]):
                seq = Eventually(And(term, seq))
            seqs.append(seq)
    return seqs


def enumerate_po_count(params) -> int:
    """Number of distinct partially-ordered tasks, by explicit enumeration."""
    seqs = sorted(render(s) for s in po_sequences(params))
    assert len(set(seqs)) == len(seqs), "sequences must render distinctly"
    total = 0
    for k in range(params.conjuncts_min, params.conjuncts_max + 1):
        tasks = set()
        for combo in combinations(seqs, k):
            tasks.add(tuple(sorted(combo)))
        total += len(tasks)
    return total


def avoidance_chain(pairs) -> Formula:
    """Build the until-chain for consecutive (avoid, reach) pairs."""
    avoid, reach = pairs[-1]
    seq: Formula = Until(Not(Prop(avoid)), Prop(reach))
    for avoid, reach in reversed(pairs[:-1]):
        seq = Until(Not(Prop(avoid)), And(Prop(reach), seq))
    return seq


def enumerate_avoidance_count(params) -> int:
    """Number of distinct avoidance tasks, by explicit enumeration."""
    names = params.vocabulary.names
    total = 0
    for k in range(params.conjuncts_min, params.conjuncts_max + 1):
        tasks = set()
        depth_range = range(params.depth_min, params.depth_max + 1)
        for profile in product(depth_range, repeat=k):
            slots = 2 * sum(profile)
            if slots > len(names):
                continue
            for perm in permutations(names, slots):
                chains = []
                at = 0
                for depth in profile:
                    pairs = [
                        (perm[at + 2 * j], perm[at + 2 * j + 1]) for j in range(depth)
                    ]
                    at += 2 * depth
                    chains.append(render(avoidance_chain(pairs)))
                tasks.add(tuple(sorted(chains)))
        total += len(tasks)
    return total


def avoidance_reach_sequence(f: Formula) -> list[str]:
    """The reach propositions of every chain, in chain order."""
    out = []

    def chains(g: Formula):
        if isinstance(g, And) and isinstance(g.left, Until):
            yield g.left
            yield from chains(g.right)
        else:
            yield g

    def walk(chain: Formula):
        body = chain.right
        if isinstance(body, Prop):
            out.append(body.name)
        else:  # And(reach, rest)
            out.append(body.left.name)
            walk(body.right)

    for chain in chains(f):
        walk(chain)
    return out


def avoidance_witness(f: Formula) -> LassoTrace:
    """Greedy satisfying trace: hit each chain's reach props in order.

    Works because no proposition repeats anywhere in an avoidance formula,
    so satisfying one chain never trips another chain's avoid head.
    """
    prefix = tuple(frozenset({name}) for name in avoidance_reach_sequence(f))
    return LassoTrace(prefix, (frozenset(),))
