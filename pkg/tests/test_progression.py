import pytest

from ltl2a.checks import random_formula, random_lasso
from ltl2a.formula import FALSE, TRUE, Eventually, Prop, render, size
from ltl2a.lasso import eval_lasso
from ltl2a.parsing import parse
from ltl2a.progression import (
    ClosureCapExceeded,
    closure,
    implies_syntactic,
    progress,
    simplify,
)
from ltl2a.streams import stream


def test_progress_worked_examples():
    # reach-then-reach collapses to the tail once the head holds
    assert progress({"R"}, parse("F (R & F G)")) == parse("F G")
    # nothing happens, nothing changes
    assert progress(set(), parse("F R")) == parse("F R")
    # safety violation resolves to false immediately
    assert progress({"B"}, parse("G ! B")) == FALSE
    # the until goal resolves the whole chain
    assert progress({"b"}, parse("! a U b")) == TRUE


def test_progress_keeps_constants_fixed():
    for sigma in (set(), {"a"}, {"a", "b"}):
        assert progress(sigma, TRUE) == TRUE
        assert progress(sigma, FALSE) == FALSE


def test_progress_next_strips_one_level():
    assert progress(set(), parse("X (a & b)")) == parse("a & b")
    assert progress({"a"}, parse("X a")) == Prop("a")


def test_simplify_examples():
    assert simplify(parse("F G1 | F (R & F G1)")) == parse("F G1")
    assert simplify(parse("(! a U b) & true")) == parse("! a U b")
    assert simplify(parse("(! a U b) | false")) == parse("! a U b")
    assert simplify(parse("! ! a")) == Prop("a")
    assert simplify(parse("F F a")) == parse("F a")
    assert simplify(parse("G G a")) == parse("G a")
    assert simplify(parse("a & a & b")) == parse("a & b")
    assert simplify(parse("false U a")) == Prop("a")
    assert simplify(parse("true U a")) == parse("F a")


def test_simplify_sound_idempotent_nonincreasing():
    for case in range(2_000):
        rng = stream(55, case)
        f = random_formula(rng, 20)
        s = simplify(f)
        assert simplify(s) == s
        assert size(s) <= size(f)
        for _ in range(25):
            tr = random_lasso(rng)
            i = int(rng.integers(0, 4))
            assert eval_lasso(tr, i, f) == eval_lasso(tr, i, s), (render(f), render(s))


def test_implies_examples():
    assert implies_syntactic(parse("F (R & F G1)"), parse("F G1"))
    f = parse("! a U b")
    assert implies_syntactic(f, f)
    assert not implies_syntactic(parse("F G1"), parse("F (R & F G1)"))
    assert implies_syntactic(FALSE, parse("a"))
    assert implies_syntactic(parse("a"), TRUE)
    assert implies_syntactic(parse("a & b"), parse("b"))
    assert implies_syntactic(parse("a"), parse("a | b"))
    assert implies_syntactic(parse("a | b"), parse("b | a"))
    assert implies_syntactic(parse("a"), parse("F a"))
    assert implies_syntactic(parse("G a"), parse("a"))
    assert implies_syntactic(parse("b U a"), parse("F a"))


def test_implies_is_sound_on_samples():
    positives = 0
    for case in range(3_000):
        rng = stream(56, case)
        f = random_formula(rng, 10)
        g = random_formula(rng, 10)
        if not implies_syntactic(f, g):
            continue
        positives += 1
        for _ in range(40):
            tr = random_lasso(rng)
            i = int(rng.integers(0, 3))
            assert not (eval_lasso(tr, i, f) and not eval_lasso(tr, i, g)), (
                render(f),
                render(g),
            )
    assert positives > 100  # the check must actually fire sometimes


def test_closure_examples():
    R = Prop("R")
    assert closure({Eventually(R)}, [set(), {"R"}], cap=10) == frozenset(
        {Eventually(R), TRUE}
    )
    assert closure({TRUE}, [set(), {"R"}], cap=1) == frozenset({TRUE})
    with pytest.raises(ClosureCapExceeded):
        closure({parse("F (a & F b)")}, [{"a"}, {"b"}], cap=2)
    # same set one cap higher: the three-element closure fits; members are
    # stored simplify-normalized
    got = closure({parse("F (a & F b)")}, [{"a"}, {"b"}], cap=3)
    assert got == frozenset({simplify(parse("F (a & F b)")), parse("F b"), TRUE})


def test_closure_is_closed_under_progression():
    for case in range(100):
        rng = stream(57, case)
        f = random_formula(rng, 9, props=("a", "b"))
        sigmas = [frozenset(), frozenset({"a"}), frozenset({"b"})]
        got = closure({f}, sigmas, cap=3_000)
        for g in got:
            for sigma in sigmas:
                assert progress(sigma, g) in got
