import random

import pytest
from hypothesis import given, strategies as st

from storepass.corpus import get
from storepass.eval import (
    DEEP, SHALLOW, Failed, Fuel, LocV, Oracle, OutOfFuel, RandomOracle, Stuck,
    Uncaught, Val, eval_alg, eval_exn, eval_ref_smallstep, eval_source, eval_sym,
    eval_target, evaluate, same_outcome,
)
from storepass.reach import explore, gen_well_typed
from storepass.syntax import Calculus, parse_source, parse_term
from storepass.syntax.ast import Const, Let
from storepass.syntax.ops import free_vars

from strategies import terms


def closed(t):
    for x in sorted(free_vars(t)):
        t = Let(x, Const(True), t)
    return t


def run(src, calculus=Calculus.CORE, **kw):
    p = parse_source(src, calculus)
    return evaluate(p.term, {Calculus.CORE: "target", Calculus.REFL: "refl",
                             Calculus.REF: "ref", Calculus.EXN: "exn",
                             Calculus.SYM: "sym"}[calculus], **kw)


# big-step evaluators

@pytest.mark.parametrize("src,value", [
    ("let x = true in not x", False),
    ("(true, false).2", False),
    ("let (a, b) = (true, false) in a && b", False),
    ("let f = fun x -> not x in f true", False),
    ("let rec f x = if x then f false else true in f true", True),
    ("if true then () else fail", ()),
])
def test_target_values(src, value):
    out = run(src)
    assert isinstance(out, Val)
    assert (out.value == value) if value != () else str(out) == "()"


def test_fail_and_fuel_are_distinct_outcomes():
    assert isinstance(run("fail"), Failed)
    assert isinstance(run("let rec f x = f x in f ()", fuel=1000), OutOfFuel)
    assert isinstance(run("if () then true else false"), Stuck)


def test_choice_consumes_the_oracle():
    t = parse_term("let a = * in let b = * in a && not b")
    o = Oracle([True, False])
    assert eval_target(t, oracle=o).value is True
    assert o.taken == [True, False]
    o = Oracle([], limit=1)
    assert eval_target(t, oracle=o) == OutOfFuel("choices")


def test_reference_semantics_track_ownership():
    src = "let x = ref true in let y = x in (y := false; !x)"
    assert isinstance(run(src, Calculus.REFL), Stuck)
    assert run(src, Calculus.REF).value is False


def test_heap_and_environment_are_returned():
    p = parse_source("let x = ref true in x := false; x")
    out = eval_source(p.term)
    loc = out.value
    assert isinstance(loc, LocV) and out.heap[loc] is False


@given(terms(Calculus.REFL).map(closed), st.lists(st.booleans(), max_size=4))
def test_evaluation_is_deterministic(t, choices):
    a = eval_source(t, fuel=3000, oracle=Oracle(choices), ownership=False)
    b = eval_source(t, fuel=3000, oracle=Oracle(choices), ownership=False)
    assert same_outcome(a, b)


@given(terms(Calculus.CORE).map(closed), st.integers(1, 400), st.integers(0, 400),
       st.lists(st.booleans(), max_size=4))
def test_fuel_monotonicity(t, fuel, more, choices):
    f = Fuel(fuel)
    small = eval_target(t, fuel=f, oracle=Oracle(choices))
    large = eval_target(t, fuel=fuel + more, oracle=Oracle(choices))
    if isinstance(small, OutOfFuel):
        return
    assert same_outcome(small, large)
    g = Fuel(fuel + more)
    eval_target(t, fuel=g, oracle=Oracle(choices))
    assert g.used == f.used


@given(terms(Calculus.REF).map(closed), st.lists(st.booleans(), max_size=4))
def test_small_step_agrees_with_big_step_on_references(t, choices):
    big = eval_source(t, fuel=4000, oracle=Oracle(choices), ownership=False)
    small = eval_ref_smallstep(t, fuel=20000, oracle=Oracle(choices))
    if isinstance(big, OutOfFuel) or isinstance(small, OutOfFuel):
        return
    if isinstance(big, Stuck):
        assert isinstance(small, Stuck)
    else:
        assert same_outcome(big, small), (big, small)


def test_checked_programs_never_get_stuck(config):
    for seed in range(200):
        t = gen_well_typed(seed, config["generated_size"])
        for p in explore(lambda o, f: eval_source(t, fuel=f, oracle=o), (False, True),
                         config["default_fuel"], config["max_choices"]):
            assert not isinstance(p.outcome, Stuck), (seed, p.outcome)


def test_random_oracle_is_reproducible():
    t = parse_term("let a = * in let b = * in let c = * in (a, b, c)")
    runs = [eval_target(t, oracle=RandomOracle(random.Random(7))).value for _ in range(2)]
    assert runs[0] == runs[1]


# control effects

def test_handler_example_deep_and_shallow():
    p = get("handler_not").program()
    assert eval_alg(p.term, DEEP).value is False
    assert eval_alg(p.term, SHALLOW).value is False


def test_deep_and_shallow_differ_on_a_second_effect():
    src = ("effect a : unit -> bool; handle (let u = a((); fun z -> z) in a((); fun z -> z)) "
           "with { return x -> x, a(x; k) -> k true }")
    p = parse_source(src, Calculus.ALGEFF)
    assert eval_alg(p.term, DEEP).value is True
    shallow = eval_alg(p.term, SHALLOW)
    assert isinstance(shallow, Stuck) and "unhandled" in shallow.reason


def test_continuation_can_be_resumed_twice():
    events = []
    p = get("handler_not").program()
    eval_alg(p.term, DEEP, trace=events.append)
    assert [e.rule for e in events].count("resume") == 2


def test_exceptions():
    p = parse_source("try[bool] (let x = raise[bool] true in fail) with y -> not y", Calculus.EXN)
    assert eval_exn(p.term).value is False
    p = parse_source("raise[bool] true", Calculus.EXN)
    out = eval_exn(p.term)
    assert isinstance(out, Uncaught) and out.value is True


def test_symbols_are_fresh():
    p = parse_source("let a = gensym in let b = gensym in (a == b, a == a)", Calculus.SYM)
    assert eval_sym(p.term).value.items == (False, True)
