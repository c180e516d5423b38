import pytest
from hypothesis import given

from storepass.corpus import benchmarks, get
from storepass.eval import Failed, evaluate
from storepass.reach import (
    FAIL_REACHABLE, INCONCLUSIVE, NO_FAIL, check_reach, closure_store_sizes,
    diff_test, explore, gen_well_typed, generation_stats, replay,
)
from storepass.syntax import BaseKind, Calculus, parse_source
from storepass.syntax.ast import AnyBase, Const, Let
from storepass.syntax.ops import free_vars, subterms, term_size
from storepass.typecheck import BASE, TypeEnv, typecheck_refl

from strategies import terms


def core(src):
    return parse_source(src, Calculus.CORE).term


def test_plain_fail_and_choice_fail():
    r = check_reach(core("fail"))
    assert r.verdict == FAIL_REACHABLE and r.witness == ()
    r = check_reach(core("let b = * in if b then fail else ()"))
    assert r.verdict == FAIL_REACHABLE and r.witness == (True,)


def test_no_fail_and_inconclusive():
    assert check_reach(core("let b = * in if b then true else false")).verdict == NO_FAIL
    r = check_reach(core("let rec f x = f x in f ()"), fuel=2000)
    assert r.verdict == INCONCLUSIVE and r.out_of_fuel == 1


@pytest.mark.parametrize("k", range(0, 7))
def test_exploration_visits_every_choice_sequence(k):
    src = "".join(f"let c{i} = * in " for i in range(k)) + "()"
    t = core(src)
    seen = [p.choices for p in explore(
        lambda o, f: evaluate(t, "target", fuel=f, oracle=o), (False, True), 10_000, 12)]
    assert len(seen) == 2 ** k == len(set(seen))
    assert check_reach(core(src)).paths == 2 ** k


def test_integer_domains_are_explored():
    t = parse_source("let n = * in if n = 3 then fail else ()", Calculus.CORE, BaseKind.INT).term
    r = check_reach(t, base=BaseKind.INT, int_domain=range(-1, 4))
    assert r.verdict == FAIL_REACHABLE and r.witness == (3,)
    r = check_reach(t, base=BaseKind.INT, int_domain=range(-1, 3))
    assert r.verdict == NO_FAIL and r.paths == 4


def _closed(t):
    for x in sorted(free_vars(t)):
        t = Let(x, AnyBase(), t)
    return t


@given(terms(Calculus.CORE).map(_closed))
def test_witness_replays_to_fail(t):
    r = check_reach(t, fuel=3000, max_choices=8)
    if r.verdict == FAIL_REACHABLE:
        assert isinstance(replay(t, "target", r.witness, fuel=3000), Failed)
    else:
        assert r.witness is None


def test_witness_replay_on_generated_programs(config):
    found = 0
    for seed in range(config["generated_programs"]):
        t = gen_well_typed(seed, config["generated_size"])
        r = check_reach(t, "refl", max_choices=config["max_choices"])
        assert r.verdict != INCONCLUSIVE or r.out_of_fuel
        if r.verdict == FAIL_REACHABLE:
            found += 1
            assert isinstance(replay(t, "refl", r.witness), Failed)
    assert found > 0


# differential testing

def test_diff_on_examples():
    for name in ("m_ok1", "m_ok2", "m_ok3", "m_ok4", "toggle_read_closed"):
        e = get(name)
        rep = diff_test(e.program().term, monitor=True, name=name)
        assert rep.verdict == "agree" and not rep.violations and rep.paths == 1


def test_diff_with_reference_inputs():
    e = get("toggle_read")
    for start in (False, True):
        rep = diff_test(e.program().term, e.type_env(), values={"y": start}, monitor=True)
        assert rep.verdict == "agree" and not rep.violations


def test_diff_explores_recursive_example():
    src = "let y = ref true in let f = fix f x = if * then !y else (y := not !y; f x) in f ()"
    rep = diff_test(parse_source(src).term, max_choices=6, monitor=True)
    assert rep.verdict == "agree" and rep.paths == 7
    assert {str(p.source) for p in rep.pairs} == {"true", "false", "out of choices"}


def test_diff_detects_a_wrong_translation(monkeypatch):
    # a translation that negates every result must be caught
    import storepass.reach.harness as harness
    from storepass.syntax.ast import LetTuple, PrimOp, Tuple_, Var

    real = harness.translate

    def broken(env, t, j=None, base=BaseKind.BOOL):
        out, ty, post = real(env, t, j, base)
        return LetTuple(("r", "s"), out, Tuple_((PrimOp("not", (Var("r"),)), Var("s")))), ty, post

    monkeypatch.setattr(harness, "translate", broken)
    rep = diff_test(get("m_ok2").program().term)
    assert rep.verdict == "disagree"


# benchmarks

@pytest.mark.parametrize("entry", benchmarks(), ids=lambda e: e.id)
def test_benchmark_verdicts(entry):
    kw = dict(fuel=entry.fuel, max_choices=entry.max_choices, base=entry.base,
              int_domain=entry.int_domain)
    runs = [(entry.program("target").term, "target")]
    if entry.source:
        from storepass.translate import translate
        src = entry.program("source").term
        runs += [(src, "refl"), (translate(TypeEnv(), src)[0], "target")]
    for t, lang in runs:
        r = check_reach(t, lang, **kw)
        assert not r.stuck
        if entry.expected == "unsafe":
            assert r.verdict == FAIL_REACHABLE
            assert isinstance(replay(t, lang, r.witness, fuel=entry.fuel), Failed)
        else:
            assert r.verdict in (NO_FAIL, INCONCLUSIVE)
            assert r.witness is None
            assert r.verdict == NO_FAIL or entry.diverging_paths


@pytest.mark.parametrize("entry", [e for e in benchmarks() if e.source], ids=lambda e: e.id)
def test_benchmark_pairs_agree(entry):
    rep = diff_test(entry.program("source").term, fuel=entry.fuel, max_choices=entry.max_choices,
                    base=entry.base, int_domain=entry.int_domain, monitor=True, name=entry.id)
    assert rep.verdict == "agree" and not rep.violations and rep.out_of_fuel == 0
    assert rep.paths == len(entry.int_domain)


# generator

def test_generated_programs_are_well_typed_and_bounded(config):
    for seed in range(config["generated_programs"]):
        t = gen_well_typed(seed, config["generated_size"])
        assert term_size(t) <= config["generated_size"]
        assert sum(isinstance(s, AnyBase) for s in subterms(t)) <= config["max_choices"]
        j = typecheck_refl(TypeEnv(), t)
        assert j.type == BASE


def test_generator_is_deterministic():
    assert gen_well_typed(11, 30) == gen_well_typed(11, 30)
    assert gen_well_typed(11, 30) != gen_well_typed(12, 30)


@pytest.mark.parametrize("size", [1, 2])
def test_smallest_programs_are_constants(size):
    for seed in range(20):
        assert isinstance(gen_well_typed(seed, size), Const)


def test_generated_integer_programs():
    for seed in range(50):
        t = gen_well_typed(seed, 30, BaseKind.INT)
        assert typecheck_refl(TypeEnv(), t).type == BASE


def test_store_carrying_closures_are_common(config):
    stats = generation_stats(range(config["generated_programs"]), config["generated_size"])
    assert stats["failures"] == 0
    assert stats["store_closure_fraction"] >= config["store_closure_threshold"]


def test_closure_store_sizes():
    t = parse_source("let x = ref true in let f = fun u -> !x in let g = fun v -> true in f ()").term
    assert sorted(closure_store_sizes(t)) == [0, 1]
