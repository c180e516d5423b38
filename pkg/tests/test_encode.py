import pytest
from hypothesis import given, strategies as st

from storepass.corpus import machines
from storepass.encode import (
    ENCODINGS, TARGETS, Config, Halted, Running, agreement, decode_exn_numeral,
    eliminate_recursion_exn, encode, exn_call_trace, exn_numeral, minsky_configs,
    run_minsky, sym_to_ref, unwrap_probe,
)
from storepass.eval import DEEP, Failed, eval_alg, eval_exn, evaluate
from storepass.syntax import parse_minsky, parse_source, print_program
from storepass.syntax.normalize import alpha_equiv
from storepass.syntax.ast import App, Const, Fix
from storepass.syntax.ops import subterms
from storepass.syntax.parser import parse_term
from storepass.typecheck import typecheck_ext
from storepass.typecheck.simple import S_BASE, type_equal

HALTING = [e for e in machines() if e.expected == "halts"]
DIVERGING = [e for e in machines() if e.expected == "diverges"]


def test_machine_suite_sizes(config):
    assert len(HALTING) >= 5 and all(e.extra["steps"] <= 50 for e in HALTING)
    assert len(DIVERGING) >= 3
    for e in DIVERGING:
        assert isinstance(run_minsky(e.machine(), config["nonhalting_machine_steps"]), Running)


def test_simulator():
    P = parse_minsky("0: inc 1 goto 1\n1: if 1 then 2 else 1\n2: halt")
    assert run_minsky(P, 100) == Halted(3, Config(2, 0, 0))
    assert list(minsky_configs(P, 100)) == [
        Config(0, 0, 0), Config(1, 0, 1), Config(1, 0, 0), Config(2, 0, 0)]
    assert run_minsky(P, 1) == Running(Config(1, 0, 1))


@pytest.mark.parametrize("entry", HALTING, ids=lambda e: e.id)
def test_halting_machines_make_every_encoding_fail(entry, config):
    a = agreement(entry.machine(), config["minsky_fuel"], config["nonhalting_machine_steps"])
    assert a.halts and a.steps == entry.extra["steps"]
    assert set(a.outcomes) == set(ENCODINGS)
    assert all(o == "fail" for o in a.outcomes.values()), a.outcomes
    assert a.trace_matches is True


@pytest.mark.parametrize("entry", DIVERGING, ids=lambda e: e.id)
def test_diverging_machines_never_fail(entry, config):
    a = agreement(entry.machine(), config["minsky_fuel"], config["nonhalting_machine_steps"])
    assert not a.halts
    assert all(o == "out of fuel" for o in a.outcomes.values()), a.outcomes
    assert a.ok


@pytest.mark.parametrize("entry", HALTING[:3] + DIVERGING[:1], ids=lambda e: e.id)
def test_symbol_encoding(entry, config):
    prog = encode(entry.machine(), "sym")
    out = evaluate(prog.term, "sym", fuel=config["minsky_fuel"])
    assert isinstance(out, Failed) == (entry.expected == "halts")


@pytest.mark.parametrize("target", TARGETS)
def test_encodings_are_well_typed_and_print(target):
    P = machines()[2].machine()
    prog = encode(P, target)
    typecheck_ext(prog.term, prog.signature, deep=(target != "alg-shallow"))
    text = print_program(prog.term, prog.signature)
    back = parse_source(text, prog.calculus, prog.base)
    assert alpha_equiv(back.term, prog.term)


def test_exception_trace_matches_configurations():
    P = parse_minsky("0: inc 0 goto 1\n1: inc 1 goto 2\n2: if 0 then 3 else 2\n3: halt")
    out, calls = exn_call_trace(P, 100_000)
    assert isinstance(out, Failed)
    assert calls == list(minsky_configs(P, 100))


def test_trace_detects_a_different_run():
    # the trace must really follow the program: a machine with another
    # increment produces another configuration sequence
    P = parse_minsky("0: inc 0 goto 1\n1: halt")
    Q = parse_minsky("0: inc 1 goto 1\n1: halt")
    assert exn_call_trace(P, 10_000)[1] != list(minsky_configs(Q, 10))


@given(st.integers(0, 12))
def test_exception_numerals_decode(n):
    v = eval_exn(exn_numeral(n)).value
    assert decode_exn_numeral(v) == n


@given(st.integers(0, 6))
def test_unwrap_exposes_the_outermost_effect(n):
    t, sig = unwrap_probe(n)
    assert type_equal(typecheck_ext(t, sig, deep=True), S_BASE)
    events = []
    out = eval_alg(t, DEEP, trace=events.append)
    assert out.value == (n - 1 if n else -1)
    handled = [e.detail[0] for e in events if e.rule == "R-DH"]
    # unwrap handles the raw effect, then the probe sees its primed twin
    assert handled[:2] == (["opS", "opS1"] if n else ["opZ", "opZ1"])


def test_recursion_elimination_with_exceptions():
    f = parse_term("fix f x = if x then f false else not x")
    g = eliminate_recursion_exn(f)
    assert not any(isinstance(s, Fix) for s in subterms(g))
    for arg in (True, False):
        a = eval_exn(App(f, (Const(arg),)))
        b = eval_exn(App(g, (Const(arg),)))
        assert a.value is b.value is True


def test_symbols_to_references_keeps_outcome():
    P = machines()[1].machine()
    sym = encode(P, "sym").term
    assert isinstance(evaluate(sym_to_ref(sym), "ref", fuel=100_000), Failed)
    assert isinstance(evaluate(encode(P, "ref").term, "ref", fuel=100_000), Failed)


def test_unknown_target():
    with pytest.raises(ValueError):
        encode(parse_minsky("0: halt"), "smoke-signals")
