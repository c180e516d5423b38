import pytest
from hypothesis import given, strategies as st

from storepass.eval import Oracle, OutOfFuel, Stuck, eval_source, same_outcome
from storepass.syntax import (
    BaseKind, Calculus, CondDec, Halt, IllFormed, Inc, ParseError, anf, is_anf,
    parse_minsky, parse_source, parse_term, parse_type, print_program, print_term,
    print_type,
)
from storepass.syntax.ast import Const, Fix, Let, Lam, LetRec, Raise, Try, TyArrow, TyName
from storepass.syntax.normalize import alpha_equiv
from storepass.syntax.ops import free_vars, rename_apart, subst, subterms, term_size

from strategies import EFFECTS, terms, tyexprs


def annotations(t):
    out = []
    for s in subterms(t):
        if isinstance(s, Lam):
            out.append(s.ann)
        elif isinstance(s, Fix):
            out.append(s.anns)
        elif isinstance(s, LetRec):
            out.extend(b.anns for b in s.bindings)
        elif isinstance(s, (Raise, Try)):
            out.append(s.ty)
    return out


def _round_trip(t):
    text = print_program(t, EFFECTS)
    back = parse_term(text, None)
    assert alpha_equiv(back, t), text
    assert annotations(back) == annotations(t), text


@pytest.mark.parametrize("calculus", list(Calculus), ids=lambda c: c.value)
def test_print_parse_round_trip(calculus):
    given(terms(calculus))(_round_trip)()


def test_round_trip_one_line_printer():
    @given(terms(Calculus.EXN))
    def check(t):
        assert alpha_equiv(parse_term(print_term(t)), t)
    check()


@given(tyexprs)
def test_type_round_trip(ty):
    assert parse_type(print_type(ty)) == ty


def test_arrow_size_annotation_prints():
    ty = TyArrow((TyName("unit"),), TyName("bool"), 2)
    assert print_type(ty) == "unit -[2]-> bool"
    assert parse_type("unit -[2]-> bool") == ty


def test_sequencing_is_a_let():
    t = parse_term("x := true; !x")
    assert type(t).__name__ == "Let"


def test_parse_error_has_location():
    with pytest.raises(ParseError) as e:
        parse_term("let x = in x")
    assert e.value.line == 1 and e.value.col > 0


def test_validate_rejects_foreign_constructs():
    with pytest.raises(IllFormed):
        parse_source("ref true", Calculus.CORE)
    with pytest.raises(IllFormed):
        parse_source("(true, false)", Calculus.REFL)
    with pytest.raises(IllFormed):
        parse_source("1 + 2", Calculus.REFL, BaseKind.BOOL)
    with pytest.raises(IllFormed):
        parse_source("true", Calculus.REFL, BaseKind.INT)


def test_source_programs_are_in_anf():
    p = parse_source("let x = ref (not true) in x := not !x; !x")
    assert is_anf(p.term)
    assert not is_anf(parse_term("not (not true)"))


@given(terms(Calculus.REFL))
def test_anf_is_idempotent_and_normal(t):
    a = anf(t)
    assert is_anf(a)
    assert alpha_equiv(anf(a), a)


def _close(t):
    # variable reads only commute with effects when the variable is bound
    for x in sorted(free_vars(t)):
        t = Let(x, Const(True), t)
    return t


@given(terms(Calculus.REFL).map(_close), st.lists(st.booleans(), max_size=4))
def test_anf_preserves_evaluation(t, choices):
    before = eval_source(t, fuel=5000, oracle=Oracle(choices), ownership=False)
    after = eval_source(anf(t), fuel=5000, oracle=Oracle(choices), ownership=False)
    if isinstance(before, OutOfFuel) or isinstance(after, OutOfFuel):
        return
    if isinstance(before, Stuck):
        assert isinstance(after, Stuck)
    else:
        assert same_outcome(before, after)


@given(terms(Calculus.CORE))
def test_rename_apart_is_alpha_equivalent(t):
    assert alpha_equiv(rename_apart(t), t)
    assert free_vars(rename_apart(t)) == free_vars(t)


def test_subst_avoids_capture():
    t = parse_term("fun y -> x")
    out = subst(t, {"x": parse_term("y")})
    assert free_vars(out) == {"y"}
    assert not alpha_equiv(out, parse_term("fun y -> y"))


def test_term_size_counts_subterms():
    assert term_size(parse_term("true")) == 1
    assert term_size(parse_term("not true")) == 2
    assert term_size(parse_term("let x = true in x")) == 3


# minsky machines

def test_parse_minsky_forms():
    m = parse_minsky("0: inc 1 goto 1\n1: if 1 then 2 else 1  # loop\n2: halt\n")
    assert m.program == {0: Inc(1, 1), 1: CondDec(1, 2, 1), 2: Halt()}
    assert parse_minsky(m.to_text()) == m
    assert parse_minsky("0: inc 0 goto 1 / 1: halt") == parse_minsky("0: inc 0 goto 1\n1: halt")


@pytest.mark.parametrize("bad", [
    "1: halt", "0: inc 2 goto 0", "0: inc 0 goto 5", "0: halt\n0: halt", "0: jump 1",
])
def test_parse_minsky_rejects(bad):
    with pytest.raises(ParseError):
        parse_minsky(bad)
