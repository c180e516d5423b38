import pathlib

import pytest
from hypothesis import given, strategies as st

from storepass.corpus import examples, get
from storepass.eval import UNIT as UNIT_V, Val, eval_target
from storepass.reach import gen_well_typed
from storepass.syntax import Calculus, equiv_mod_admin, parse_source, parse_term
from storepass.syntax.ast import Const, Let, Tuple_, Var, mk_tuple
from storepass.syntax.ops import FreshNames, subst
from storepass.translate import (
    pack, pad_type, result_type, subsume, translate, translate_env, translate_type,
    unpack,
)
from storepass.typecheck import (
    BASE, UNIT, FunT, OwnershipError, RefT, TypeEnv, store_size, typecheck_refl,
    typecheck_target,
)
from storepass.typecheck.simple import STuple, S_UNIT

GOLDEN = pathlib.Path(__file__).parent / "golden"
GOLDEN_IDS = ["m_ok1", "m_ok2", "m_ok3", "m_ok4", "toggle_read", "swap_fun", "rec_copy"]


def translated(entry):
    env = entry.type_env()
    out, ty, post = translate(env, entry.program().term)
    return env, out, ty, post


@pytest.mark.parametrize("name", GOLDEN_IDS)
def test_golden_translation(name):
    env, out, ty, post = translated(get(name))
    golden = parse_term((GOLDEN / f"{name}.ml").read_text())
    assert equiv_mod_admin(out, golden)
    typecheck_target(translate_env(env), out, result_type(ty, post))


def test_golden_comparison_is_not_vacuous():
    # the same closure with its two store components swapped is a different term
    _, out, _, _ = translated(get("m_ok4"))
    text = (GOLDEN / "m_ok4.ml").read_text()
    swapped = text.replace("((y, f.1),", "((f.1, y),").replace(
        "let (y, fenv) = h in", "let (fenv, y) = h in").replace(
        "(r, u, (y, fenv2))", "(r, u, (fenv2, y))")
    assert swapped != text
    assert not equiv_mod_admin(out, parse_term(swapped))
    _, out, _, _ = translated(get("toggle_read"))
    assert not equiv_mod_admin(out, parse_term("let t = y in let u = not t in (t, u)"))


@pytest.mark.parametrize("entry", [e for e in examples()
                                   if e.calculus is Calculus.REFL and e.typing == "accept"],
                         ids=lambda e: e.id)
def test_translation_typechecks_at_predicted_type(entry):
    env, out, ty, post = translated(entry)
    typecheck_target(translate_env(env), out, result_type(ty, post))


def test_translation_of_rejected_program_raises():
    with pytest.raises(OwnershipError):
        translated(get("m_ng2"))


def test_translated_values_match_examples():
    for name, value in [("m_ok1", False), ("m_ok2", True), ("m_ok3", False), ("m_ok4", True)]:
        _, out, _, _ = translated(get(name))
        res = eval_target(out)
        assert isinstance(res, Val) and res.value.items[0] is value


def test_translate_type():
    f = FunT((RefT(BASE),), 2, UNIT)
    assert str(translate_type(f)) == "(b * b) * (b * (b * b) -> unit * b * (b * b))"
    assert translate_type(RefT(RefT(BASE))) == translate_type(BASE)


def test_generated_translations_typecheck(config):
    for seed in range(config["generated_programs"]):
        t = gen_well_typed(seed, config["generated_size"])
        j = typecheck_refl(TypeEnv(), t)
        out, ty, post = translate(TypeEnv(), t, j)
        typecheck_target({}, out, result_type(ty, post))


# pack / unpack

owner_types = st.one_of(
    st.just(RefT(BASE)),
    st.just(RefT(RefT(BASE))),
    st.just(BASE),
    st.integers(0, 3).map(lambda n: FunT((UNIT,), n, BASE)),
)


@st.composite
def stores(draw):
    tys = draw(st.lists(owner_types, max_size=5))
    env = TypeEnv((f"x{i}", t) for i, t in enumerate(tys))
    bits = st.booleans().map(Const)
    defs = []
    for x, t in env:
        if isinstance(t, FunT):
            cells = [draw(bits) for _ in range(store_size(t))]
            defs.append((x, Tuple_((mk_tuple(cells), parse_term("fun p -> p")))))
        else:
            defs.append((x, draw(bits)))
    h = mk_tuple([draw(bits) for _ in range(store_size(env))])
    return env, defs, h


def _with_defs(defs, body):
    for x, v in reversed(defs):
        body = Let(x, v, body)
    return body


def _observe(env):
    return mk_tuple([Var(x) for x, _ in env] + [Const(True)])


@given(stores())
def test_pack_then_unpack_restores_environment(case):
    env, defs, _ = case
    fresh = FreshNames({x for x, _ in env} | {"h", "before"})
    # one run, so closures compare by identity
    body = Let("before", _observe(env), Let("h", pack(env, fresh), unpack(
        env, "h", Tuple_((Var("before"), _observe(env))), fresh)))
    before, after = eval_target(_with_defs(defs, body)).value.items
    assert before == after


@given(stores())
def test_unpack_then_pack_is_identity_on_stores(case):
    env, defs, h = case
    fresh = FreshNames({x for x, _ in env} | {"h"})
    term = _with_defs(defs, Let("h", h, unpack(env, "h", pack(env, fresh), fresh)))
    assert eval_target(term).value == eval_target(h).value


@given(stores())
def test_pack_has_store_arity(case):
    env, defs, _ = case
    v = eval_target(_with_defs(defs, pack(env, FreshNames({"h"})))).value
    n = store_size(env)
    if n == 0:
        assert v == UNIT_V
    elif n == 1:
        assert isinstance(v, bool)
    else:
        assert len(v.items) == n


# subsumption

@st.composite
def closures(draw):
    """A source program returning a closure that reads and writes some of
    up to three fresh cells."""
    n = draw(st.integers(1, 3))
    init = [draw(st.booleans()) for _ in range(n)]
    cell = st.integers(0, n - 1)
    stmts = []
    for _ in range(draw(st.integers(0, 3))):
        i, j = draw(cell), draw(cell)
        stmts.append(draw(st.sampled_from([f"r{i} := not !r{j}", f"r{i} := !r{j}"])))
    i, j = draw(cell), draw(cell)
    ret = draw(st.sampled_from([f"!r{i}", f"!r{i} && !r{j}", f"!r{i} || !r{j}"]))
    body = "; ".join(stmts + [ret])
    refs = "".join(f"let r{k} = ref {str(b).lower()} in " for k, b in enumerate(init))
    return parse_source(f"{refs}let f = fun u -> ({body}) in f").term


def _calls(closure_term, times):
    """Call the translated closure ``times`` times, threading its store;
    returns the tuple of results followed by the final store."""
    src = ("let (c, s0) = M in let env = c.1 in let code = c.2 in "
           + "".join(f"let (r{i}, u{i}, env) = code ((), env) in " for i in range(times))
           + "(" + ", ".join(f"r{i}" for i in range(times)) + ", env)")
    return subst(parse_term(src), {"M": closure_term})


def _cells(v, k):
    # a k-tuple under the tuple conventions
    return () if k == 0 else (v,) if k == 1 else tuple(v.items)


@given(closures(), st.integers(1, 2), st.integers(1, 3))
def test_subsume_is_behaviourally_transparent(src, extra, times):
    out, ty, post = translate(TypeEnv(), src)
    n = store_size(ty)
    m = n + extra
    padded = subsume(out, ty, m)
    typecheck_target({}, padded, STuple((translate_type(pad_type(ty, m)), S_UNIT)))
    a = eval_target(_calls(out, times)).value.items
    b = eval_target(_calls(padded, times)).value.items
    assert a[:times] == b[:times]
    store = _cells(b[times], m)
    assert store[:n] == _cells(a[times], n)
    assert all(v is False for v in store[n:])


def test_subsume_needs_larger_store():
    src = parse_source("let r = ref true in let f = fun u -> !r in f").term
    out, ty, _ = translate(TypeEnv(), src)
    with pytest.raises(ValueError):
        subsume(out, ty, 1)
