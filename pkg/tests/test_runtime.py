from hypothesis import given, strategies as st

from storepass.eval import (
    UNIT, LocV, check_runtime_state, check_runtime_state_exhaustive, eval_source,
    initial_state, monitor_eval,
)
from storepass.reach import gen_well_typed
from storepass.syntax import parse_source
from storepass.typecheck import BASE, UNIT as UNIT_T, FunT, RefT, TypeEnv, typecheck_refl

SLOT_TYPES = [BASE, UNIT_T, RefT(BASE), RefT(RefT(BASE))]


@st.composite
def states(draw):
    """A small run-time state whose references may alias or be ill-formed."""
    tys = draw(st.lists(st.sampled_from(SLOT_TYPES), max_size=4))
    env = TypeEnv((f"x{i}", t) for i, t in enumerate(tys))
    H, R = {}, {}

    def value(ty):
        if ty == BASE:
            return draw(st.sampled_from([True, False, UNIT]))
        if ty == UNIT_T:
            return draw(st.sampled_from([UNIT, UNIT, True]))
        if H and draw(st.integers(0, 3)) == 0:
            return draw(st.sampled_from(sorted(H, key=lambda l: l.id)))   # alias
        loc = LocV(len(H))
        H[loc] = None
        H[loc] = value(ty.inner)
        return loc

    for x, ty in env:
        R[x] = value(ty)
    if len(H) < 8 and draw(st.booleans()):
        H[LocV(len(H))] = True                                            # garbage cell
    return env, R, H


@given(states())
def test_footprint_and_exhaustive_checkers_agree(case):
    env, R, H = case
    fast = check_runtime_state(R, H, env)
    slow = check_runtime_state_exhaustive(R, H, env)
    assert bool(fast) == bool(slow), (fast.witness, R, H)


def test_aliasing_is_rejected_by_both():
    env = TypeEnv([("x", RefT(BASE)), ("y", RefT(BASE))])
    loc = LocV(0)
    R, H = {"x": loc, "y": loc}, {loc: True}
    assert not check_runtime_state(R, H, env)
    assert not check_runtime_state_exhaustive(R, H, env)
    R, H = initial_state(env)
    assert check_runtime_state(R, H, env) and check_runtime_state_exhaustive(R, H, env)


def _captured_states(t):
    j = typecheck_refl(TypeEnv(), t)
    seen = []

    def on_let(node, v, R, H):
        info = j.info(node)
        R = dict(R)
        R["$r"] = v
        seen.append((R, dict(H), info.extra["mid"].extend("$r", info.extra["bound_type"])))

    eval_source(j.term, fuel=100_000, on_let=on_let)
    return j, seen


def test_checkers_agree_on_states_with_closures():
    checked = 0
    for seed in range(150):
        j, seen = _captured_states(gen_well_typed(seed, 30))
        for R, H, env in seen:
            if len(H) > 8:
                continue
            fast = check_runtime_state(R, H, env, j)
            slow = check_runtime_state_exhaustive(R, H, env, j)
            assert fast.ok and slow.ok, fast.witness
            checked += 1
            # hand the same cell to a second owner: both must now reject
            refs = [x for x, ty in env if isinstance(ty, RefT)]
            if len(refs) >= 2:
                bad = dict(R)
                bad[refs[1]] = R[refs[0]]
                assert bool(check_runtime_state(bad, H, env, j)) == \
                    bool(check_runtime_state_exhaustive(bad, H, env, j)) is False
    assert checked > 500


def test_closure_owning_a_cell_conflicts_with_the_cell():
    p = parse_source("let x = ref true in let f = fun u -> !x in f")
    j = typecheck_refl(TypeEnv(), p.term)
    out = eval_source(j.term)
    clo = out.value
    loc = next(iter(out.heap))
    env = TypeEnv([("f", FunT((UNIT_T,), 1, BASE)), ("x", RefT(BASE))])
    R = {"f": clo, "x": loc}
    assert not check_runtime_state(R, out.heap, env, j)
    assert not check_runtime_state_exhaustive(R, out.heap, env, j)
    env1 = TypeEnv([("f", FunT((UNIT_T,), 1, BASE))])
    assert check_runtime_state({"f": clo}, out.heap, env1, j)
    assert check_runtime_state_exhaustive({"f": clo}, out.heap, env1, j)


def test_monitor_reports_no_violations_on_examples():
    for src in ["let x = ref true in let y = x in (y := not !y; !y)",
                "let x = ref true in let f = fun z -> (x := not !x; !x) in (f (); f ())"]:
        rep = monitor_eval(parse_source(src).term, TypeEnv())
        assert rep.ok and rep.checks > 3
