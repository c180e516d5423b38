"""Hypothesis strategies shared by the property tests."""
from hypothesis import strategies as st

from storepass.syntax.ast import (
    AnyBase, App, Assign, Calculus, Clause, Const, Deref, Fail, Fix, Gensym,
    Handle, Handler, If, Lam, Let, LetRec, LetTuple, MkRef, Perform, PrimOp,
    Proj, Raise, RecBinding, SymEq, Try, Tuple_, TyArrow, TyName, TyRef,
    TyTuple, Unit, Var,
)

NAMES = ["x", "y", "z", "f", "g", "k1"]
EFFECTS = {"eA": (TyName("unit"), TyName("bool")), "eB": (TyName("bool"), TyName("unit"))}

names = st.sampled_from(NAMES)
consts = st.one_of(st.booleans().map(Const), st.integers(-3, 9).map(Const))

tyexprs = st.recursive(
    st.sampled_from([TyName("unit"), TyName("bool"), TyName("int")]),
    lambda inner: st.one_of(
        inner.map(TyRef),
        st.tuples(st.lists(inner, min_size=1, max_size=2).map(tuple), inner,
                  st.one_of(st.none(), st.integers(0, 3))).map(lambda a: TyArrow(*a)),
        st.lists(inner, min_size=2, max_size=3).map(lambda xs: TyTuple(tuple(xs))),
    ),
    max_leaves=4,
)


def _distinct(k):
    return st.lists(names, min_size=k, max_size=k, unique=True).map(tuple)


def terms(calculus: Calculus, max_leaves: int = 12):
    """Random (not necessarily well-typed) terms using the constructs of
    ``calculus``."""
    pure = calculus in (Calculus.CORE, Calculus.EXN, Calculus.ALGEFF, Calculus.SYM, Calculus.REF)
    leaves = [names.map(Var), consts, st.just(Unit()), st.just(AnyBase()), st.just(Fail())]
    if calculus is Calculus.SYM:
        leaves.append(st.just(Gensym()))
    base = st.one_of(*leaves)

    def extend(t):
        opts = [
            st.tuples(names, t, t).map(lambda a: Let(*a)),
            st.tuples(t, t, t).map(lambda a: If(*a)),
            st.tuples(names, t, st.one_of(st.none(), tyexprs)).map(lambda a: Lam(*a)),
            st.tuples(names, st.integers(1, 2).flatmap(_distinct), t).map(
                lambda a: Fix(a[0], a[1], a[2])),
            st.tuples(t, st.lists(t, min_size=1, max_size=2).map(tuple)).map(lambda a: App(*a)),
            st.tuples(st.sampled_from(["&&", "||", "+", "-", "=", "<>", "<", ">="]), t, t).map(
                lambda a: PrimOp(a[0], (a[1], a[2]))),
            t.map(lambda a: PrimOp("not", (a,))),
        ]
        if pure:
            opts += [
                st.lists(t, min_size=2, max_size=3).map(lambda xs: Tuple_(tuple(xs))),
                st.tuples(t, st.integers(1, 3)).map(lambda a: Proj(*a)),
                st.tuples(st.integers(2, 3).flatmap(_distinct), t, t).map(lambda a: LetTuple(*a)),
                st.tuples(names, st.integers(1, 2).flatmap(_distinct), t, t).map(
                    lambda a: LetRec((RecBinding(a[0], a[1], a[2]),), a[3])),
            ]
        if calculus in (Calculus.REFL, Calculus.REF):
            opts += [t.map(MkRef), t.map(Deref), st.tuples(t, t).map(lambda a: Assign(*a))]
        if calculus is Calculus.EXN:
            opts += [
                st.tuples(tyexprs, t).map(lambda a: Raise(*a)),
                st.tuples(tyexprs, t, names, t).map(lambda a: Try(*a)),
            ]
        if calculus is Calculus.ALGEFF:
            eff = st.sampled_from(sorted(EFFECTS))
            clause = st.tuples(eff, names, names, t).map(lambda a: Clause(*a))
            clauses = st.lists(clause, max_size=2, unique_by=lambda c: c.name).map(tuple)
            opts += [
                st.tuples(eff, t, t).map(lambda a: Perform(*a)),
                st.tuples(t, names, t, clauses).map(
                    lambda a: Handle(a[0], Handler(a[1], a[2], a[3]))),
            ]
        if calculus is Calculus.SYM:
            opts.append(st.tuples(t, t).map(lambda a: SymEq(*a)))
        return st.one_of(*opts)

    return st.recursive(base, extend, max_leaves=max_leaves)
