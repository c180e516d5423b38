"""Desugaring passes: administrative normal form and mutual recursion."""
from __future__ import annotations

from typing import Callable, Optional, Sequence, Tuple

from .ast import (
    App, Assign, Deref, Fix, If, Let, LetRec, MkRef, PrimOp, RecBinding,
    Term, Var,
)
from .ops import FreshNames, all_names, map_children


def anf(t: Term, fresh: Optional[FreshNames] = None) -> Term:
    """Name every operand of primop, deref, ref, assignment, conditional and
    application with a fresh ``let``, left to right.  Operands that are
    already variables are left alone, so ``anf`` is idempotent."""
    if fresh is None:
        fresh = FreshNames(all_names(t))
    return _anf(t, fresh)


def _atomize(operands: Sequence[Term], fresh: FreshNames,
             build: Callable[[Tuple[Var, ...]], Term]) -> Term:
    names = []
    binds = []
    for op in operands:
        if isinstance(op, Var):
            names.append(op)
        else:
            n = fresh.fresh("t")
            binds.append((n, _anf(op, fresh)))
            names.append(Var(n))
    out = build(tuple(names))
    for n, b in reversed(binds):
        out = Let(n, b, out)
    return out


def _anf(t: Term, fresh: FreshNames) -> Term:
    if isinstance(t, PrimOp):
        return _atomize(t.args, fresh, lambda vs: PrimOp(t.op, vs, t.span))
    if isinstance(t, MkRef):
        return _atomize([t.arg], fresh, lambda vs: MkRef(vs[0], t.span))
    if isinstance(t, Deref):
        return _atomize([t.arg], fresh, lambda vs: Deref(vs[0], t.span))
    if isinstance(t, Assign):
        return _atomize([t.target, t.value], fresh,
                        lambda vs: Assign(vs[0], vs[1], t.span))
    if isinstance(t, If):
        then, else_ = _anf(t.then, fresh), _anf(t.else_, fresh)
        return _atomize([t.cond], fresh, lambda vs: If(vs[0], then, else_, t.span))
    if isinstance(t, App):
        return _atomize((t.fun,) + tuple(t.args), fresh,
                        lambda vs: App(vs[0], vs[1:], t.span))
    return map_children(t, lambda s: _anf(s, fresh))


# --------------------------------------------------------------------------
# letrec as a derived form:
#   letrec f1 xs1 = M1 and ... and fn xsn = Mn in N
#   = let f1 = fix f1 xs1 = (letrec <others> in M1) in
#     ...
#     let fn = fix fn xsn = (letrec <others> in Mn) in N


def _letrec(bindings: Tuple[RecBinding, ...], body: Term) -> Term:
    if not bindings:
        return body
    if len(bindings) == 1:
        b = bindings[0]
        return Let(b.name, Fix(b.name, b.params, b.body), body)
    return LetRec(bindings, body)


def unfold_letrec(t: LetRec) -> Term:
    """One level of the inductive definition; inner letrecs stay as nodes."""
    out = t.body
    for i in reversed(range(len(t.bindings))):
        b = t.bindings[i]
        others = t.bindings[:i] + t.bindings[i + 1:]
        out = Let(b.name, Fix(b.name, b.params, _letrec(others, b.body), b.anns), out, t.span)
    return out


def desugar_letrec(bindings: Sequence[Tuple[str, Sequence[str], Term]], body: Term) -> Term:
    """Fully expand mutually recursive bindings into nested let/fix.

    The result grows factorially in the number of bindings; evaluators use
    :func:`unfold_letrec` lazily instead."""
    bs = []
    for name, params, m in bindings:
        if not params:
            raise ValueError(f"recursive binding {name!r} needs at least one parameter")
        bs.append(RecBinding(name, tuple(params), m))
    return desugar_letrec_all(_letrec(tuple(bs), body))


def desugar_letrec_all(t: Term) -> Term:
    if isinstance(t, LetRec):
        return desugar_letrec_all(unfold_letrec(t))
    return map_children(t, desugar_letrec_all)
