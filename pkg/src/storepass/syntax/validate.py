"""Calculus membership and well-formedness checks."""
from __future__ import annotations

from typing import Dict, Optional

from .ast import (
    AnyBase, App, Assign, BaseKind, Calculus, Const, Deref, Fail, Fix, Gensym,
    Handle, If, INT_ONLY_OPS, Lam, Let, LetRec, LetTuple, Loc, MkRef, Perform,
    PrimOp, Proj, Raise, SymEq, Term, Try, Tuple_, Unit, Var, op_arity,
)
from .lexer import ParseError
from .ops import subterms


class IllFormed(ParseError):
    """A parsed term that does not belong to the requested calculus."""


_COMMON = {Unit, Const, Var, PrimOp, AnyBase, Fail, Let, If, Lam, Fix, App}
_PURE = _COMMON | {Tuple_, Proj, LetTuple, LetRec}

ALLOWED = {
    Calculus.CORE: _PURE,
    Calculus.REFL: _COMMON | {MkRef, Deref, Assign},
    Calculus.EXN: _PURE | {Raise, Try},
    Calculus.ALGEFF: _PURE | {Perform, Handle},
    Calculus.SYM: _PURE | {Gensym, SymEq},
    Calculus.REF: _PURE | {MkRef, Deref, Assign},
}


def _fail(msg: str, t: Term):
    sp = getattr(t, "span", None)
    raise IllFormed(msg, sp.line if sp else 0, sp.col if sp else 0)


def is_anf(t: Term) -> bool:
    try:
        _check_anf(t)
    except IllFormed:
        return False
    return True


def _check_anf(t: Term) -> None:
    for s in subterms(t):
        if isinstance(s, PrimOp):
            ops = s.args
        elif isinstance(s, (MkRef, Deref)):
            ops = (s.arg,)
        elif isinstance(s, Assign):
            ops = (s.target, s.value)
        elif isinstance(s, If):
            ops = (s.cond,)
        elif isinstance(s, App):
            ops = (s.fun,) + s.args
        else:
            continue
        for o in ops:
            if not isinstance(o, Var):
                _fail("operand must be a variable in administrative normal form", s)


def validate(t: Term, calculus: Calculus, base: BaseKind,
             effects: Optional[Dict[str, tuple]] = None) -> None:
    allowed = ALLOWED[calculus]
    effects = effects or {}
    for s in subterms(t):
        if type(s) not in allowed:
            if isinstance(s, Loc):
                _fail("locations cannot appear in programs", s)
            _fail(f"{type(s).__name__.rstrip('_').lower()} is not part of the {calculus.value} calculus", s)
        if isinstance(s, Const):
            want = bool if base is BaseKind.BOOL else int
            if type(s.value) is not want:
                _fail(f"constant {s.value!r} does not match base kind {base.value}", s)
        elif isinstance(s, PrimOp):
            try:
                n = op_arity(s.op)
            except ValueError as e:
                _fail(str(e), s)
            if n != len(s.args):
                _fail(f"{s.op} expects {n} operands", s)
            if base is BaseKind.BOOL and s.op in INT_ONLY_OPS:
                _fail(f"{s.op} needs the int base kind", s)
        elif isinstance(s, Fix):
            if not s.params:
                _fail("fix needs at least one parameter", s)
        elif isinstance(s, App):
            if not s.args:
                _fail("application without arguments", s)
        elif isinstance(s, Proj):
            if s.index < 1:
                _fail("projection indices start at 1", s)
        elif isinstance(s, Perform):
            if s.name not in effects:
                _fail(f"undeclared effect {s.name!r}", s)
        elif isinstance(s, Handle):
            names = [c.name for c in s.handler.clauses]
            if len(set(names)) != len(names):
                _fail("duplicate effect clause", s)
            for n in names:
                if n not in effects:
                    _fail(f"clause for undeclared effect {n!r}", s)
            missing = set(effects) - set(names)
            if missing:
                _fail(f"handler lacks clauses for {', '.join(sorted(missing))}", s)
        elif isinstance(s, LetTuple):
            if len(s.names) < 2:
                _fail("tuple pattern needs at least two names", s)
    if calculus is Calculus.REFL:
        _check_anf(t)
