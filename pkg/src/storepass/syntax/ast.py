"""Abstract syntax shared by every calculus in the family.

One term type covers the ownership-typed source language, the pure target
language with tuples, and the exception / effect-handler / symbol /
reference extensions.  Which constructs are legal is decided by the
:class:`Calculus` tag checked in :mod:`storepass.syntax.validate`.

All nodes are frozen dataclasses.  Source spans are carried for diagnostics
but excluded from equality, so structurally equal terms compare equal
regardless of where they were parsed from.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional, Tuple, Union


class BaseKind(enum.Enum):
    BOOL = "bool"
    INT = "int"


class Calculus(enum.Enum):
    CORE = "core"      # pure target language (PCF with tuples)
    REFL = "refl"      # ownership-typed references
    EXN = "exn"
    ALGEFF = "algeff"
    SYM = "sym"
    REF = "ref"        # unrestricted references


@dataclass(frozen=True)
class Span:
    line: int
    col: int
    end_line: int = 0
    end_col: int = 0

    def __str__(self) -> str:
        return f"{self.line}:{self.col}"


def _span():
    return field(default=None, compare=False, repr=False)


# --------------------------------------------------------------------------
# Type expressions as written in programs (annotations, raise/try types,
# effect signatures).  Checkers convert them into their own type objects.


@dataclass(frozen=True)
class TyName:
    name: str  # unit | bool | int | sym


@dataclass(frozen=True)
class TyRef:
    inner: "TyExpr"


@dataclass(frozen=True)
class TyArrow:
    params: Tuple["TyExpr", ...]
    ret: "TyExpr"
    store: Optional[int] = None  # store size annotation `-[n]->`


@dataclass(frozen=True)
class TyTuple:
    items: Tuple["TyExpr", ...]


TyExpr = Union[TyName, TyRef, TyArrow, TyTuple]


# --------------------------------------------------------------------------
# Terms


@dataclass(frozen=True)
class Unit:
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Const:
    value: Union[bool, int]
    span: Optional[Span] = _span()

    def __eq__(self, other):
        # keep True and 1 apart
        return (
            isinstance(other, Const)
            and type(self.value) is type(other.value)
            and self.value == other.value
        )

    def __hash__(self):
        return hash((Const, type(self.value), self.value))


@dataclass(frozen=True)
class Var:
    name: str
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class PrimOp:
    op: str
    args: Tuple["Term", ...]
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class AnyBase:
    """The nondeterministic base value ``*``."""

    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Fail:
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class MkRef:
    arg: "Term"
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Deref:
    arg: "Term"
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Assign:
    target: "Term"
    value: "Term"
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Let:
    name: str
    bound: "Term"
    body: "Term"
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class LetTuple:
    """``let (x1, ..., xk) = e in body`` with k >= 2."""

    names: Tuple[str, ...]
    bound: "Term"
    body: "Term"
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class If:
    cond: "Term"
    then: "Term"
    else_: "Term"
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Lam:
    param: str
    body: "Term"
    ann: Optional[TyExpr] = None
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Fix:
    name: str
    params: Tuple[str, ...]
    body: "Term"
    anns: Optional[Tuple[Optional[TyExpr], ...]] = None
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class App:
    fun: "Term"
    args: Tuple["Term", ...]
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class RecBinding:
    name: str
    params: Tuple[str, ...]
    body: "Term"
    anns: Optional[Tuple[Optional[TyExpr], ...]] = None


@dataclass(frozen=True)
class LetRec:
    """Mutually recursive bindings, kept as a node and unfolded lazily.

    Evaluators and checkers unfold one level at a time with
    :func:`storepass.syntax.desugar.unfold_letrec`, which is the inductive
    derived form; :func:`storepass.syntax.desugar.desugar_letrec` expands it
    completely.
    """

    bindings: Tuple[RecBinding, ...]
    body: "Term"
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Raise:
    ty: TyExpr
    arg: "Term"
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Try:
    ty: TyExpr
    body: "Term"
    binder: str
    handler: "Term"
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Perform:
    """Effect invocation ``alpha(v; k)``."""

    name: str
    arg: "Term"
    cont: "Term"
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Clause:
    name: str
    arg: str
    cont: str
    body: "Term"


@dataclass(frozen=True)
class Handler:
    ret_binder: str
    ret_body: "Term"
    clauses: Tuple[Clause, ...]

    def clause(self, name: str) -> Optional[Clause]:
        for c in self.clauses:
            if c.name == name:
                return c
        return None


@dataclass(frozen=True)
class Handle:
    body: "Term"
    handler: Handler
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Gensym:
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class SymEq:
    left: "Term"
    right: "Term"
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Tuple_:
    items: Tuple["Term", ...]
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Proj:
    """1-based projection."""

    tup: "Term"
    index: int
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Loc:
    """Heap location; only produced at run time."""

    id: int
    span: Optional[Span] = _span()


Term = Union[
    Unit, Const, Var, PrimOp, AnyBase, Fail, MkRef, Deref, Assign, Let,
    LetTuple, If, Lam, Fix, App, LetRec, Raise, Try, Perform, Handle, Gensym,
    SymEq, Tuple_, Proj, Loc,
]


UNARY_OPS = {"not"}
BINARY_OPS = {"&&", "||", "+", "-", "=", "<>", "<", "<=", ">", ">="}
INT_ONLY_OPS = {"+", "-", "<", "<=", ">", ">="}


def op_arity(op: str) -> int:
    if op in UNARY_OPS:
        return 1
    if op in BINARY_OPS:
        return 2
    raise ValueError(f"unknown primitive {op!r}")


def mk_tuple(items) -> Term:
    """Tuple with the arity conventions of the store encoding:
    zero items is unit, one item is the item itself."""
    items = tuple(items)
    if not items:
        return Unit()
    if len(items) == 1:
        return items[0]
    return Tuple_(items)


def mk_let_tuple(names, bound: Term, body: Term) -> Term:
    names = tuple(names)
    if not names:
        return Let("_", bound, body)
    if len(names) == 1:
        return Let(names[0], bound, body)
    return LetTuple(names, bound, body)


@dataclass(frozen=True)
class Program:
    """A parsed program: the term plus the metadata it was parsed under."""

    term: Term
    calculus: Calculus
    base: BaseKind
    signature: dict = field(default_factory=dict, compare=False)
