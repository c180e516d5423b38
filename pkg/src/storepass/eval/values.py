"""Run-time values, outcomes, choice oracles and fuel."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

from ..syntax.ast import BaseKind, Fix, Lam, Term, TyExpr


@dataclass(frozen=True)
class TupleV:
    items: tuple

    def __repr__(self):
        return "(" + ", ".join(map(render, self.items)) + ")"


UNIT = TupleV(())


@dataclass(frozen=True)
class LocV:
    id: int

    def __repr__(self):
        return f"@{self.id}"


@dataclass(frozen=True)
class SymV:
    label: int

    def __repr__(self):
        return f"sym#{self.label}"


class Closure:
    """A lambda or fix together with its captured environment.

    ``rec_self`` marks the binding a recursive function gets inside its own
    body; ``owns`` records whether the captured environment reaches a heap
    location (then copying the closure would duplicate ownership)."""

    __slots__ = ("fun", "env", "rec_self", "owns")

    def __init__(self, fun: Term, env: Dict[str, Any], rec_self: bool = False):
        self.fun = fun
        self.env = env
        self.rec_self = rec_self
        self.owns = any(not sharable_value(v) for v in env.values())

    @property
    def name(self) -> Optional[str]:
        return self.fun.name if isinstance(self.fun, Fix) else None

    def arity(self) -> int:
        return len(self.fun.params) if isinstance(self.fun, Fix) else 1

    def __repr__(self):
        if isinstance(self.fun, Fix):
            return f"<fix {self.fun.name}>"
        return f"<fun {self.fun.param}>" if isinstance(self.fun, Lam) else "<closure>"


class ContValue:
    """A captured delimited continuation, applied like a unary function."""

    __slots__ = ("frames", "fn")

    def __init__(self, frames: tuple, fn):
        self.frames = frames
        self.fn = fn

    def __repr__(self):
        return f"<continuation {len(self.frames)} frames>"


def sharable_value(v) -> bool:
    """Whether copying ``v`` is harmless: it reaches no heap location.
    Recursive self-bindings are treated as sharable, like their type."""
    if isinstance(v, LocV):
        return False
    if isinstance(v, Closure):
        return v.rec_self or not v.owns
    if isinstance(v, TupleV):
        return all(sharable_value(i) for i in v.items)
    return True


def truthy(v) -> bool:
    if isinstance(v, bool):
        return v
    if isinstance(v, int):
        return v != 0
    raise TypeError(f"not a base value: {render(v)}")


def render(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, TupleV):
        return repr(v) if v.items else "()"
    return repr(v)


# --------------------------------------------------------------------------
# outcomes


@dataclass(frozen=True)
class Val:
    value: Any
    env: Optional[dict] = field(default=None, compare=False)
    heap: Optional[dict] = field(default=None, compare=False)

    def __str__(self):
        return render(self.value)


@dataclass(frozen=True)
class Failed:
    def __str__(self):
        return "fail"


@dataclass(frozen=True)
class OutOfFuel:
    reason: str = "fuel"

    def __str__(self):
        return f"out of {self.reason}"


@dataclass(frozen=True)
class Stuck:
    reason: str
    payload: Any = field(default=None, compare=False)

    def __str__(self):
        return f"stuck: {self.reason}"


@dataclass(frozen=True)
class Uncaught:
    ty: TyExpr
    value: Any = field(compare=False)

    def __str__(self):
        return f"uncaught exception carrying {render(self.value)}"


Outcome = Any  # Val | Failed | OutOfFuel | Stuck | Uncaught


def same_outcome(a, b) -> bool:
    """Outcome equality that compares base values and tuples structurally."""
    if type(a) is not type(b):
        return False
    if isinstance(a, Val):
        return _same_value(a.value, b.value)
    if isinstance(a, Uncaught):
        return a.ty == b.ty
    return a == b


def _same_value(x, y) -> bool:
    if isinstance(x, TupleV) and isinstance(y, TupleV):
        return len(x.items) == len(y.items) and all(map(_same_value, x.items, y.items))
    if isinstance(x, (bool, int)) and isinstance(y, (bool, int)):
        return type(x) is type(y) and x == y
    if isinstance(x, (Closure, ContValue)) or isinstance(y, (Closure, ContValue)):
        return type(x) is type(y)
    return x == y


# --------------------------------------------------------------------------
# fuel and nondeterminism


class FuelExhausted(Exception):
    def __init__(self, reason="fuel"):
        super().__init__(reason)
        self.reason = reason


class Fuel:
    __slots__ = ("left", "used")

    def __init__(self, n: int):
        if n <= 0:
            raise ValueError("fuel must be positive")
        self.left = n
        self.used = 0

    def tick(self):
        if self.left <= 0:
            raise FuelExhausted("fuel")
        self.left -= 1
        self.used += 1


def as_fuel(f) -> Fuel:
    return f if isinstance(f, Fuel) else Fuel(f)


BOOL_DOMAIN = (False, True)
INT_DOMAIN = (-1, 0, 1, 2, 3)


def domain_for(base: BaseKind, int_domain: Sequence[int] = INT_DOMAIN) -> tuple:
    return BOOL_DOMAIN if base is BaseKind.BOOL else tuple(int_domain)


class Oracle:
    """Supplies the values of ``*`` in evaluation order.

    Replays ``prefix`` and then answers ``domain[0]`` for further requests;
    every answer is recorded in ``taken`` together with the index it had in
    the domain.  More than ``limit`` requests raise :class:`FuelExhausted`.
    """

    def __init__(self, prefix: Sequence = (), domain: Sequence = BOOL_DOMAIN,
                 limit: Optional[int] = None):
        self.prefix = list(prefix)
        self.domain = tuple(domain)
        self.limit = limit
        self.taken: List = []

    def choose(self):
        i = len(self.taken)
        if self.limit is not None and i >= self.limit:
            raise FuelExhausted("choices")
        v = self.prefix[i] if i < len(self.prefix) else self.domain[0]
        self.taken.append(v)
        return v


class RandomOracle(Oracle):
    def __init__(self, rng: random.Random, domain: Sequence = BOOL_DOMAIN,
                 limit: Optional[int] = None):
        super().__init__((), domain, limit)
        self.rng = rng

    def choose(self):
        if self.limit is not None and len(self.taken) >= self.limit:
            raise FuelExhausted("choices")
        v = self.rng.choice(self.domain)
        self.taken.append(v)
        return v


def as_oracle(o, base: BaseKind = BaseKind.BOOL) -> Oracle:
    if o is None:
        return Oracle((), domain_for(base))
    if isinstance(o, Oracle):
        return o
    return Oracle(list(o), domain_for(base))
