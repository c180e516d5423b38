"""Ownership types, ordered type environments, and their basic operations."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Tuple, Union

_ids = itertools.count()


class SizeVar:
    """Store size of a function type not yet fixed by the derivation.

    A union-find cell compared by identity.  Unification either links two
    cells or solves a cell to an int; :func:`zonk` replaces cells by ints."""

    __slots__ = ("value", "link", "id")

    def __init__(self):
        self.value: Optional[int] = None
        self.link: Optional["SizeVar"] = None
        self.id = next(_ids)

    def find(self) -> "SizeVar":
        v = self
        while v.link is not None:
            v = v.link
        return v

    def __repr__(self):
        r = self.find()
        return f"?n{r.id}" if r.value is None else str(r.value)


Size = Union[int, SizeVar]


def resolve_size(n: Size) -> Optional[int]:
    if isinstance(n, SizeVar):
        return n.find().value
    return n


def force_size(n: Size) -> int:
    """The size, fixing an undetermined one to 0 the first time it is needed."""
    if isinstance(n, SizeVar):
        r = n.find()
        if r.value is None:
            r.value = 0
        return r.value
    return n


@dataclass(frozen=True)
class BaseT:
    def __str__(self):
        return "b"


@dataclass(frozen=True)
class UnitT:
    def __str__(self):
        return "unit"


@dataclass(frozen=True)
class RefT:
    inner: Union[BaseT, "RefT"]

    def __str__(self):
        return f"ref {self.inner}"


@dataclass(frozen=True)
class FunT:
    """tau_1 ... tau_k -[n]-> tau: a closure owning ``store`` cells."""

    params: Tuple["NormalType", ...]
    store: Size
    ret: "NormalType"

    def __str__(self):
        dom = str(self.params[0]) if len(self.params) == 1 else \
            "(" + ", ".join(map(str, self.params)) + ")"
        if isinstance(self.params[0], FunT) and len(self.params) == 1:
            dom = f"({dom})"
        return f"{dom} -[{self.store}]-> {self.ret}"


@dataclass(frozen=True)
class RecFunT:
    """Type of a recursive function inside its own body: it uses, but does
    not own, the store described by ``captured``."""

    params: Tuple["NormalType", ...]
    captured: "TypeEnv"
    ret: "NormalType"

    def __str__(self):
        dom = ", ".join(map(str, self.params))
        return f"({dom}) -[{self.captured}]-> {self.ret}"


RefType = Union[BaseT, RefT]
NormalType = Union[UnitT, BaseT, RefT, FunT]
FullType = Union[NormalType, RecFunT]

BASE = BaseT()
UNIT = UnitT()


def Fun(arg: NormalType, n: Size, ret: NormalType) -> FunT:
    return FunT((arg,), n, ret)


class TypeEnv:
    """Ordered sequence of distinct bindings ``x : tau``."""

    __slots__ = ("bindings", "_index")

    def __init__(self, bindings: Iterable[Tuple[str, FullType]] = ()):
        self.bindings: Tuple[Tuple[str, FullType], ...] = tuple(bindings)
        self._index = {}
        for i, (x, _) in enumerate(self.bindings):
            if x in self._index:
                raise ValueError(f"duplicate binding for {x!r} in type environment")
            self._index[x] = i

    def __iter__(self) -> Iterator[Tuple[str, FullType]]:
        return iter(self.bindings)

    def __len__(self):
        return len(self.bindings)

    def __contains__(self, x: str) -> bool:
        return x in self._index

    def __getitem__(self, x: str) -> FullType:
        return self.bindings[self._index[x]][1]

    def get(self, x: str) -> Optional[FullType]:
        i = self._index.get(x)
        return None if i is None else self.bindings[i][1]

    def names(self) -> Tuple[str, ...]:
        return tuple(x for x, _ in self.bindings)

    def extend(self, x: str, t: FullType) -> "TypeEnv":
        return TypeEnv(self.bindings + ((x, t),))

    def concat(self, other: "TypeEnv") -> "TypeEnv":
        return TypeEnv(self.bindings + other.bindings)

    def remove(self, x: str) -> "TypeEnv":
        if x not in self._index:
            return self
        return TypeEnv(b for b in self.bindings if b[0] != x)

    def __eq__(self, other):
        return isinstance(other, TypeEnv) and self.bindings == other.bindings

    def __hash__(self):
        return hash(self.bindings)

    def __repr__(self):
        return f"TypeEnv({list(self.bindings)!r})"

    def __str__(self):
        if not self.bindings:
            return "∅"
        return ", ".join(f"{x}:{t}" for x, t in self.bindings)


EMPTY = TypeEnv()


def sharable(t: FullType) -> bool:
    """Values of sharable types may be duplicated freely."""
    if isinstance(t, (BaseT, UnitT, RecFunT)):
        return True
    if isinstance(t, RefT):
        return False
    if isinstance(t, FunT):
        return force_size(t.store) == 0
    raise TypeError(f"not an ownership type: {t!r}")


def env_drop(env: TypeEnv, x: str) -> TypeEnv:
    """Remove x's binding if its type is not sharable (reading x uses it up)."""
    if x not in env:
        raise KeyError(x)
    return env if sharable(env[x]) else env.remove(x)


def env_drop_if(env: TypeEnv, x: str, t: FullType) -> TypeEnv:
    """Remove x's binding if the given type ``t`` is not sharable."""
    if x not in env:
        raise KeyError(x)
    return env if sharable(t) else env.remove(x)


def split_env(env: TypeEnv, names) -> Tuple[TypeEnv, TypeEnv]:
    """Bindings in ``names`` go left; sharable ones are also kept right;
    everything else stays right.  Order is preserved on both sides."""
    names = set(names)
    left, right = [], []
    for x, t in env:
        if x in names:
            left.append((x, t))
            if sharable(t):
                right.append((x, t))
        else:
            right.append((x, t))
    return TypeEnv(left), TypeEnv(right)


def ref_size(t: Union[RefType, UnitT]) -> int:
    if isinstance(t, UnitT):
        return 0
    if isinstance(t, BaseT):
        return 1
    if isinstance(t, RefT):
        return ref_size(t.inner)
    raise TypeError(t)


def store_size(t: Union[FullType, TypeEnv]) -> int:
    """Number of base cells owned by a value of type t (or an environment)."""
    if isinstance(t, TypeEnv):
        return sum(store_size(ty) for _, ty in t)
    if isinstance(t, (BaseT, UnitT, RecFunT)):
        return 0
    if isinstance(t, RefT):
        return ref_size(t.inner)
    if isinstance(t, FunT):
        return force_size(t.store)
    raise TypeError(t)


def is_subsequence(sub: TypeEnv, env: TypeEnv) -> bool:
    """Whether ``sub`` lists some of ``env``'s bindings, in the same order,
    with unifiable types."""
    it = iter(env.bindings)
    for x, t in sub.bindings:
        for y, u in it:
            if x == y:
                if not unify(t, u):
                    return False
                break
        else:
            return False
    return True


def zonk(t: FullType) -> FullType:
    """Replace solved size variables by ints (unsolved ones default to 0)."""
    if isinstance(t, FunT):
        n = resolve_size(t.store)
        return FunT(tuple(zonk(p) for p in t.params), 0 if n is None else n, zonk(t.ret))
    if isinstance(t, RecFunT):
        return RecFunT(tuple(zonk(p) for p in t.params), zonk_env(t.captured), zonk(t.ret))
    if isinstance(t, RefT):
        return RefT(zonk(t.inner))
    return t


def zonk_env(env: TypeEnv) -> TypeEnv:
    return TypeEnv((x, zonk(t)) for x, t in env)


def unify(a: FullType, b: FullType) -> bool:
    """Structural equality that may solve size variables."""
    if isinstance(a, FunT) and isinstance(b, FunT):
        if len(a.params) != len(b.params):
            return False
        if not all(unify(p, q) for p, q in zip(a.params, b.params)):
            return False
        if not _unify_size(a.store, b.store):
            return False
        return unify(a.ret, b.ret)
    if isinstance(a, RecFunT) and isinstance(b, RecFunT):
        return (len(a.params) == len(b.params)
                and all(unify(p, q) for p, q in zip(a.params, b.params))
                and unify_env(a.captured, b.captured)
                and unify(a.ret, b.ret))
    if isinstance(a, RefT) and isinstance(b, RefT):
        return unify(a.inner, b.inner)
    return type(a) is type(b) and isinstance(a, (BaseT, UnitT))


def unify_env(a: TypeEnv, b: TypeEnv) -> bool:
    if a.names() != b.names():
        return False
    return all(unify(s, t) for (_, s), (_, t) in zip(a, b))


def _unify_size(m: Size, n: Size) -> bool:
    if isinstance(m, SizeVar):
        m = m.find()
        if m.value is not None:
            m = m.value
    if isinstance(n, SizeVar):
        n = n.find()
        if n.value is not None:
            n = n.value
    if isinstance(m, SizeVar) and isinstance(n, SizeVar):
        if m is not n:
            m.link = n
        return True
    if isinstance(m, SizeVar):
        m.value = n
        return True
    if isinstance(n, SizeVar):
        n.value = m
        return True
    return m == n
