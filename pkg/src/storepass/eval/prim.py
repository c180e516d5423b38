"""Primitive operators on base values.

Booleans and integers are kept apart: comparisons and logic on integers
answer 1/0 so that programs over the integer base kind never see a bool."""
from __future__ import annotations

from .values import truthy


class PrimError(Exception):
    pass


def _int(v):
    if isinstance(v, bool) or not isinstance(v, int):
        raise PrimError(f"expected an integer, got {v!r}")
    return v


def _base(v):
    if not isinstance(v, (bool, int)):
        raise PrimError(f"expected a base value, got {v!r}")
    return v


def apply_op(op: str, args: list):
    if op == "not":
        (a,) = args
        _base(a)
        if isinstance(a, bool):
            return not a
        return 0 if a else 1
    a, b = (_base(x) for x in args)
    ints = not isinstance(a, bool)
    if ints != (not isinstance(b, bool)):
        raise PrimError(f"operator {op} applied to mixed base values")

    def out(flag: bool):
        return int(flag) if ints else flag

    if op == "&&":
        return out(truthy(a) and truthy(b))
    if op == "||":
        return out(truthy(a) or truthy(b))
    if op == "=":
        return out(a == b)
    if op == "<>":
        return out(a != b)
    if op == "+":
        return _int(a) + _int(b)
    if op == "-":
        return _int(a) - _int(b)
    if op == "<":
        return out(_int(a) < _int(b))
    if op == "<=":
        return out(_int(a) <= _int(b))
    if op == ">":
        return out(_int(a) > _int(b))
    if op == ">=":
        return out(_int(a) >= _int(b))
    raise PrimError(f"unknown operator {op}")
