"""Ownership typing for the reference language and simple typing for the
target language and the extended calculi."""
from .ownership import Judgment, NodeInfo, OwnershipError, from_annotation, typecheck_refl
from .simple import (
    S_BASE, S_SYM, S_UNIT, SBase, SFun, SimpleTypeError, SRef, SSym, STuple,
    SUnit, SVar, base_tuple, tuple_type, type_equal, typecheck_ext,
    typecheck_target,
)
from .types import (
    BASE, EMPTY, UNIT, BaseT, FullType, Fun, FunT, NormalType, RecFunT, RefT,
    TypeEnv, UnitT, env_drop, env_drop_if, is_subsequence, sharable,
    split_env, store_size,
)

__all__ = [
    "Judgment", "NodeInfo", "OwnershipError", "from_annotation", "typecheck_refl",
    "S_BASE", "S_SYM", "S_UNIT", "SBase", "SFun", "SimpleTypeError", "SRef", "SSym",
    "STuple", "SUnit", "SVar", "base_tuple", "tuple_type", "type_equal",
    "typecheck_ext", "typecheck_target", "BASE", "EMPTY", "UNIT", "BaseT",
    "FullType", "Fun", "FunT", "NormalType", "RecFunT", "RefT", "TypeEnv", "UnitT",
    "env_drop", "env_drop_if", "is_subsequence", "sharable", "split_env", "store_size",
]
