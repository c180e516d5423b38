"""Bounded reachability, differential testing, and program generation."""
from .generate import GenConfig, GenerationError, closure_store_sizes, gen_well_typed, generation_stats
from .harness import (
    FAIL_REACHABLE, INCONCLUSIVE, NO_FAIL, DiffPair, DiffReport, Path,
    ReachResult, check_reach, diff_test, explore, replay,
)

__all__ = [
    "GenConfig", "GenerationError", "closure_store_sizes", "gen_well_typed", "generation_stats",
    "FAIL_REACHABLE", "INCONCLUSIVE", "NO_FAIL", "DiffPair", "DiffReport", "Path",
    "ReachResult", "check_reach", "diff_test", "explore", "replay",
]
