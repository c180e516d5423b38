"""Run deeply recursive evaluators on a worker thread with a large stack."""
from __future__ import annotations

import sys
import threading
from concurrent.futures import ThreadPoolExecutor

STACK_BYTES = 512 * 1024 * 1024
RECURSION_LIMIT = 400_000

_pool = None
_lock = threading.Lock()
_worker = threading.local()


def _init():
    _worker.active = True


def _get_pool() -> ThreadPoolExecutor:
    global _pool
    with _lock:
        if _pool is None:
            old = threading.stack_size()
            threading.stack_size(STACK_BYTES)
            try:
                _pool = ThreadPoolExecutor(max_workers=1, initializer=_init,
                                           thread_name_prefix="storepass-eval")
                # force the worker to start while the large stack size is set
                _pool.submit(lambda: None).result()
            finally:
                threading.stack_size(old)
        return _pool


def run_deep(fn, *args, **kwargs):
    """Call ``fn`` on the big-stack worker (directly if already there)."""
    if getattr(_worker, "active", False):
        return fn(*args, **kwargs)
    if sys.getrecursionlimit() < RECURSION_LIMIT:
        sys.setrecursionlimit(RECURSION_LIMIT)
    return _get_pool().submit(fn, *args, **kwargs).result()
