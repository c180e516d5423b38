import json
import pathlib
import sys

import pytest
from hypothesis import HealthCheck, settings

from storepass.eval._stack import RECURSION_LIMIT

HERE = pathlib.Path(__file__).parent

# the evaluators raise it on first use; do it up front so hypothesis sees a stable value
sys.setrecursionlimit(max(sys.getrecursionlimit(), RECURSION_LIMIT))

with open(HERE / "fuel_config.json") as fh:
    CONFIG = json.load(fh)

settings.register_profile(
    "thorough",
    max_examples=CONFIG["property_examples"],
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
    derandomize=True,
)
settings.load_profile("thorough")


@pytest.fixture(scope="session")
def config():
    return CONFIG


# acceptance criteria report: tests/test_acceptance.py records one verdict per
# criterion and the terminal summary prints them, so `pytest -v` output ends
# with a PASS/FAIL table

_VERDICTS = pytest.StashKey[dict]()


class Verdict:
    def __init__(self, number, title):
        self.number, self.title = number, title
        self.ok, self.detail = False, "did not finish"

    def done(self, ok, detail):
        self.ok, self.detail = bool(ok), detail
        return self.ok


@pytest.fixture
def criterion(request):
    store = request.config.stash.setdefault(_VERDICTS, {})

    def make(number, title):
        store[number] = Verdict(number, title)
        return store[number]
    return make


def pytest_terminal_summary(terminalreporter, config):
    store = config.stash.get(_VERDICTS, {})
    if not store:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for n in sorted(store):
        v = store[n]
        terminalreporter.write_line(
            f"{'PASS' if v.ok else 'FAIL'}  criterion {n}: {v.title} ({v.detail})")
