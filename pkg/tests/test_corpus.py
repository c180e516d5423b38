from importlib import resources

import pytest

from storepass.corpus import benchmarks, entries, examples, get, load_manifest, machines


def test_group_sizes():
    assert len(benchmarks()) == 12
    assert sum(e.expected == "safe" for e in benchmarks()) == 6
    assert {e.id for e in benchmarks() if e.expected == "unsafe"} == \
        {e.id + "_ng" for e in benchmarks() if e.expected == "safe"}
    assert sum(e.source is not None for e in benchmarks()) == 8
    assert len(machines()) >= 8
    assert len(entries()) == len(benchmarks()) + len(examples()) + len(machines())


def test_ids_are_unique_and_every_file_is_listed():
    ids = [e.id for e in load_manifest()]
    assert len(ids) == len(set(ids))
    listed = {n for e in load_manifest() for n in (e.file, e.source, e.target) if n}
    on_disk = {p.name for p in resources.files("storepass.corpus").joinpath("programs").iterdir()}
    assert listed == on_disk


@pytest.mark.parametrize("entry", entries(), ids=lambda e: e.id)
def test_every_program_parses(entry):
    if entry.group == "machine":
        assert entry.machine().program
    elif entry.group == "benchmark":
        entry.program("target")
        if entry.source:
            entry.program("source")
    else:
        entry.program()
        entry.type_env()


def test_unknown_program():
    with pytest.raises(KeyError):
        get("no_such_program")
    with pytest.raises(KeyError):
        get("m_ok1").text("target")
