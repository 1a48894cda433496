import json
import os
from collections import defaultdict

import pytest

from kuchle.field import Field
from kuchle.fingeom import Geometry
from kuchle.structure import find_certified


def pytest_configure(config):
    config.addinivalue_line("markers", "heavy: long enumeration, run with KUCHLE_HEAVY=1")


def pytest_collection_modifyitems(config, items):
    if os.environ.get("KUCHLE_HEAVY"):
        return
    skip = pytest.mark.skip(reason="heavy; set KUCHLE_HEAVY=1 to run")
    for item in items:
        if "heavy" in item.keywords:
            item.add_marker(skip)


def _geometry(q):
    res = find_certified(Field(q), seed=0)
    assert res.instance is not None
    return Geometry(res.instance)


@pytest.fixture(scope="session")
def geom5():
    return _geometry(5)


@pytest.fixture(scope="session")
def geom7():
    return _geometry(7)


@pytest.fixture(scope="session")
def instance_file(tmp_path_factory):
    """Parameter file of the seed-0 certified instance over F_5."""
    res = find_certified(Field(5), seed=0)
    M, K = res.instance.params
    path = tmp_path_factory.mktemp("inst") / "f5.json"
    path.write_text(json.dumps({
        "field": "prime 5",
        "params": {"M": [str(int(x)) for x in M], "K": [str(int(x)) for x in K]},
    }))
    return path


# acceptance bookkeeping: criterion -> [(part, ok, detail)]
_CRITERIA = defaultdict(list)


@pytest.fixture
def record():
    def _record(criterion: int, part: str, ok: bool, detail: str = ""):
        _CRITERIA[criterion].append((part, bool(ok), detail))
        return ok

    return _record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        parts = _CRITERIA[n]
        ok = all(p[1] for p in parts)
        tr.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}")
        for part, pok, detail in parts:
            tr.write_line(f"    {'ok  ' if pok else 'FAIL'} {part}: {detail}")
