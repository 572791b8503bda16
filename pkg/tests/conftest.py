import json
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from tubular.exactlat import ZZ2, vec
from tubular.model import Edge, TubularGroup, group_from_json

# derandomized so every run draws the same cases
settings.register_profile("fixed", derandomize=True, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("fixed")

DATA = Path(__file__).parent / "data"


def one_vertex(*edges, lattice=ZZ2):
    """Single-vertex group from (id, u, v) triples of integer pairs."""
    return TubularGroup([("v", lattice)],
                        [Edge(i, "v", "v", vec(*u), vec(*w)) for i, u, w in edges])


def load(name):
    return group_from_json(json.loads((DATA / f"{name}.json").read_text()))


@pytest.fixture
def primitive_target():
    return load("primitive_target")


@pytest.fixture
def recurrent():
    return load("recurrent")


@pytest.fixture
def non_recurrent():
    return load("non_recurrent")


@pytest.fixture
def non_integral():
    return load("non_integral")


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    if mod and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in mod.RESULTS:
            terminalreporter.write_line(line)
