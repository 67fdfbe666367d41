import os
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from graphlayers import from_edges, decompose

DATA_DIR = Path(os.environ.get("GRAPHLAYERS_DATA", Path(__file__).parent.parent / "data"))


def dataset(name):
    """Path to a fetched public dataset, or a skip if it is not on disk."""
    path = DATA_DIR / name
    if not path.exists():
        pytest.skip(f"dataset {name} not fetched (run scripts/fetch_datasets.py)")
    return path


@pytest.fixture
def k4_path_graph():
    """K4 on 0..3 plus pendant path 3-4-5: layers (3, 1), vertex 3 cloned."""
    return from_edges([(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3), (3, 4), (4, 5)])


@pytest.fixture
def k4_path_decomposition(k4_path_graph):
    return decompose(k4_path_graph)


@pytest.fixture
def c6_graph():
    return from_edges([(i, (i + 1) % 6) for i in range(6)])


@pytest.fixture
def k5_graph():
    return from_edges([(u, v) for u in range(5) for v in range(u + 1, 5)])


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One pass/fail line per acceptance criterion."""
    seen = {}
    for status in ("passed", "failed", "skipped"):
        for rep in terminalreporter.stats.get(status, []):
            nodeid = getattr(rep, "nodeid", "")
            if "test_acceptance.py" in nodeid:
                name = nodeid.split("::")[-1]
                seen[name] = status.upper()
    if seen:
        terminalreporter.write_sep("-", "acceptance criteria")
        for name, status in seen.items():
            terminalreporter.write_line(f"ACCEPTANCE {name}: {status}")
