import sys

import pytest

from tab2img import fixtures
from tab2img.dataset import ingest


@pytest.fixture(scope="session")
def fixture_dir(tmp_path_factory):
    d = tmp_path_factory.mktemp("bench-csv")
    fixtures.write_all(d)
    return d


@pytest.fixture(scope="session")
def datasets(fixture_dir):
    """Callable: dataset name -> ingested TypedDataset, cached per session."""
    cache = {}

    def get(name):
        if name not in cache:
            spec = fixtures.CATALOG[name]
            cache[name] = ingest(fixture_dir / f"{name}.csv", spec.label_name,
                                 name=name)
        return cache[name]

    return get


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    # surface the acceptance verdict lines even though stdout is captured
    test_acceptance = sys.modules.get("test_acceptance") or sys.modules.get(
        "tests.test_acceptance"
    )
    lines = getattr(test_acceptance, "VERDICTS", [])
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for line in lines:
        terminalreporter.write_line(line)
