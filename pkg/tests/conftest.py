import numpy as np
import pytest

from prodgraph.model import Action, build_graph
from prodgraph.synthetic import wedge_log


@pytest.fixture
def wedge():
    log = wedge_log()
    return log, build_graph(log.events, Action.CLICK)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    rows = []
    for outcome in ("passed", "failed", "error", "skipped"):
        for rep in terminalreporter.stats.get(outcome, []):
            nodeid = getattr(rep, "nodeid", "")
            if "test_acceptance.py::test_criterion_" in nodeid and rep.when in ("call", "setup"):
                if rep.when == "setup" and outcome == "passed":
                    continue
                name = nodeid.split("test_criterion_")[1]
                rows.append((name, "PASS" if outcome == "passed" else "FAIL", rep.duration))
    if rows:
        terminalreporter.section("acceptance criteria")
        for name, verdict, secs in sorted(rows):
            num, _, label = name.partition("_")
            terminalreporter.write_line(f"criterion {int(num):2d} {verdict}  {label} ({secs:.2f}s)")
