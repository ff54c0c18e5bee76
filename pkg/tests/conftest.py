from pathlib import Path

import pytest

from ofdmaloss import config

ACCEPTANCE_LINES = []


def load_anchors():
    anchors = {}
    for line in (Path(__file__).parent / "fixtures" / "anchors.txt").read_text().splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            key, value = (p.strip() for p in line.split("="))
            anchors[key] = float(value)
    return anchors


@pytest.fixture(scope="session")
def anchors():
    return load_anchors()


@pytest.fixture(scope="session")
def sec3():
    return config.load_scenario("paper_sec3")[0]


@pytest.fixture(scope="session")
def sec4():
    return config.load_scenario("paper_sec4")[0]


@pytest.fixture(scope="session")
def sec4_ceiling():
    """Shadowed scenario with n_max from the ceiling rule (4)."""
    values = config.load_scenario("paper_sec4")[1]
    values = {k: v for k, v in values.items() if k != "n_max"}
    return config.scenario_from_values(values)


@pytest.fixture(scope="session")
def sec5():
    values = config.load_scenario("paper_sec5")[1]
    return config.multicell_from_values(values)


@pytest.fixture
def acceptance():
    """Record one PASS/FAIL line for an acceptance criterion."""
    def record(number, title, ok, detail):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} :: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
