"""Shared fixtures and the acceptance-summary hook."""

import pytest

import pyrewatch as pw


def available_backends():
    names = ["numpy"]
    try:
        import numba  # noqa: F401

        names.append("numba")
    except ImportError:
        pass
    return names


BACKENDS = available_backends()


@pytest.fixture(scope="session")
def params():
    """Default scenario: the catalog configuration every anchor refers to."""
    return pw.scenario_from_dict({})


@pytest.fixture(scope="session")
def backends():
    return BACKENDS


@pytest.fixture()
def rng():
    import numpy as np

    return np.random.default_rng(20260815)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One pass/fail line per acceptance criterion at the end of the run."""
    lines = {}
    for status in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(status, []):
            name = getattr(rep, "nodeid", "")
            if "test_acceptance.py::test_c" not in name:
                continue
            short = name.split("::")[-1]
            verdict = "PASS" if status == "passed" else "FAIL"
            lines[short] = verdict
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for short in sorted(lines):
        terminalreporter.write_line(f"{lines[short]:4s}  {short}")
