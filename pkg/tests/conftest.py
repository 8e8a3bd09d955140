import contextlib
import io
import json
import time

import pytest

from flaggrowth import cli

ACCEPTANCE = {}


@pytest.fixture(scope="session")
def acceptance():
    return ACCEPTANCE


def run_cli(argv):
    """Run the CLI in-process; returns (exit code, stdout text)."""
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = cli.main(argv)
    return code, buf.getvalue()


@pytest.fixture(scope="session")
def rp2_runs():
    """Two independent ``repro rp2`` runs with seed 0 and no cache."""
    outs = []
    for _ in range(2):
        t0 = time.perf_counter()
        code, text = run_cli(["repro", "rp2", "--seed", "0", "--cache-dir", ""])
        outs.append((code, text, time.perf_counter() - t0))
    return outs


@pytest.fixture(scope="session")
def rp2_result(rp2_runs):
    return json.loads(rp2_runs[0][1])


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"criterion {key}: {'PASS' if ok else 'FAIL'}  {detail}")
