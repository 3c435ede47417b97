import os
import re
import sys

sys.path.insert(0, os.path.dirname(__file__))

_CRITERION = re.compile(r"test_criterion_(\d+)_")
_outcomes = {}


def pytest_runtest_logreport(report):
    m = _CRITERION.search(report.nodeid)
    if not m or (report.when != "call" and report.passed):
        return
    number = int(m.group(1))
    name = report.nodeid.split("::")[-1]
    if report.passed:
        status = "pass"
    elif hasattr(report, "wasxfail"):
        status = "xfail: " + report.wasxfail
    elif report.skipped:
        status = "skipped"
    else:
        status = "fail"
    _outcomes.setdefault(number, {})[name] = status


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_outcomes):
        parts = _outcomes[number]
        bad = {name: status for name, status in parts.items() if status != "pass"}
        verdict = "PASS" if not bad else "FAIL"
        detail = "; ".join(f"{name}: {status}" for name, status in sorted(bad.items()))
        line = f"criterion {number:2d}: {verdict}"
        terminalreporter.write_line(line + (f"  ({detail})" if detail else ""))
