"""Shared pytest hooks.

Prints a one-line verdict per acceptance criterion after the run, collected
from the ``test_c<K>_*`` functions in test_acceptance.py.
"""

import re

_CRITERIA = (
    ("c1", "boundary sup-distance dominance (iid noise)"),
    ("c2", "interior sup-distance equivalence"),
    ("c3", "boundary point-prediction pattern (iid noise)"),
    ("c4", "boundary patterns under heteroskedastic chi-square noise"),
    ("c5", "exact small-instance oracles"),
    ("c6", "monotone correction property suite"),
    ("c7", "bootstrap variance sanity"),
    ("c8", "real-data backward prediction check"),
)

_NODE_RE = re.compile(r"test_acceptance\.py::test_(c\d+)")
_results = {}


def pytest_runtest_logreport(report):
    m = _NODE_RE.search(report.nodeid)
    if m is None:
        return
    tag = m.group(1)
    if report.failed:
        _results[tag] = "FAIL"
    elif report.skipped:
        _results.setdefault(tag, "SKIP")
    elif report.when == "call" and report.passed:
        _results.setdefault(tag, "PASS")


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for tag, label in _CRITERIA:
        status = _results.get(tag, "not run")
        terminalreporter.write_line(f"{status:>7}  {tag}: {label}")
