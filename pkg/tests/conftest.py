"""Terminal summary: one line per acceptance criterion."""

_CRITERIA = {}


def pytest_runtest_logreport(report):
    name = report.nodeid.split("::")[-1]
    if "test_criterion_" not in name:
        return
    key = name.split("test_criterion_")[1].split("[")[0]
    if report.when == "call" or (report.when == "setup" and report.skipped):
        outcome = report.outcome.upper()
        if hasattr(report, "wasxfail") and report.outcome == "skipped":
            outcome = "XFAIL (expected failure, see reason)"
        _CRITERIA[key] = outcome


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for key in sorted(_CRITERIA, key=lambda k: int(k.split("_")[0])):
        terminalreporter.write_line(f"criterion {key}: {_CRITERIA[key]}")
