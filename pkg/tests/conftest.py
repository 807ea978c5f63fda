"""Shared pytest hooks: acceptance-criteria summary lines."""


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = {}
    for outcome, status in (("passed", "PASS"), ("failed", "FAIL"), ("error", "FAIL")):
        for report in terminalreporter.stats.get(outcome, []):
            nodeid = getattr(report, "nodeid", "")
            if "test_acceptance.py" in nodeid and "::" in nodeid:
                name = nodeid.split("::")[-1].removeprefix("test_").replace("_", "-")
                # a FAIL in any phase outranks a PASS recorded for another phase
                if lines.get(name) != "FAIL":
                    lines[name] = status
    if lines:
        terminalreporter.section("acceptance criteria")
        for name in sorted(lines):
            terminalreporter.write_line(f"[ACCEPTANCE] {name}: {lines[name]}")
