"""Per-criterion PASS/FAIL summary for the acceptance suite.

The acceptance tests are named test_NN_<label>; after the run one line per
criterion is written to the terminal so the verdicts are visible without
digging through captured output.
"""
import re

_ACCEPTANCE = re.compile(r"test_acceptance\.py::test_(\d+)_(\w+)")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    verdicts = {}
    for status, label in (("passed", "PASS"), ("failed", "FAIL"), ("error", "FAIL")):
        for report in terminalreporter.stats.get(status, []):
            match = _ACCEPTANCE.search(getattr(report, "nodeid", ""))
            if match and getattr(report, "when", "call") == "call":
                verdicts[int(match.group(1))] = (match.group(2), label)
    if not verdicts:
        return
    terminalreporter.write_line("")
    terminalreporter.write_sep("-", "acceptance criteria")
    for num in sorted(verdicts):
        name, label = verdicts[num]
        terminalreporter.write_line(
            f"ACCEPTANCE {num:02d} {name.replace('_', ' ')}: {label}")
