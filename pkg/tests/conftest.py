import re

from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

_CRITERION = re.compile(r"test_acceptance\.py::test_criterion_(\d+)_(\w+?)(?:\[|$)")
_verdicts = {}


def pytest_runtest_logreport(report):
    m = _CRITERION.search(report.nodeid)
    if not m or (report.when != "call" and not report.failed):
        return
    key = (int(m.group(1)), m.group(2).replace("_", " "))
    number = key[0]
    ok, names = _verdicts.get(number, (True, set()))
    _verdicts[number] = (ok and report.passed, names | {key[1]})


def pytest_terminal_summary(terminalreporter):
    if not _verdicts:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for number in sorted(_verdicts):
        ok, names = _verdicts[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  ({'; '.join(sorted(names))})")
