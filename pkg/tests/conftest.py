from report import RESULTS


def pytest_terminal_summary(terminalreporter):
    if not RESULTS:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for n in sorted(RESULTS):
        terminalreporter.write_line(RESULTS[n])
