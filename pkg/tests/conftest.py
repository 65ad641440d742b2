import acceptance_report


def pytest_terminal_summary(terminalreporter):
    if not acceptance_report.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for _, res in sorted(acceptance_report.RESULTS.items()):
        terminalreporter.write_line(res.line())
        for row in res.table:
            terminalreporter.write_line("    " + row)
