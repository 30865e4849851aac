import pytest


def pytest_configure(config):
    config.addinivalue_line(
        "markers",
        "acceptance(name): criterion printed as its own pass/fail line",
    )
    config._acceptance_lines = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    name = marker.kwargs.get("name", item.name)
    lines = item.config._acceptance_lines
    if report.when == "call":
        status = "PASS" if report.passed else "FAIL"
        lines.append(f"{name}: {status}")
    elif report.when == "setup" and not report.passed:
        status = "SKIP" if report.skipped else "FAIL"
        lines.append(f"{name}: {status}")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "_acceptance_lines", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
