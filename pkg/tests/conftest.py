from hypothesis import settings

settings.register_profile("repo", max_examples=100, derandomize=True, deadline=None, print_blob=True)
settings.load_profile("repo")


def pytest_terminal_summary(terminalreporter):
    from acceptance_log import LINES

    if LINES:
        terminalreporter.section("acceptance criteria")
        for line in LINES:
            terminalreporter.write_line(line)
