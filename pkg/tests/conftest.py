"""Shared test plumbing.

Acceptance tests report each criterion through `record_criterion`; the
terminal-summary hook prints the scoreboard after the run, so the
one-line-per-criterion output survives pytest's capture settings.
"""

_criteria: list[tuple[str, bool]] = []


def record_criterion(label: str, ok: bool) -> None:
    _criteria.append((label, ok))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for label, ok in _criteria:
        terminalreporter.write_line(f"ACCEPTANCE {label}: {'PASS' if ok else 'FAIL'}")
