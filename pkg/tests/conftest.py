import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

_ACCEPTANCE_LOG = []


def record_criterion(number: int, description: str, passed: bool, detail: str = ""):
    """Collect one acceptance-criterion verdict for the terminal summary."""
    _ACCEPTANCE_LOG.append((number, description, passed, detail))
    status = "PASS" if passed else "FAIL"
    line = f"ACCEPTANCE {number:>2} [{status}] {description}"
    if detail:
        line += f"  ({detail})"
    print(line)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE_LOG:
        return
    terminalreporter.section("acceptance criteria")
    for number, description, passed, detail in sorted(_ACCEPTANCE_LOG):
        status = "PASS" if passed else "FAIL"
        line = f"{number:>2} [{status}] {description}"
        if detail:
            line += f"  ({detail})"
        terminalreporter.write_line(line)
