import os

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", deadline=None, max_examples=500)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


_ACCEPTANCE = []


@pytest.fixture
def acceptance():
    """Record a criterion outcome: ``acceptance(number, title, checks, seconds, limit)``.

    ``checks`` maps a short label to a bool.  One line per criterion is
    printed now and again in the terminal summary.
    """

    def record(number, title, checks, seconds, limit):
        checks = dict(checks)
        checks[f"runtime {seconds:.2f}s < {limit:g}s"] = seconds < limit
        ok = all(checks.values())
        failed = [k for k, v in checks.items() if not v]
        line = f"criterion {number} {title}: {'PASS' if ok else 'FAIL'}"
        if failed:
            line += " (failed: " + "; ".join(failed) + ")"
        else:
            line += " (" + "; ".join(checks) + ")"
        _ACCEPTANCE.append(line)
        print(line)
        return ok, failed

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance")
        for line in sorted(_ACCEPTANCE):
            terminalreporter.write_line(line)
