import pytest

from randlcm.primes import build_spf


@pytest.fixture(scope="session")
def spf_small():
    return build_spf(10**4)


def trial_division(m):
    """Independent factorization oracle: repeated division by 2, 3, 5, ..."""
    out = []
    d = 2
    while d * d <= m:
        e = 0
        while m % d == 0:
            m //= d
            e += 1
        if e:
            out.append((d, e))
        d += 1
    if m > 1:
        out.append((m, 1))
    return tuple(out)


def is_prime_slow(m):
    return m >= 2 and all(m % d for d in range(2, int(m**0.5) + 1))


# --- one status line per acceptance criterion -------------------------------

_criteria: dict[str, list[str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(label): acceptance criterion this test decides")


def pytest_runtest_logreport(report):
    item_marker = getattr(report, "criterion", None)
    if item_marker is None:
        return
    if report.when == "call" or report.outcome != "passed":
        _criteria.setdefault(item_marker, []).append(report.outcome)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    marker = item.get_closest_marker("criterion")
    if marker is not None:
        outcome.get_result().criterion = marker.args[0]


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for label, outcomes in _criteria.items():
        status = "PASS" if all(o == "passed" for o in outcomes) else "FAIL"
        terminalreporter.write_line(f"{status}  {label}")
