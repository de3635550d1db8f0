import random

import pytest

from sdcred import bench
from sdcred.algebra import gen_rsa_group


@pytest.fixture
def rng():
    return random.Random(0x5D)


@pytest.fixture(scope="session")
def cl_group():
    # one 3072-bit group for the whole run; safe-prime search dominates
    return gen_rsa_group(3072, 35, random.Random(2024))


@pytest.fixture(scope="session")
def key_cache(cl_group):
    return bench.KeyCache(random.Random(77), cl_group=cl_group)


_RESULTS = pytest.StashKey[dict]()


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion reported in the summary")
    config.stash[_RESULTS] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.when != "call":
        return
    number, title = marker.args
    details = [v for k, v in item.user_properties if k == "detail"]
    status = "PASS" if report.passed else "FAIL"
    item.config.stash[_RESULTS][number] = (status, title, details)


def pytest_terminal_summary(terminalreporter, config):
    results = config.stash.get(_RESULTS, {})
    if not results:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for number in sorted(results):
        status, title, details = results[number]
        terminalreporter.write_line(f"{status} criterion {number}: {title}")
        for d in details:
            terminalreporter.write_line(f"    {d}")
