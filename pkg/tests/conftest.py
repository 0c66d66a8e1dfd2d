import time
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import settings

from gammariesz.group import finite_dihedral, infinite_dihedral
from gammariesz.signal import GammaSignal

settings.register_profile("default", max_examples=50, deadline=None)
settings.load_profile("default")


@pytest.fixture
def dinf():
    return infinite_dihedral()


@pytest.fixture
def z4():
    return finite_dihedral(4)


@pytest.fixture
def z6():
    return finite_dihedral(6)


@pytest.fixture
def f38(dinf):
    """D_inf generator with f1_hat = 3/8 and fm1_hat = z/8."""
    return GammaSignal(dinf, [{0: Fraction(3, 8)}, {-1: Fraction(1, 8)}])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# -- acceptance reporting -------------------------------------------------------
#
# test_acceptance.py records one verdict per criterion; the lines are printed in
# the terminal summary (so they appear without -s).  The last criterion also
# carries the wall-clock budget of the whole run.

SUITE_BUDGET_SECONDS = 60.0


def pytest_configure(config):
    config._acceptance = {}
    config._suite_start = time.perf_counter()


@pytest.fixture
def acceptance(request):
    results = request.config._acceptance

    def record(number: int, title: str, passed: bool, detail: str):
        results[number] = (title, bool(passed), detail)
        print(f"CRITERION {number} {'PASS' if passed else 'FAIL'}: {title} -- {detail}")

    return record


def pytest_sessionfinish(session, exitstatus):
    config = session.config
    elapsed = time.perf_counter() - config._suite_start
    config._suite_elapsed = elapsed
    results = config._acceptance
    if 5 in results:
        title, passed, detail = results[5]
        within = elapsed < SUITE_BUDGET_SECONDS
        results[5] = (title, passed and within, f"{detail}; suite runtime {elapsed:.1f} s (< {SUITE_BUDGET_SECONDS:.0f} s)")
        if not within:
            session.exitstatus = pytest.ExitCode.TESTS_FAILED


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = getattr(config, "_acceptance", {})
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        title, passed, detail = results[number]
        terminalreporter.write_line(f"CRITERION {number} {'PASS' if passed else 'FAIL'}: {title} -- {detail}")
