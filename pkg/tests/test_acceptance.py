"""Every acceptance criterion at its stated tolerance, one line per check.

The lines are printed in the terminal summary.  Checks flagged as
unattainable are strict xfails: they must keep failing for the documented
reason, and an unexpected pass is reported.
"""

import pytest

from catgrav import acceptance
from conftest import ACCEPTANCE_LINES

SUITES = {s.__name__: s for s in acceptance.SUITES}


@pytest.fixture(scope="module")
def results():
    cache = {}

    def run(name):
        if name not in cache:
            cache[name] = SUITES[name]()
            ACCEPTANCE_LINES.extend(c.line() for c in cache[name])
        return cache[name]

    return run


@pytest.mark.parametrize("suite", list(SUITES))
def test_criterion(results, suite):
    checks = results(suite)
    for c in checks:
        print(c.line())
    failed = [c.line() for c in checks if c.attainable and not c.passed]
    assert not failed, "\n".join(failed)


UNATTAINABLE = [("environment_checks", "Q >= 1e9"),
                ("environment_checks", "kappa_b order of magnitude")]


@pytest.mark.parametrize("suite, name", UNATTAINABLE)
@pytest.mark.xfail(strict=True, reason="stated target is inconsistent with the stated formula")
def test_unattainable(results, suite, name):
    (check,) = [c for c in results(suite) if c.name == name]
    assert not check.attainable
    assert check.passed, check.line()
