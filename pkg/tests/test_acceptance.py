"""One test per acceptance check; each prints its PASS/FAIL line."""

import pytest

from qsdensity import acceptance

CHECKS = {fn.__name__.removeprefix("check_"): fn for fn in acceptance.ALL_CHECKS}


@pytest.mark.parametrize("name", list(CHECKS))
def test_acceptance(name):
    result = CHECKS[name]()
    print(result.line())
    assert result.passed, result.detail
