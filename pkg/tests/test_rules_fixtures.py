"""Run every hand-derived rule fixture as its own test."""
import pytest

from rules_fixtures import FIXTURES


@pytest.mark.parametrize("name,fn", FIXTURES, ids=[name for name, _ in FIXTURES])
def test_rule_fixture(name, fn):
    fn()


def test_fixture_suite_is_large_enough():
    assert len(FIXTURES) >= 40
