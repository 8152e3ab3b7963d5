from __future__ import annotations

import json

import pytest

from lagosc.suites import SUITES, run_suite, run_trial


@pytest.mark.parametrize("name", sorted(SUITES))
def test_two_trials_pass(name):
    for k in range(2):
        out = run_trial(name, 42, k)
        assert out.ok, out.dump(name, 42)
        assert out.checks


def test_trials_are_reproducible():
    a = run_trial("routes", 7, 3)
    b = run_trial("routes", 7, 3)
    assert a.n == b.n
    assert [c.as_dict() for c in a.checks] == [c.as_dict() for c in b.checks]


def test_fixed_dimension():
    assert run_trial("duality", 42, 0, n=3).n == 3


def test_dump_is_json():
    out = run_trial("comparison", 42, 1)
    text = json.dumps(out.dump("comparison", 42))
    back = json.loads(text)
    assert back["instance"]["pY"]["n"] == out.n


def test_report_shape():
    rep = run_suite("compidx-props", 20, seed=1)
    assert rep["trials"] == 20 and rep["failures"] == [] and rep["checks"] == 20 * 7


def test_unknown_suite():
    with pytest.raises(KeyError):
        run_suite("nope", 1)
