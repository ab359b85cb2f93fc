import pytest

from mddw.games import SUITES, run_suite


def test_reproducible():
    a = run_suite("consistency", 9, seed=3)
    b = run_suite("consistency", 9, seed=3)
    assert a.to_dict() | {"elapsed_s": 0} == b.to_dict() | {"elapsed_s": 0}


@pytest.mark.parametrize("suite,trials,opts", [
    ("completeness", 5, {}), ("consistency", 6, {}), ("soundness", 5, {}), ("robustness", 3, {}),
    ("otr", 2, {"samples": 300, "corpus_tokens": 3000}), ("distortion", 3000, {}), ("claim", 2, {"bogus": 12}),
    ("attempts", 300, {})])
def test_small_runs(suite, trials, opts):
    rep = run_suite(suite, trials, seed=1, **opts)
    assert rep.passed, rep.to_json()
    assert rep.suite == suite and suite in SUITES


def test_unknown_suite():
    with pytest.raises(ValueError):
        run_suite("nope", 1, 0)
