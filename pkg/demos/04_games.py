"""Run the security experiments at a reduced size and print their reports."""

from mddw.games import run_suite

for suite, trials, opts in [
    ("completeness", 20, {}),
    ("consistency", 30, {}),
    ("soundness", 50, {}),
    ("robustness", 10, {}),
    ("otr", 10, {"samples": 500, "corpus_tokens": 10_000}),
    ("distortion", 20_000, {}),
    ("claim", 10, {"bogus": 50}),
    ("attempts", 2000, {}),
]:
    rep = run_suite(suite, trials, seed=11, **opts)
    print(f"{suite:12s} passed={rep.passed!s:5s} failures={rep.failures:3d} "
          f"time={rep.elapsed_s:5.1f}s {rep.stats}")
