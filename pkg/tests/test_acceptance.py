"""Acceptance criteria, one test per criterion.

Each test prints a single ``[PASS]``/``[FAIL]`` line, even under pytest's
output capture.  Run the file directly (``python3 tests/test_acceptance.py``)
for just those lines.
"""

from __future__ import annotations

import math
import sys
import time
from collections import Counter

import pytest

from lagosc import hamgen
from lagosc.lagrangian import constant_path, vertical_plane
from lagosc.maslov import maslov_crossing_oracle, maslov_pair, monotone_maslov
from lagosc.oscnum import (
    dual_oscillation_number_partition,
    oscillation_number_partition,
    oscillation_pair,
    rank_drop_pair,
)
from lagosc.suites import run_trial

SEED = 42


def report(capsys, number, title, ok, detail=""):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:2d}: {title}" + (f" ({detail})" if detail else "")
    if capsys is None:
        print(line)
    else:
        with capsys.disabled():
            print("\n" + line)
    return ok


def tally(suite, trials, n=None, names=None, seed=SEED):
    """Run trials and count passed/failed checks by name; errors count as failures."""
    passed, failed, errors = Counter(), Counter(), []
    for k in range(trials):
        out = run_trial(suite, seed, k, n)
        if out.error:
            errors.append((k, out.error))
        for c in out.checks:
            if names is None or c.name in names:
                (passed if c.ok else failed)[c.name] += 1
    return passed, failed, errors


def summary(passed, failed, errors):
    text = f"{sum(passed.values())} checks passed, {sum(failed.values())} failed"
    if failed:
        text += f" {dict(failed)}"
    if errors:
        text += f", {len(errors)} trial errors, first: {errors[0]}"
    return text


def c1_rotation(capsys=None):
    start = time.perf_counter()
    p = hamgen.rotation_path(1, interval=(0.0, 1.5 * math.pi))
    E = constant_path(vertical_plane(1), p.t)
    mono = monotone_maslov(E, p)
    routes = {
        "lidskii": oscillation_pair(p),
        "partition": (oscillation_number_partition(p).value, dual_oscillation_number_partition(p).value),
        "rank_drop": rank_drop_pair(p),
        "maslov": maslov_pair(E, p),
        "crossing": (maslov_crossing_oracle(E, p).value, maslov_crossing_oracle(E, p, dual=True).value),
        "monotone_maslov": (mono["Mas"], mono["Mas_star"]),
    }
    elapsed = time.perf_counter() - start
    ok = all(v == (1, 2) for v in routes.values()) and elapsed < 1.0
    return report(capsys, 1, "rotation benchmark N=1, N*=2, Mas=1, Mas*=2 by every route", ok,
                  f"{routes if not ok else 'all routes (1, 2)'}, {elapsed:.2f} s")


def c2_compidx(capsys=None):
    start = time.perf_counter()
    passed, failed, errors = Counter(), Counter(), []
    for n in range(1, 6):
        p, f, e = tally("compidx-props", 500, n=n)
        passed += p
        failed += f
        errors += e
    elapsed = time.perf_counter() - start
    ok = not failed and not errors and elapsed < 30.0
    return report(capsys, 2, "comparative index properties, 500 pairs per n = 1..5", ok,
                  f"{summary(passed, failed, errors)}, {elapsed:.1f} s")


def c3_duality(capsys=None):
    passed, failed, errors = tally("duality", 200)
    ok = not failed and not errors and passed["duality"] == 200
    return report(capsys, 3, "duality on 200 random flow paths", ok, summary(passed, failed, errors))


def c4_routes(capsys=None):
    start = time.perf_counter()
    passed, failed, errors = tally("routes", 100)
    elapsed = time.perf_counter() - start
    ok = not failed and not errors and passed["crossing"] == 100 and elapsed < 120.0
    return report(capsys, 4, "route agreement on 100 instances and 100 Maslov pairs", ok,
                  f"{summary(passed, failed, errors)}, rank-drop on {passed['rank_drop']} monotone paths, "
                  f"{elapsed:.1f} s")


MASLOV_TRIALS = {}


def _maslov_tally():
    if not MASLOV_TRIALS:
        MASLOV_TRIALS["result"] = tally("maslov-identities", 100)
    return MASLOV_TRIALS["result"]


def _subset(result, names):
    passed, failed, errors = result
    keep = lambda c: Counter({k: v for k, v in c.items() if k in names})  # noqa: E731
    return keep(passed), keep(failed), errors


def c5_similarity(capsys=None):
    passed, failed, errors = _subset(_maslov_tally(), {"similarity"})
    ok = not failed and not errors and passed["similarity"] == 100
    return report(capsys, 5, "Gamma similar to -W_S within 1e-8 at every node of 100 pairs", ok,
                  summary(passed, failed, errors))


def c6_flipping(capsys=None):
    names = {"flipping", "rank_w_difference"}
    passed, failed, errors = _subset(_maslov_tally(), names)
    ok = not failed and not errors and all(passed[k] == 100 for k in names)
    return report(capsys, 6, "flipping and Mas* - Mas = rank W change on 100 pairs", ok,
                  summary(passed, failed, errors))


def c7_comparison(capsys=None):
    sep = tally("separation", 100)
    cmp_ = tally("comparison", 100)
    passed = sep[0] + cmp_[0]
    failed = sep[1] + cmp_[1]
    errors = sep[2] + cmp_[2]
    needed = ("comparison", "comparison_dual", "separation", "separation_dual", "principal_N_a",
              "principal_N_b", "principal_rank_w", "principal_rank_w_dual", "maslov_comparison",
              "maslov_comparison_dual")
    ok = not failed and not errors and all(passed[k] >= 100 for k in needed)
    return report(capsys, 7, "comparison, separation, principal paths, Maslov comparison (100 each)", ok,
                  summary(passed, failed, errors))


def c8_distribution(capsys=None):
    start = time.perf_counter()
    passed, failed, errors = tally("distribution", 20)
    elapsed = time.perf_counter() - start
    pairs = sum(v for k, v in passed.items() if k.startswith("N("))
    ok = not failed and not errors and elapsed < 120.0
    return report(capsys, 8, "every admissible (ell, r) attained for 20 random flows", ok,
                  f"{pairs} constructions, {summary(passed, failed, errors)}, {elapsed:.1f} s")


def c9_additivity(capsys=None):
    passed, failed, errors = tally("additivity", 100)
    ok = not failed and not errors and passed["block_diag"] == 100 and passed["interval"] == 100
    return report(capsys, 9, "block-diagonal and interval additivity on 100 instances", ok,
                  summary(passed, failed, errors))


def c10_grid(capsys=None):
    passed, failed, errors = tally("grid", 100)
    ok = not failed and not errors
    return report(capsys, 10, "doubling the grid density changes no integer (100 instances)", ok,
                  summary(passed, failed, errors))


CRITERIA = (c1_rotation, c2_compidx, c3_duality, c4_routes, c5_similarity, c6_flipping,
            c7_comparison, c8_distribution, c9_additivity, c10_grid)


@pytest.mark.slow
@pytest.mark.parametrize("criterion", CRITERIA, ids=[f"criterion_{k + 1:02d}" for k in range(len(CRITERIA))])
def test_criterion(criterion, capsys):
    assert criterion(capsys)


if __name__ == "__main__":
    results = [c(None) for c in CRITERIA]
    print(f"{sum(results)}/{len(results)} criteria passed")
    sys.exit(0 if all(results) else 1)
