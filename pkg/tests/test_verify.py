import json
from math import comb

import pytest
from hypothesis import given, settings
from pydantic import ValidationError

from conftest import trees
from max4pc import verify
from max4pc.errors import TooSmall
from max4pc.models import CheckId, SampleSpec
from max4pc.tree import path, prufer_decode, prufer_encode, star
from max4pc.verify import (TreeVerifier, formula_det, formula_inertia, formula_rank,
                           formula_snf, star_char_poly, star_eigenvalues,
                           sweep, verify_star_eigen, verify_tree)


def ids(results):
    return {r.id for r in results}


def test_formulas():
    assert formula_rank(10, 5) == 10
    assert formula_det(10, 5) == -256
    assert formula_det(4, 2) == 4
    assert formula_det(5, 4) == -1
    assert formula_snf(4, 2) == [0, 0, 1, 1, 2, 2]
    assert formula_snf(3, 2) == [0, 1, 1]
    assert formula_inertia(4, 2).as_tuple() == (2, 2, 2)
    assert star_char_poly(4).coefficients == [1, -18, -9, 0, 0, 0, 0]
    assert str(star_char_poly(3)) == "x^3 - 8x^2 - 2x"
    low, high = star_eigenvalues(3)
    assert low == pytest.approx(4 - 18 ** 0.5)
    assert high == pytest.approx(4 + 18 ** 0.5)


def test_verify_p4(p4):
    results = verify_tree(p4)
    assert all(r.passed for r in results)
    assert ids(results) == {
        CheckId.T1_RANK, CheckId.T4D_DET, CheckId.T3_SNF, CheckId.T4A_UNIQUE,
        CheckId.T4B_SIZE, CheckId.T4C_SPAN, CheckId.T5_INERTIA,
        CheckId.L1_PENDANT_ROW, CheckId.L2_COMPONENT_SPLIT,
        CheckId.FPC_MAX2, CheckId.PARITY_STEINER,
    }
    by_id = {r.id: r for r in results}
    assert by_id[CheckId.T1_RANK].computed == 4
    assert by_id[CheckId.T3_SNF].computed == [0, 0, 1, 1, 2, 2]
    assert by_id[CheckId.T5_INERTIA].computed == (2, 2, 2)


def test_verify_star(s4):
    results = verify_tree(s4)
    assert all(r.passed for r in results)
    found = ids(results)
    assert {CheckId.STAR_DET, CheckId.STAR_EIGEN, CheckId.C1_SIBLING_LEAF} <= found
    assert CheckId.T4A_UNIQUE not in found


def test_verify_example(example_tree):
    results = verify_tree(example_tree)
    assert results and all(r.passed for r in results)
    by_id = {r.id: r for r in results}
    assert by_id[CheckId.T4D_DET].expected == -256
    assert by_id[CheckId.T4D_DET].computed == [-256]
    assert CheckId.STAR_DET not in by_id


def test_check_selection(p4):
    results = verify_tree(p4, checks=["T1-rank", CheckId.PARITY_STEINER])
    assert [r.id for r in results] == [CheckId.T1_RANK, CheckId.PARITY_STEINER]
    with pytest.raises(ValueError):
        verify_tree(p4, checks=["T9-nothing"])


def test_two_vertices_only_runs_distance_checks():
    results = verify_tree(path(2))
    assert ids(results) == {CheckId.FPC_MAX2, CheckId.PARITY_STEINER}


@given(trees(min_n=3, max_n=8))
@settings(max_examples=25, deadline=None)
def test_random_trees_pass_every_check(t):
    results = verify_tree(t)
    failed = [r for r in results if not r.passed]
    assert not failed, failed[0].witness


def test_failures_are_reported_with_replayable_witness(monkeypatch, example_tree):
    monkeypatch.setattr(verify, "exact_rank", lambda m: -1)
    results = verify_tree(example_tree, checks=[CheckId.T1_RANK, CheckId.T4C_SPAN])
    assert [r.status for r in results] == ["fail", "fail"]
    witness = results[0].witness
    assert witness.expected == 10 and witness.computed == -1
    assert prufer_decode(witness.prufer) == example_tree
    assert witness.prufer == prufer_encode(example_tree)
    assert results[1].witness.indices


@pytest.mark.parametrize("n", [3, 4, 5, 8, 12])
def test_star_eigen(n):
    check = verify_star_eigen(n)
    assert check.passed
    assert check.expected == check.computed == str(star_char_poly(n))


@pytest.mark.slow
@pytest.mark.parametrize("n", range(3, 31))
def test_star_results_up_to_thirty(n):
    assert verify_star_eigen(n).passed
    assert TreeVerifier(star(n)).check_star_det().passed


def test_star_eigen_too_small():
    with pytest.raises(TooSmall):
        verify_star_eigen(2)


def test_small_sweep():
    report = sweep(5, [SampleSpec(n=8, count=3, seed=1)])
    assert report.trees_checked == 3 + 16 + 125 + 3
    assert report.failures == 0
    tallies = {t.id: t for t in report.checks}
    assert tallies[CheckId.T1_RANK].passed == report.trees_checked
    assert tallies[CheckId.STAR_DET].passed >= 3 + 4 + 5
    assert len(report.snf_base_case) == 3
    assert all(obs.formula == obs.computed == [0, 1, 1] for obs in report.snf_base_case)
    assert set(report.timing_ms) <= {c.value for c in CheckId}


def test_sweep_report_is_deterministic():
    first = sweep(4, [(7, 4, 3)], checks=[CheckId.T1_RANK, CheckId.T3_SNF])
    second = sweep(4, [(7, 4, 3)], checks=[CheckId.T1_RANK, CheckId.T3_SNF], jobs=2)
    assert first.to_json(include_timing=False) == second.to_json(include_timing=False)
    payload = json.loads(first.to_json(include_timing=False))
    assert "timing_ms" not in payload
    assert payload["checks"][0] == {"id": "T1-rank", "pass": 3 + 16 + 4, "fail": 0, "witnesses": []}


def test_sweep_rejects_large_exhaustive_corpus():
    with pytest.raises(ValidationError):
        sweep(10, [])


@pytest.mark.slow
def test_exhaustive_sweep_through_seven():
    report = sweep(7, [], jobs=4)
    assert report.trees_checked == 3 + 16 + 125 + 1296 + 16807
    assert report.failures == 0


@pytest.mark.slow
def test_sampled_snf_and_inertia():
    samples = [SampleSpec(n=n, count=200, seed=n) for n in (8, 10, 12)]
    report = sweep(6, samples, checks=[CheckId.T3_SNF, CheckId.T5_INERTIA], jobs=4)
    assert report.failures == 0
    expected = 3 + 16 + 125 + 1296 + 600
    assert {t.id: t.passed for t in report.checks} == {
        CheckId.T3_SNF: expected, CheckId.T5_INERTIA: expected,
    }


def test_star_inertia_shape():
    # a star has n - p = 1, so one positive and one negative eigenvalue
    results = verify_tree(star(7), checks=[CheckId.T5_INERTIA])
    assert results[0].computed == (comb(7, 2) - 2, 1, 1)
