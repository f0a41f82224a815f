import json
import math
from pathlib import Path

import numpy as np
import pytest

from uiot.stats import mann_whitney_u, student_t_two_sided_p, summarize, welch_ttest

FIXTURES = json.loads((Path(__file__).parent / "fixtures" / "stats_oracle.json").read_text())


def test_welch_identical_samples():
    result = welch_ttest([1.0, 2.0, 3.0], [1.0, 2.0, 3.0])
    assert result.t == 0.0
    assert result.p == 1.0


def test_welch_hand_example():
    # equal variances 2.5, n=5 each: t = -1/sqrt(1) = -1, Welch df = 8
    result = welch_ttest([1, 2, 3, 4, 5], [2, 3, 4, 5, 6])
    assert result.t == pytest.approx(-1.0, abs=1e-12)
    assert result.df == pytest.approx(8.0, abs=1e-9)
    assert result.p == pytest.approx(0.3466, abs=2e-4)


def test_one_sample_hand_example():
    result = welch_ttest([0.1, 0.2, 0.3], mu0=0.0)
    assert result.t == pytest.approx(0.2 / (0.1 / math.sqrt(3.0)), abs=1e-9)
    assert result.df == 2.0
    assert result.p == pytest.approx(0.0742, abs=2e-4)


def test_welch_degenerate_conventions():
    same = welch_ttest([2.0, 2.0, 2.0], [2.0, 2.0])
    assert same.p == 1.0 and same.degenerate
    apart = welch_ttest([2.0, 2.0, 2.0], [3.0, 3.0])
    assert apart.p == 0.0 and apart.degenerate
    one = welch_ttest([0.5, 0.5], mu0=0.5)
    assert one.p == 1.0 and one.degenerate


def test_welch_needs_two_observations():
    with pytest.raises(ValueError):
        welch_ttest([1.0])


def test_mwu_no_overlap():
    result = mann_whitney_u([1, 2, 3], [4, 5, 6])
    assert result.u == 0.0  # no pair with a > b


def test_mwu_interleaved():
    # pairs with a > b: only (3, 2); U_A = R_A - n(n+1)/2 = 4 - 3 = 1
    result = mann_whitney_u([1, 3], [2, 4])
    assert result.u == 1.0


def test_mwu_identical_samples_degenerate():
    result = mann_whitney_u([5, 5, 5], [5, 5])
    assert result.p == 1.0
    assert result.degenerate


def test_mwu_symmetry_of_p():
    a = [1.0, 2.5, 3.1, 4.0]
    b = [2.0, 2.5, 5.0]
    assert mann_whitney_u(a, b).p == pytest.approx(mann_whitney_u(b, a).p, abs=1e-12)
    assert mann_whitney_u(a, b).u + mann_whitney_u(b, a).u == pytest.approx(len(a) * len(b))


def test_mwu_rejects_empty():
    with pytest.raises(ValueError):
        mann_whitney_u([], [1.0])


def test_t_cdf_tail_sanity():
    # large |t| means small p, symmetric in sign
    assert student_t_two_sided_p(10.0, 5.0) < 1e-3
    assert student_t_two_sided_p(10.0, 5.0) == pytest.approx(
        student_t_two_sided_p(-10.0, 5.0), abs=1e-15
    )
    assert student_t_two_sided_p(0.0, 5.0) == pytest.approx(1.0, abs=1e-12)


def test_against_committed_oracle_fixtures():
    for case in FIXTURES["cases"]:
        welch = welch_ttest(case["a"], case["b"])
        assert welch.t == pytest.approx(case["welch_t"], abs=1e-6)
        assert welch.p == pytest.approx(case["welch_p"], abs=1e-6)
        one = welch_ttest(case["a"], mu0=case["one_sample_mu0"])
        assert one.t == pytest.approx(case["one_sample_t"], abs=1e-6)
        assert one.p == pytest.approx(case["one_sample_p"], abs=1e-6)
        mwu = mann_whitney_u(case["a"], case["b"])
        assert mwu.u == pytest.approx(case["mwu_u"], abs=1e-6)
        assert mwu.p == pytest.approx(case["mwu_p"], abs=1e-6)


def test_fixture_count():
    assert len(FIXTURES["cases"]) == 100


def test_summarize():
    summary = summarize([1.0, 2.0, 3.0, 4.0])
    assert summary["count"] == 4
    assert summary["mean"] == 2.5
    assert summary["median"] == 2.5
    assert summarize([])["count"] == 0
