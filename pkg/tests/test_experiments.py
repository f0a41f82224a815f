import csv

import numpy as np
import pytest

from uiot.dataset import Dataset, make_screen_set
from uiot.errors import EmptyStudy, IncompleteTable
from uiot.experiments import (
    PairRow,
    canonical_pairs,
    group_pairs,
    pairwise_sweep,
    read_sweep,
    run_delta_lu_study,
    study_to_json,
)
from uiot.synthetic import make_clustered_dataset

from conftest import unit_rows


def small_dataset(rng):
    block = unit_rows(rng, 4, 8)
    apps = [
        make_screen_set("a", block, name="alpha", platform="ios", category="x"),
        make_screen_set("b", block, name="alpha", platform="android", category="x"),
        make_screen_set("c", unit_rows(rng, 4, 8), name="gamma", platform="ios", category="y"),
    ]
    return Dataset(apps, embedding_dim=8, category_vocabulary=["x", "y"])


def test_sweep_row_count(tmp_path, rng):
    data = small_dataset(rng)
    out = pairwise_sweep(data, out_csv=tmp_path / "pairs.csv")
    rows = read_sweep(out)
    assert len(rows) == 3  # C(3,2)
    assert [(r.id_a, r.id_b) for r in rows] == canonical_pairs(data)


def test_sweep_duplicate_app_distance_zero(tmp_path, rng):
    data = small_dataset(rng)
    rows = read_sweep(pairwise_sweep(data, out_csv=tmp_path / "pairs.csv"))
    ab = next(r for r in rows if (r.id_a, r.id_b) == ("a", "b"))
    assert ab.distance <= 1e-9


def test_sweep_resume_identical_bytes(tmp_path, rng):
    data = small_dataset(rng)
    fresh = pairwise_sweep(data, out_csv=tmp_path / "fresh.csv")

    # simulate a killed run: journal holds only the first completed pair
    interrupted = tmp_path / "resumed.csv"
    full_journal = (tmp_path / "fresh.csv.journal").read_text().splitlines()
    (tmp_path / "resumed.csv.journal").write_text(full_journal[0] + "\n")
    resumed = pairwise_sweep(data, out_csv=interrupted)
    assert resumed.read_bytes() == fresh.read_bytes()


def test_sweep_resume_discards_torn_tail_line(tmp_path, rng):
    data = small_dataset(rng)
    fresh = pairwise_sweep(data, out_csv=tmp_path / "fresh.csv")
    journal_lines = (tmp_path / "fresh.csv.journal").read_text().splitlines()
    torn = journal_lines[0] + "\n" + journal_lines[1][: len(journal_lines[1]) // 2]
    (tmp_path / "torn.csv.journal").write_text(torn)
    resumed = pairwise_sweep(data, out_csv=tmp_path / "torn.csv")
    assert resumed.read_bytes() == fresh.read_bytes()


def test_sweep_threads_same_bytes(tmp_path, rng):
    data = small_dataset(rng)
    single = pairwise_sweep(data, out_csv=tmp_path / "t1.csv", threads=1)
    multi = pairwise_sweep(data, out_csv=tmp_path / "t3.csv", threads=3)
    assert single.read_bytes() == multi.read_bytes()


def test_group_pairs_same_name_closer(tmp_path):
    data = make_clustered_dataset(n_names=4, per_app=5, dim=16, sigma=0.02, seed=3, versions_per_name=2)
    rows = read_sweep(pairwise_sweep(data, out_csv=tmp_path / "pairs.csv"))
    report = group_pairs(rows, data, "name")
    assert report.same["count"] == 4  # one same-name pair per name
    assert report.same["mean"] < report.different["mean"]
    assert not report.skipped
    assert report.test is not None


def test_group_pairs_counts_closed_form(tmp_path, rng):
    data = small_dataset(rng)
    rows = read_sweep(pairwise_sweep(data, out_csv=tmp_path / "pairs.csv"))
    name_report = group_pairs(rows, data, "name")
    # groups: alpha has 2 apps, gamma 1 -> C(2,2)... same pairs = C(2,2)=1
    assert name_report.same["count"] == 1
    assert name_report.different["count"] == 2
    platform_report = group_pairs(rows, data, "platform")
    assert platform_report.same["count"] == 1  # a-c share ios
    category_report = group_pairs(rows, data, "category")
    assert category_report.same["count"] == 1


def test_group_pairs_degenerate_partition(tmp_path, rng):
    block = unit_rows(rng, 3, 4)
    apps = [
        make_screen_set("a", block, platform="ios", category="x"),
        make_screen_set("b", unit_rows(rng, 3, 4), platform="ios", category="x"),
    ]
    data = Dataset(apps, embedding_dim=4, category_vocabulary=["x"])
    rows = read_sweep(pairwise_sweep(data, out_csv=tmp_path / "pairs.csv"))
    report = group_pairs(rows, data, "platform")
    assert report.skipped
    assert report.test is None
    assert report.different["count"] == 0


def test_group_pairs_incomplete_table(rng):
    data = small_dataset(rng)
    with pytest.raises(IncompleteTable):
        group_pairs([PairRow("a", "b", 0.1, "exact", True)], data, "name")


def test_group_pairs_order_invariant(tmp_path, rng):
    data = small_dataset(rng)
    rows = read_sweep(pairwise_sweep(data, out_csv=tmp_path / "pairs.csv"))
    fwd = group_pairs(rows, data, "name")
    rev = group_pairs(rows[::-1], data, "name")
    assert fwd.to_json_dict() == rev.to_json_dict()


# --- delta-Lu studies ------------------------------------------------------


def test_study_n_zero_is_identity():
    data = make_clustered_dataset(n_names=4, per_app=12, dim=8, sigma=0.05, seed=1)
    study = run_delta_lu_study(data, "randomChange", n_values=(0,), seed=5)
    for per_n in study.per_app.values():
        assert per_n[0] == 0.0


def test_study_identical_vectors_heldout_delta_zero(rng):
    # app whose screenshots are all the same vector: held-out replacements
    # are exact duplicates, so every delta is identically zero
    v = unit_rows(rng, 1, 6)
    apps = [
        make_screen_set("const", np.tile(v, (12, 1)), category="x"),
        make_screen_set("other", unit_rows(rng, 12, 6), category="x"),
    ]
    data = Dataset(apps, embedding_dim=6, category_vocabulary=["x"])
    study = run_delta_lu_study(data, "heldOutChange", n_values=(1, 3, 5), seed=2)
    assert all(abs(d) <= 1e-12 for d in study.per_app["const"].values())


def test_study_excludes_small_apps(rng):
    apps = [
        make_screen_set("big", unit_rows(rng, 12, 6), category="x"),
        make_screen_set("big2", unit_rows(rng, 12, 6), category="x"),
        make_screen_set("small", unit_rows(rng, 3, 6), category="x"),
    ]
    data = Dataset(apps, embedding_dim=6, category_vocabulary=["x"])
    study = run_delta_lu_study(data, "randomChange", seed=1)
    assert study.excluded == ["small"]
    assert set(study.per_app) == {"big", "big2"}


def test_study_excludes_apps_without_donor_pool(rng):
    # the only other app is tiny, so randomChange cannot draw 5 distinct donors
    apps = [
        make_screen_set("big", unit_rows(rng, 12, 6), category="x"),
        make_screen_set("small", unit_rows(rng, 3, 6), category="x"),
    ]
    data = Dataset(apps, embedding_dim=6, category_vocabulary=["x"])
    with pytest.raises(EmptyStudy):
        run_delta_lu_study(data, "randomChange", seed=1)
    heldout = run_delta_lu_study(data, "heldOutChange", seed=1)
    assert set(heldout.per_app) == {"big"}


def test_study_no_eligible_apps(rng):
    apps = [make_screen_set("tiny", unit_rows(rng, 3, 6), category="x")]
    data = Dataset(apps, embedding_dim=6, category_vocabulary=["x"])
    with pytest.raises(EmptyStudy):
        run_delta_lu_study(data, "randomChange", seed=1)


def test_study_heldout_cannot_exceed_pool(rng):
    data = make_clustered_dataset(n_names=2, per_app=20, dim=6, seed=0)
    with pytest.raises(ValueError):
        run_delta_lu_study(data, "heldOutChange", n_values=(6,), held_out_count=5)


def test_study_deterministic_json():
    data = make_clustered_dataset(n_names=6, per_app=14, dim=8, sigma=0.05, seed=11)
    one = study_to_json(run_delta_lu_study(data, "randomChange", seed=42))
    two = study_to_json(run_delta_lu_study(data, "randomChange", seed=42))
    assert one == two
    other_seed = study_to_json(run_delta_lu_study(data, "randomChange", seed=43))
    assert one != other_seed


def test_study_random_change_drops_lu():
    data = make_clustered_dataset(n_names=25, per_app=16, dim=32, sigma=0.05, seed=7)
    study = run_delta_lu_study(data, "randomChange", n_values=(1, 3), seed=7)
    for n in (1, 3):
        deltas = study.deltas_for(n)
        assert float(np.mean(deltas)) < 0.0
        assert study.tests[n].p < 0.01


def test_study_long_csv(tmp_path):
    data = make_clustered_dataset(n_names=3, per_app=12, dim=8, sigma=0.05, seed=1)
    study = run_delta_lu_study(data, "randomChange", n_values=(1, 2), seed=5)
    out = study.write_long_csv(tmp_path / "long.csv")
    with open(out, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["appId", "n", "delta"]
    assert len(rows) == 1 + 3 * 2
