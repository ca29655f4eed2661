import logging

import numpy as np
import pytest

from conftest import clouds
from halfsplit.data_io import (
    Dataset,
    SyntheticSpec,
    apply_standardizer,
    fit_standardizer,
    generate_synthetic,
    load_csv,
    load_libsvm,
    proportional_counts,
    stratified_split,
    stratified_split_indices,
    write_csv,
)
from halfsplit.errors import InputError, ParameterError, ParseError
from halfsplit.shard_engine import LabeledView, run_training_job, shard_rows


def write(tmp_path, text, name="d.csv"):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_csv_literal(tmp_path):
    ds = load_csv(write(tmp_path, "1.0,2.0,A\n3.0,4.0,B\n"))
    assert (ds.m, ds.d) == (2, 2)
    assert ds.class_names == ["A", "B"]
    np.testing.assert_array_equal(ds.labels, [0, 1])
    np.testing.assert_array_equal(ds.features, [[1, 2], [3, 4]])


def test_csv_header_and_named_label(tmp_path):
    ds = load_csv(write(tmp_path, "y,a,b\nB,1,2\nA,3,4\nB,5,6\n"), label_col="y", header=True)
    assert ds.class_names == ["B", "A"]
    np.testing.assert_array_equal(ds.labels, [0, 1, 0])
    np.testing.assert_array_equal(ds.features[:, 1], [2, 4, 6])


def test_csv_delimiter(tmp_path):
    ds = load_csv(write(tmp_path, "x;1;2\ny;3;4\n"), label_col=0, delimiter=";")
    np.testing.assert_array_equal(ds.features, [[1, 2], [3, 4]])


@pytest.mark.parametrize("text,err", [
    ("1.0,NaN,A\n", ParseError),
    ("1.0,inf,A\n", ParseError),
    ("1.0,abc,A\n", ParseError),
    ("1,2,A\n1,A\n", ParseError),
    ("", InputError),
])
def test_csv_rejects(tmp_path, text, err):
    with pytest.raises(err):
        load_csv(write(tmp_path, text))


def test_csv_error_names_position(tmp_path):
    with pytest.raises(ParseError, match="row 2, column 2"):
        load_csv(write(tmp_path, "1,2,A\n1,x,A\n"))


def test_csv_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    ds = Dataset(rng.normal(size=(25, 3)) * 1e-3 + 1 / 3, rng.integers(0, 3, 25), ["a", "b", "c"])
    path = tmp_path / "rt.csv"
    write_csv(ds, path)
    back = load_csv(path)
    assert np.array_equal(back.features, ds.features)
    assert [back.class_names[k] for k in back.labels] == [ds.class_names[k] for k in ds.labels]


def test_libsvm(tmp_path):
    ds = load_libsvm(write(tmp_path, "+1 1:0.5 3:2.0\n-1 2:1\n+1\n", "d.svm"))
    np.testing.assert_array_equal(ds.features, [[0.5, 0, 2.0], [0, 1, 0], [0, 0, 0]])
    assert ds.class_names == ["+1", "-1"]
    np.testing.assert_array_equal(ds.labels, [0, 1, 0])


@pytest.mark.parametrize("line", ["1 3:1 2:1", "1 2:1 2:3", "1 0:1", "1 x:1", "1 2"])
def test_libsvm_rejects(tmp_path, line):
    with pytest.raises(ParseError):
        load_libsvm(write(tmp_path, line + "\n", "d.svm"))


def test_iris_shape(iris):
    assert (iris.m, iris.d, iris.n_classes) == (150, 4, 3)
    assert iris.class_names == ["setosa", "versicolor", "virginica"]
    assert iris.class_counts().tolist() == [50, 50, 50]


def test_stratified_split_counts(iris):
    tr, ho = stratified_split(iris, 0.2, seed=0)
    assert ho.m == 30 and tr.m == 120
    assert ho.class_counts().tolist() == [10, 10, 10]


def test_stratified_split_disjoint_cover(iris):
    a, b = stratified_split_indices(iris, 0.3, seed=5)
    assert np.intersect1d(a, b).size == 0
    assert np.array_equal(np.sort(np.concatenate([a, b])), np.arange(150))
    a2, b2 = stratified_split_indices(iris, 0.3, seed=5)
    assert np.array_equal(a, a2) and np.array_equal(b, b2)
    for c in range(3):
        assert abs((iris.labels[b] == c).sum() - 0.3 * 50) <= 1


def test_stratified_split_clamps(caplog):
    ds = Dataset(np.arange(6, dtype=float)[:, None], [0, 0, 1, 1, 1, 1])
    with caplog.at_level(logging.WARNING):
        tr, ho = stratified_split(ds, 0.9, seed=0)
    assert tr.class_counts().tolist() == [1, 1]
    assert "keeping 1" in caplog.text


def test_stratified_split_needs_two_rows():
    ds = Dataset(np.zeros((3, 1)), [0, 0, 1], ["a", "lonely"])
    with pytest.raises(InputError, match="lonely"):
        stratified_split(ds, 0.5, 0)


def test_standardizer():
    ds = Dataset(np.array([[1.0, 5.0], [3.0, 5.0]]), [0, 1])
    std = fit_standardizer(ds)
    np.testing.assert_array_equal(std.mean, [2.0, 5.0])
    np.testing.assert_array_equal(std.scale, [1.0, 1.0])
    out = apply_standardizer(std, ds)
    np.testing.assert_array_equal(out.features, [[-1, 0], [1, 0]])
    const = Dataset(np.full((3, 1), 5.0), [0, 1, 0])
    assert not apply_standardizer(fit_standardizer(const), const).features.any()


def test_standardizer_idempotent(iris):
    z = apply_standardizer(fit_standardizer(iris), iris)
    again = fit_standardizer(z)
    np.testing.assert_allclose(again.mean, 0, atol=1e-12)
    np.testing.assert_allclose(again.scale, 1, atol=1e-12)
    with pytest.raises(InputError):
        fit_standardizer(iris.subset([]))


def test_generate_zero_noise():
    ds = generate_synthetic(SyntheticSpec(n_classes=4, d=2, counts=[3] * 4, scale=5, sigma=0))
    pts = {tuple(r) for r in ds.features}
    assert pts == {(-5, -5), (5, -5), (-5, 5), (5, 5)}


def test_generate_skew_counts():
    ds = generate_synthetic(SyntheticSpec(n_classes=3, d=2, proportions=[0.9, 0.05, 0.05], total=1000))
    assert ds.class_counts().tolist() == [900, 50, 50]


def test_proportional_rounding():
    assert proportional_counts([1, 1, 1], 10) == [4, 3, 3]
    assert sum(proportional_counts([0.33, 0.33, 0.34], 101)) == 101


def test_generate_deterministic():
    spec = SyntheticSpec(n_classes=5, d=3, counts=[10] * 5, sigma=0.7, seed=9)
    a, b = generate_synthetic(spec), generate_synthetic(spec)
    assert a.features.tobytes() == b.features.tobytes()
    assert a.labels.tobytes() == b.labels.tobytes()


@pytest.mark.parametrize("kwargs", [
    dict(n_classes=1, d=2, counts=[5]),
    dict(n_classes=5, d=2, counts=[5] * 5),
    dict(n_classes=3, d=2, counts=[5, 1, 5]),
    dict(n_classes=2, d=2, counts=[5, 5], sigma=-1),
    dict(n_classes=4, d=2, counts=[5] * 4, scheme="simplex"),
    dict(n_classes=2, d=2, counts=[5, 5], scheme="star"),
])
def test_generate_rejects(kwargs):
    with pytest.raises(ParameterError):
        generate_synthetic(SyntheticSpec(**kwargs))


@pytest.mark.parametrize("scheme,n,d", [("corners", 4, 2), ("corners", 8, 3), ("simplex", 5, 4), ("simplex", 3, 3)])
def test_generator_separation(scheme, n, d):
    sigma = 0.5
    ds = generate_synthetic(SyntheticSpec(n_classes=n, d=d, counts=[40] * n, scheme=scheme,
                                          scale=8 * sigma, sigma=sigma, seed=1))
    for i in range(n):
        for j in range(i + 1, n):
            view = LabeledView.from_partition(ds, [i], [j])
            plane = run_training_job(view, shard_rows(view.m, 1), 1.0)
            pred = np.where(view.rows @ plane.w - plane.gamma >= 0, 1, -1)
            assert np.array_equal(pred, view.signs), (i, j)


def test_dataset_rejects_nonfinite():
    with pytest.raises(InputError):
        Dataset(np.array([[np.nan]]), [0])
    with pytest.raises(InputError):
        Dataset(np.zeros((2, 1)), [0])


def test_clouds_helper_is_grouped():
    ds = clouds([(0, 0), (1, 1)], 3, 0.0, 0)
    assert ds.labels.tolist() == [0, 0, 0, 1, 1, 1]
