"""Dataset CSV and model JSON round trips."""

import numpy as np
import pytest

from riemstat import ManifoldGMM, ManifoldGaussian, em_fit, make_manifold
from riemstat.io import (
    Dataset,
    DatasetFormatError,
    read_dataset,
    read_gaussian,
    read_model,
    write_dataset,
    write_model,
)

SEED = 90210


def random_sphere_points(n, seed=SEED):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((n, 3))
    return x / np.linalg.norm(x, axis=1, keepdims=True)


class TestDatasetCsv:
    def test_round_trip_is_exact(self, tmp_path):
        pts = random_sphere_points(20)
        ds = Dataset("sphere:2", pts)
        path = tmp_path / "pts.csv"
        write_dataset(path, ds)
        back = read_dataset(path)
        assert back.manifold.spec_string() == "sphere:2"
        assert np.array_equal(back.points, pts)
        assert back.labels is None and back.weights is None

    def test_round_trip_with_labels_and_weights(self, tmp_path):
        pts = random_sphere_points(10)
        labels = np.arange(10) % 3
        weights = np.linspace(0.5, 2.0, 10)
        ds = Dataset("sphere:2", pts, labels=labels, weights=weights)
        path = tmp_path / "pts.csv"
        write_dataset(path, ds)
        back = read_dataset(path)
        assert np.array_equal(back.labels, labels)
        assert np.array_equal(back.weights, weights)

    def test_rewrite_is_byte_identical(self, tmp_path):
        ds = Dataset("sphere:2", random_sphere_points(15))
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        write_dataset(a, ds)
        write_dataset(b, read_dataset(a))
        assert a.read_bytes() == b.read_bytes()

    def test_header_declares_manifold_and_columns(self, tmp_path):
        path = tmp_path / "pts.csv"
        write_dataset(path, Dataset("sphere:2", random_sphere_points(3)))
        head = path.read_text().splitlines()[0]
        assert head == "# manifold=sphere:2 columns=x0,x1,x2"

    def test_slightly_off_manifold_rows_are_snapped(self, tmp_path):
        path = tmp_path / "pts.csv"
        path.write_text(
            "# manifold=sphere:2 columns=x0,x1,x2\n"
            "1.0000000002,0.0,0.0\n"
        )
        ds = read_dataset(path)
        assert np.linalg.norm(ds.points[0]) == pytest.approx(1.0, abs=1e-15)

    def test_far_off_manifold_row_is_rejected(self, tmp_path):
        path = tmp_path / "pts.csv"
        path.write_text(
            "# manifold=sphere:2 columns=x0,x1,x2\n"
            "1.01,0.0,0.0\n"
        )
        with pytest.raises(DatasetFormatError, match="away"):
            read_dataset(path)

    def test_missing_header_is_rejected(self, tmp_path):
        path = tmp_path / "pts.csv"
        path.write_text("1.0,0.0,0.0\n")
        with pytest.raises(DatasetFormatError, match="header"):
            read_dataset(path)

    def test_wrong_cell_count_is_rejected(self, tmp_path):
        path = tmp_path / "pts.csv"
        path.write_text("# manifold=sphere:2 columns=x0,x1,x2\n1.0,0.0\n")
        with pytest.raises(DatasetFormatError, match="cells"):
            read_dataset(path)

    def test_bad_manifold_spec_is_rejected(self, tmp_path):
        path = tmp_path / "pts.csv"
        path.write_text("# manifold=torus:2 columns=x0,x1,x2\n1.0,0.0,0.0\n")
        with pytest.raises(DatasetFormatError):
            read_dataset(path)

    def test_column_count_must_match_ambient_dim(self, tmp_path):
        path = tmp_path / "pts.csv"
        path.write_text("# manifold=sphere:2 columns=x0,x1\n1.0,0.0\n")
        with pytest.raises(DatasetFormatError, match="ambient"):
            read_dataset(path)

    def test_spd_matrix_rows_round_trip(self, tmp_path):
        rng = np.random.default_rng(SEED)
        mats = []
        for _ in range(5):
            a = rng.standard_normal((2, 2))
            mats.append((a @ a.T + np.eye(2)).reshape(-1))
        ds = Dataset("spd:2", np.stack(mats))
        path = tmp_path / "spd.csv"
        write_dataset(path, ds)
        assert np.array_equal(read_dataset(path).points, ds.points)


class TestModelJson:
    def gmm(self):
        m = make_manifold("sphere:2")
        g1 = ManifoldGaussian(m, [0.0, 0.0, 1.0], 0.05 * np.eye(2))
        g2 = ManifoldGaussian(m, [1.0, 0.0, 0.0], np.array([[0.2, 0.03], [0.03, 0.1]]))
        return ManifoldGMM([0.3, 0.7], [g1, g2])

    def test_round_trip_is_exact(self, tmp_path):
        model = self.gmm()
        path = tmp_path / "model.json"
        write_model(path, model)
        back, report = read_model(path)
        assert report is None
        assert back.manifold.spec_string() == "sphere:2"
        assert np.array_equal(back.priors, model.priors)
        for g, h in zip(back.components, model.components):
            assert np.array_equal(g.mean, h.mean)
            assert np.array_equal(g.cov, h.cov)

    def test_em_report_round_trips(self, tmp_path):
        rng = np.random.default_rng(SEED)
        m = make_manifold("euclidean:2")
        X = np.concatenate(
            [rng.normal(0, 0.3, (30, 2)), rng.normal(4, 0.3, (30, 2))]
        )
        model, report = em_fit(m, X, 2, seed=0)
        path = tmp_path / "model.json"
        write_model(path, model, em_report=report)
        _, stored = read_model(path)
        assert stored["n_iter"] == report.n_iter
        assert np.allclose(stored["log_likelihoods"], report.log_likelihoods)
        assert stored["reseeds"] == []

    def test_rewrite_is_byte_identical(self, tmp_path):
        model = self.gmm()
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        write_model(a, model)
        write_model(b, read_model(a)[0])
        assert a.read_bytes() == b.read_bytes()

    def test_single_gaussian_round_trips(self, tmp_path):
        m = make_manifold("hyperbolic:2")
        g = ManifoldGaussian(m, m.exp_coords(m.origin(), [0.3, -0.1]), 0.2 * np.eye(2))
        path = tmp_path / "g.json"
        write_model(path, g)
        back = read_gaussian(path)
        assert np.array_equal(back.mean, g.mean)
        assert np.array_equal(back.cov, g.cov)

    def test_read_gaussian_rejects_mixtures(self, tmp_path):
        path = tmp_path / "model.json"
        write_model(path, self.gmm())
        with pytest.raises(DatasetFormatError, match="single"):
            read_gaussian(path)

    def test_missing_field_is_rejected(self, tmp_path):
        path = tmp_path / "model.json"
        path.write_text('{"manifold": "sphere:2", "priors": [1.0]}')
        with pytest.raises(DatasetFormatError, match="missing"):
            read_model(path)

    def test_invalid_json_is_rejected(self, tmp_path):
        path = tmp_path / "model.json"
        path.write_text("{not json")
        with pytest.raises(DatasetFormatError, match="JSON"):
            read_model(path)

    def test_off_manifold_mean_is_rejected(self, tmp_path):
        path = tmp_path / "model.json"
        path.write_text(
            '{"manifold": "sphere:2", "priors": [1.0],'
            ' "means": [[2.0, 0.0, 0.0]],'
            ' "covariances": [[[0.1, 0.0], [0.0, 0.1]]]}'
        )
        with pytest.raises(DatasetFormatError, match="bad model data"):
            read_model(path)
