"""File formats: dataset CSV with a structured header, model JSON.

A dataset file starts with one comment line declaring the manifold and the
column names, followed by plain CSV rows.  Floats are written with repr so
that a value survives a write/read round trip bit-for-bit and identical runs
produce identical bytes.
"""

import json
from dataclasses import dataclass

import numpy as np

from .exceptions import RiemstatError
from .manifolds import SpecParseError, make_manifold
from .mixture import ManifoldGMM
from .stats import ManifoldGaussian
from .validation import as_float_array

# rows may be off-manifold by at most this much; they are snapped back on read
PROJECTION_TOL = 1e-6


class DatasetFormatError(RiemstatError, ValueError):
    """Malformed dataset or model file."""


@dataclass
class Dataset:
    """Points on one manifold, with optional per-point labels and weights."""

    manifold: object
    points: np.ndarray
    labels: np.ndarray = None
    weights: np.ndarray = None

    def __post_init__(self):
        self.manifold = make_manifold(self.manifold)
        self.points = as_float_array(self.points, "points")
        if self.points.ndim != 2 or self.points.shape[1] != self.manifold.ambient_dim:
            raise DatasetFormatError(
                f"points must have shape (n, {self.manifold.ambient_dim}), "
                f"got {self.points.shape}"
            )
        n = self.points.shape[0]
        if self.labels is not None:
            self.labels = np.asarray(self.labels, dtype=int)
            if self.labels.shape != (n,):
                raise DatasetFormatError("labels must have one entry per point")
        if self.weights is not None:
            self.weights = as_float_array(self.weights, "weights")
            if self.weights.shape != (n,) or np.any(self.weights < 0):
                raise DatasetFormatError("weights must be nonnegative, one per point")

    def __len__(self):
        return self.points.shape[0]


def _float_cell(value):
    return repr(float(value))


def write_dataset(path, dataset):
    """Write a dataset CSV; every row is checked against the manifold."""
    m = dataset.manifold
    for row in dataset.points:
        m.check_point(row, atol=1e-9)
    columns = [f"x{i}" for i in range(m.ambient_dim)]
    if dataset.labels is not None:
        columns.append("label")
    if dataset.weights is not None:
        columns.append("weight")
    lines = [f"# manifold={m.spec_string()} columns={','.join(columns)}"]
    for i, row in enumerate(dataset.points):
        cells = [_float_cell(v) for v in row]
        if dataset.labels is not None:
            cells.append(str(int(dataset.labels[i])))
        if dataset.weights is not None:
            cells.append(_float_cell(dataset.weights[i]))
        lines.append(",".join(cells))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_dataset(path):
    """Read a dataset CSV; rows are snapped onto the declared manifold.

    Rows further than ``PROJECTION_TOL`` from the manifold are rejected.
    """
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines or not lines[0].startswith("#"):
        raise DatasetFormatError(f"{path}: missing '# manifold=... columns=...' header")
    header = lines[0].lstrip("#").strip()
    fields = {}
    for token in header.split():
        if "=" not in token:
            raise DatasetFormatError(f"{path}: bad header token {token!r}")
        key, _, value = token.partition("=")
        fields[key] = value
    if "manifold" not in fields or "columns" not in fields:
        raise DatasetFormatError(f"{path}: header must declare manifold and columns")
    try:
        manifold = make_manifold(fields["manifold"])
    except SpecParseError as exc:
        raise DatasetFormatError(f"{path}: {exc}") from exc

    columns = fields["columns"].split(",")
    has_label = "label" in columns
    has_weight = "weight" in columns
    n_coord = len(columns) - has_label - has_weight
    if n_coord != manifold.ambient_dim:
        raise DatasetFormatError(
            f"{path}: {n_coord} coordinate columns for a manifold of ambient "
            f"dimension {manifold.ambient_dim}"
        )
    label_at = columns.index("label") if has_label else None
    weight_at = columns.index("weight") if has_weight else None
    coord_at = [i for i in range(len(columns)) if i not in (label_at, weight_at)]

    points, labels, weights = [], [], []
    for lineno, line in enumerate(lines[1:], start=2):
        cells = line.split(",")
        if len(cells) != len(columns):
            raise DatasetFormatError(
                f"{path}:{lineno}: expected {len(columns)} cells, got {len(cells)}"
            )
        try:
            row = np.array([float(cells[i]) for i in coord_at])
            if has_label:
                labels.append(int(float(cells[label_at])))
            if has_weight:
                weights.append(float(cells[weight_at]))
        except ValueError as exc:
            raise DatasetFormatError(f"{path}:{lineno}: {exc}") from exc
        try:
            snapped = manifold.project(row)
        except Exception as exc:
            raise DatasetFormatError(
                f"{path}:{lineno}: row does not describe a point on "
                f"{manifold.spec_string()}: {exc}"
            ) from exc
        correction = np.linalg.norm(snapped - row)
        if correction > PROJECTION_TOL:
            raise DatasetFormatError(
                f"{path}:{lineno}: row is {correction:.2e} away from "
                f"{manifold.spec_string()} (limit {PROJECTION_TOL})"
            )
        # only snap rows that genuinely drifted; re-projecting an on-manifold
        # row would perturb its last bits and break byte-exact round trips
        points.append(row if correction <= 1e-12 else snapped)
    if not points:
        raise DatasetFormatError(f"{path}: no data rows")
    return Dataset(
        manifold,
        np.stack(points),
        labels=np.array(labels) if has_label else None,
        weights=np.array(weights) if has_weight else None,
    )


def _model_payload(model, em_report=None):
    payload = {
        "manifold": model.manifold.spec_string(),
        "priors": [float(p) for p in model.priors],
        "means": [[float(v) for v in g.mean] for g in model.components],
        "covariances": [
            [[float(v) for v in row] for row in g.cov] for g in model.components
        ],
    }
    if em_report is not None:
        payload["em_report"] = {
            "log_likelihoods": [float(v) for v in em_report.log_likelihoods],
            "n_iter": int(em_report.n_iter),
            "reseeds": [[int(s), int(k)] for s, k in em_report.reseeds],
        }
    return payload


def write_model(path, model, em_report=None):
    """Write a mixture (or a single Gaussian as a one-component mixture)."""
    if isinstance(model, ManifoldGaussian):
        model = ManifoldGMM([1.0], [model])
    with open(path, "w") as fh:
        json.dump(_model_payload(model, em_report), fh, indent=2)
        fh.write("\n")


def read_model(path):
    """Read a model file back into a mixture.

    Returns (ManifoldGMM, em_report dict or None).
    """
    with open(path) as fh:
        try:
            payload = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DatasetFormatError(f"{path}: not valid JSON: {exc}") from exc
    for key in ("manifold", "priors", "means", "covariances"):
        if key not in payload:
            raise DatasetFormatError(f"{path}: missing field {key!r}")
    try:
        manifold = make_manifold(payload["manifold"])
    except SpecParseError as exc:
        raise DatasetFormatError(f"{path}: {exc}") from exc
    priors = payload["priors"]
    means = payload["means"]
    covs = payload["covariances"]
    if not len(priors) == len(means) == len(covs) or not priors:
        raise DatasetFormatError(f"{path}: priors/means/covariances disagree")
    try:
        components = []
        for mean, cov in zip(means, covs):
            g = ManifoldGaussian(manifold, mean, cov)
            manifold.check_point(g.mean)
            components.append(g)
        model = ManifoldGMM(priors, components)
    except Exception as exc:
        raise DatasetFormatError(f"{path}: bad model data: {exc}") from exc
    return model, payload.get("em_report")


def read_gaussian(path):
    """Read a model file that must hold exactly one component."""
    model, _ = read_model(path)
    if model.n_components != 1:
        raise DatasetFormatError(
            f"{path}: expected a single Gaussian, found {model.n_components} components"
        )
    return model.components[0]
