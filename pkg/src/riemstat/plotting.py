"""Figure helpers for the command line demos.

Everything renders through the Agg backend into static vector files, so the
package works headless.  Callers treat these as best-effort: a failed plot
must never change a command's outputs or exit code.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

# one full turn, used to trace unit-radius contours
_CIRCLE = np.linspace(0.0, 2.0 * np.pi, 120)


def _gaussian_ring(gaussian, scale=1.0):
    """Points at constant Mahalanobis distance, pushed onto the manifold."""
    w, V = np.linalg.eigh(gaussian.cov)
    L = V * np.sqrt(np.maximum(w, 0.0))
    ring = scale * np.column_stack([np.cos(_CIRCLE), np.sin(_CIRCLE)])
    return np.stack(
        [gaussian.manifold.exp_coords(gaussian.mean, L @ z) for z in ring]
    )


def sphere_figure(path, points=None, gaussians=None, trajectory=None, marks=None):
    """Scene on the unit 2-sphere: data, Gaussian 1-sigma rings, a path."""
    fig = plt.figure(figsize=(6, 6))
    ax = fig.add_subplot(projection="3d")
    u, v = np.meshgrid(np.linspace(0, 2 * np.pi, 24), np.linspace(0, np.pi, 13))
    ax.plot_wireframe(
        np.cos(u) * np.sin(v),
        np.sin(u) * np.sin(v),
        np.cos(v),
        color="0.85",
        linewidth=0.4,
    )
    if points is not None:
        pts = np.asarray(points)
        ax.scatter(pts[:, 0], pts[:, 1], pts[:, 2], s=8, color="tab:blue", alpha=0.6)
    for g in gaussians or []:
        ring = _gaussian_ring(g)
        ax.plot(ring[:, 0], ring[:, 1], ring[:, 2], color="tab:red", linewidth=1.2)
        ax.scatter(*g.mean, color="tab:red", s=24, marker="x")
    if trajectory is not None:
        tr = np.asarray(trajectory)
        ax.plot(tr[:, 0], tr[:, 1], tr[:, 2], color="tab:green", linewidth=1.6)
        ax.scatter(*tr[0], color="tab:green", s=30, marker="o")
        ax.scatter(*tr[-1], color="black", s=30, marker="s")
    for label, p in (marks or {}).items():
        ax.text(p[0], p[1], p[2], label, fontsize=8)
    ax.set_box_aspect((1, 1, 1))
    ax.set_axis_off()
    fig.savefig(path)
    plt.close(fig)


def _to_disk(points):
    # hyperboloid (x, y, z), z > 0 sheet, onto the Poincare disk
    pts = np.asarray(points)
    return pts[:, :2] / (1.0 + pts[:, 2:3])


def poincare_figure(path, points=None, gaussians=None, trajectory=None):
    """Scene on the hyperbolic plane drawn in the Poincare disk."""
    fig, ax = plt.subplots(figsize=(6, 6))
    ax.add_patch(plt.Circle((0, 0), 1.0, fill=False, color="0.6"))
    if points is not None:
        xy = _to_disk(points)
        ax.scatter(xy[:, 0], xy[:, 1], s=8, color="tab:blue", alpha=0.6)
    for g in gaussians or []:
        ring = _to_disk(_gaussian_ring(g))
        ax.plot(ring[:, 0], ring[:, 1], color="tab:red", linewidth=1.2)
        mx, my = _to_disk(g.mean[None, :])[0]
        ax.plot(mx, my, "x", color="tab:red")
    if trajectory is not None:
        xy = _to_disk(trajectory)
        ax.plot(xy[:, 0], xy[:, 1], color="tab:green", linewidth=1.6)
    ax.set_xlim(-1.05, 1.05)
    ax.set_ylim(-1.05, 1.05)
    ax.set_aspect("equal")
    ax.set_axis_off()
    fig.savefig(path)
    plt.close(fig)


def _cone_coords(mats):
    # 2x2 SPD [[a, b], [b, c]] -> (a, c, sqrt(2) b); the PSD set is the cone
    # around the a = c axis with boundary a c = b^2
    M = np.asarray(mats).reshape(-1, 2, 2)
    return np.column_stack([M[:, 0, 0], M[:, 1, 1], np.sqrt(2.0) * M[:, 0, 1]])


def spd_cone_figure(path, trains=None, curves=None, span=None):
    """2x2 SPD matrices inside the positive-definite cone.

    trains: scatter groups, curves: named polylines of flattened matrices.
    """
    fig = plt.figure(figsize=(6, 6))
    ax = fig.add_subplot(projection="3d")
    lam = np.linspace(0.0, span or 1.0, 8)
    theta = np.linspace(0.0, np.pi, 40)
    L, T = np.meshgrid(lam, theta)
    ax.plot_wireframe(
        L * np.cos(T) ** 2,
        L * np.sin(T) ** 2,
        np.sqrt(2.0) * L * np.sin(T) * np.cos(T),
        color="0.85",
        linewidth=0.4,
    )
    for group in trains or []:
        xyz = _cone_coords(group)
        ax.scatter(xyz[:, 0], xyz[:, 1], xyz[:, 2], s=8, alpha=0.6)
    for label, mats in (curves or {}).items():
        xyz = _cone_coords(mats)
        ax.plot(xyz[:, 0], xyz[:, 1], xyz[:, 2], linewidth=1.6, label=label)
    if curves:
        ax.legend(loc="upper left", fontsize=8)
    ax.set_xlabel("m11")
    ax.set_ylabel("m22")
    ax.set_zlabel("sqrt2 m12")
    fig.savefig(path)
    plt.close(fig)


def series_figure(path, x, curves, bands=None, xlabel="t", ylabel="value"):
    """Line chart of named series, with optional (lo, hi) shaded bands."""
    fig, ax = plt.subplots(figsize=(7, 4))
    for label, y in curves.items():
        ax.plot(x, y, linewidth=1.4, label=label)
    for label, (lo, hi) in (bands or {}).items():
        ax.fill_between(x, lo, hi, alpha=0.2, label=label)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
