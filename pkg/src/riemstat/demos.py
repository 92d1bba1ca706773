"""Self-contained demo scenarios behind `riemstat demo <name>`.

Each builds a small synthetic problem, runs the relevant pipeline, and
writes CSV tables plus model files into the output directory.  All file
content is a deterministic function of the seed.
"""

import json
import logging
import numpy as np

from . import plotting
from .control import LinearSystem, StepwiseReference, mpc_rollout
from .io import Dataset, write_dataset, write_model
from .manifolds import make_manifold
from .mixture import ManifoldGMM, em_fit, gmr
from .stats import ManifoldGaussian, Partition, fuse, karcher_mean

log = logging.getLogger("riemstat.demos")


def _write_table(path, columns, rows):
    lines = ["# columns=" + ",".join(columns)]
    for row in rows:
        lines.append(",".join(repr(float(v)) for v in row))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    log.info("wrote %s", path)


def _try_plot(fn, path, **kwargs):
    try:
        fn(path, **kwargs)
        log.info("wrote %s", path)
    except Exception:
        log.warning("could not render %s", path, exc_info=True)


def _unit(v):
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v)


def demo_fig1(out_dir, seed=0, plot=False):
    """Fusion of two Gaussians on the 2-sphere.

    Writes the inputs and their product as model files, samples from all
    three as a labeled dataset, and tabulates the three densities along the
    geodesic between the input means.
    """
    m = make_manifold("sphere:2")
    g1 = ManifoldGaussian(
        m,
        _unit([0.2, -0.4, 1.0]),
        np.array([[0.30, 0.05], [0.05, 0.02]]),
    )
    g2 = ManifoldGaussian(
        m,
        _unit([1.0, 0.3, 0.3]),
        np.array([[0.03, -0.01], [-0.01, 0.25]]),
    )
    fused, n_iter = fuse([g1, g2])

    write_model(out_dir / "fig1_input_a.json", g1)
    write_model(out_dir / "fig1_input_b.json", g2)
    write_model(out_dir / "fig1_fused.json", fused)

    rng = np.random.default_rng(seed)
    samples, labels = [], []
    for k, g in enumerate([g1, g2, fused]):
        samples.append(g.sample(60, seed=int(rng.integers(2**63 - 1))))
        labels.append(np.full(60, k))
    write_dataset(
        out_dir / "fig1_samples.csv",
        Dataset(m, np.concatenate(samples), labels=np.concatenate(labels)),
    )

    # density profiles along the geodesic joining the two input means
    direction = m.log_coords(g1.mean, g2.mean)
    grid = np.linspace(-0.3, 1.3, 81)
    rows = []
    for t in grid:
        x = m.exp_coords(g1.mean, t * direction)
        rows.append((t, g1.density(x), g2.density(x), fused.density(x)))
    _write_table(
        out_dir / "fig1_densities.csv",
        ["t", "density_a", "density_b", "density_fused"],
        rows,
    )

    if plot:
        _try_plot(
            plotting.sphere_figure,
            out_dir / "fig1.svg",
            points=np.concatenate(samples),
            gaussians=[g1, g2, fused],
        )
    return {"fuse_iterations": n_iter}


def demo_fig4(out_dir, seed=0, tol=1e-6, max_iter=200, plot=False):
    """Clustering on the 2-sphere versus a single flat chart.

    Data spans well over 90 degrees, which is where modeling every cluster
    in the chart at its own mean starts paying off against one Euclidean
    mixture living in a single tangent plane.
    """
    m = make_manifold("sphere:2")
    rng = np.random.default_rng(seed)
    centers = [_unit([1.0, 0.0, 0.2]), _unit([0.0, 1.0, 0.2]), _unit([-0.7, -0.7, 0.6])]
    spreads = [0.18, 0.22, 0.15]
    X, labels = [], []
    for k, (c, s) in enumerate(zip(centers, spreads)):
        for _ in range(50):
            X.append(m.exp_coords(c, s * rng.standard_normal(2)))
            labels.append(k)
    X = np.stack(X)
    labels = np.array(labels)
    write_dataset(out_dir / "fig4_data.csv", Dataset(m, X, labels=labels))

    model, report = em_fit(m, X, 3, seed=seed, tol=tol, max_iter=max_iter)
    write_model(out_dir / "fig4_model.json", model, em_report=report)

    # baseline: log everything at the global mean, fit a flat mixture there
    origin = karcher_mean(m, X)[0].mean
    V = np.stack([m.log_coords(origin, x) for x in X])
    flat = make_manifold("euclidean:2")
    baseline, base_report = em_fit(flat, V, 3, seed=seed, tol=tol, max_iter=max_iter)
    write_model(out_dir / "fig4_baseline.json", baseline, em_report=base_report)

    ll_curved = model.log_density_many(X)
    ll_flat = baseline.log_density_many(V)
    _write_table(
        out_dir / "fig4_scores.csv",
        ["loglik_manifold", "loglik_tangent"],
        np.column_stack([ll_curved, ll_flat]),
    )

    if plot:
        _try_plot(
            plotting.sphere_figure,
            out_dir / "fig4.svg",
            points=X,
            gaussians=model.components,
        )
    return {
        "em_iterations": report.n_iter,
        "mean_loglik_manifold": float(ll_curved.mean()),
        "mean_loglik_tangent": float(ll_flat.mean()),
    }


def make_spd_curve(n, seed, noise=0.08):
    """Synthetic time -> SPD(2) regression set; returns (t, clean, noisy).

    The noise perturbs each matrix along a random tangent whose expected
    squared affine-invariant norm is noise**2.
    """
    spd = make_manifold("spd:2")
    rng = np.random.default_rng(seed)
    t = np.linspace(0.0, 1.0, n)
    clean, noisy = [], []
    for ti in t:
        theta = 0.9 * ti
        c, s = np.cos(theta), np.sin(theta)
        R = np.array([[c, -s], [s, c]])
        M = R @ np.diag([1.3 + 0.6 * np.sin(2.2 * ti), 0.5 + 0.25 * ti]) @ R.T
        v = rng.standard_normal(3) * (noise / np.sqrt(3.0))
        clean.append(M.reshape(-1))
        noisy.append(spd.exp_coords(M.reshape(-1), v))
    return t, np.stack(clean), np.stack(noisy)


def demo_fig5(out_dir, seed=0, tol=1e-6, max_iter=200, plot=False):
    """Gaussian mixture regression from time onto the SPD(2) cone."""
    joint = make_manifold("product[euclidean:1,spd:2]")
    spd = make_manifold("spd:2")
    t, clean, noisy = make_spd_curve(60, seed)
    rows = np.column_stack([t, noisy])
    write_dataset(out_dir / "fig5_train.csv", Dataset(joint, rows))

    model, report = em_fit(joint, rows, 5, seed=seed, tol=tol, max_iter=max_iter)
    write_model(out_dir / "fig5_model.json", model, em_report=report)

    partition = Partition(joint, [0])
    grid = np.linspace(0.0, 1.0, 40)
    table, preds = [], []
    for ti in grid:
        g = gmr(model, partition, [ti], tol=tol)
        spd.check_point(g.mean)
        preds.append(g.mean)
        table.append(np.concatenate([[ti], g.mean, g.cov.reshape(-1)]))
    columns = (
        ["t"]
        + [f"m{i}" for i in range(4)]
        + [f"c{i}{j}" for i in range(3) for j in range(3)]
    )
    _write_table(out_dir / "fig5_predictions.csv", columns, table)

    if plot:
        _try_plot(
            plotting.spd_cone_figure,
            out_dir / "fig5.svg",
            trains=[noisy],
            curves={"prediction": np.stack(preds), "truth": clean},
            span=2.5,
        )
    return {"em_iterations": report.n_iter}


def fig6_reference():
    """The fixed 3-viapoint mixture on the 2-sphere used by the MPC demo."""
    m = make_manifold("sphere:2")
    means = [
        _unit([1.0, 0.3, 0.1]),
        _unit([0.5, 1.0, 0.4]),
        _unit([0.1, 0.4, 1.0]),
    ]
    covs = [
        np.array([[0.05, 0.01], [0.01, 0.03]]),
        np.array([[0.04, 0.0], [0.0, 0.04]]),
        np.array([[1e-4, 0.0], [0.0, 1e-4]]),
    ]
    comps = [ManifoldGaussian(m, mu, cov) for mu, cov in zip(means, covs)]
    return ManifoldGMM([1.0, 1.0, 1.0], comps)


FIG6_SCENARIO = {
    "manifold": "sphere:2",
    "model": "fig6_reference.json",
    "sequence": "auto",
    "horizon": 40,
    "window": 8,
    "dt": 0.1,
    "r": 2.0,
    "start": [0.6806659626466627, -0.5445327701173301, -0.49007949310559706],
    "steps": 60,
    "hold": True,
}


def demo_fig6(out_dir, seed=0, plot=False):
    """Receding-horizon tracking of sphere viapoints.

    Also writes the scenario config itself, so the run can be replayed
    through `riemstat mpc --scenario`.
    """
    m = make_manifold("sphere:2")
    gmm = fig6_reference()
    write_model(out_dir / "fig6_reference.json", gmm)
    with open(out_dir / "fig6_scenario.json", "w") as fh:
        json.dump(FIG6_SCENARIO, fh, indent=2)
        fh.write("\n")

    cfg = FIG6_SCENARIO
    reference = StepwiseReference.equal_segments(gmm, cfg["horizon"])
    system = LinearSystem.integrator(m.dim, cfg["horizon"], dt=cfg["dt"])
    trajectory, commands = mpc_rollout(
        m,
        np.array(cfg["start"]),
        reference,
        system,
        cfg["r"],
        cfg["window"],
        cfg["steps"],
        hold=cfg["hold"],
    )
    write_trajectory(out_dir / "fig6_trajectory.csv", m, reference, trajectory, commands)

    if plot:
        _try_plot(
            plotting.sphere_figure,
            out_dir / "fig6.svg",
            gaussians=gmm.components,
            trajectory=trajectory,
        )
    final = gmm.components[-1].mean
    return {
        "steps": len(commands),
        "final_distance": float(m.dist(trajectory[-1], final)),
    }


def write_trajectory(path, manifold, reference, trajectory, commands):
    """Trajectory table: step, state, applied command norm, target distance.

    Every state row is checked against the manifold before writing.
    """
    rows = []
    for t, x in enumerate(trajectory):
        manifold.check_point(x)
        u_norm = float(np.linalg.norm(commands[t])) if t < len(commands) else 0.0
        target = reference.mean(reference.component(t))
        rows.append([t, *x, u_norm, manifold.dist(x, target)])
    columns = (
        ["step"]
        + [f"x{i}" for i in range(manifold.ambient_dim)]
        + ["u_norm", "target_distance"]
    )
    _write_table(path, columns, rows)
