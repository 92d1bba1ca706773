"""Command line front end.

Usage pattern: global flags first, then a subcommand, e.g.

    riemstat --seed 3 --out-dir results gmm data.csv -k 2

Exit codes: 0 success, 2 numerical failure (no convergence, singular
matrices, cut-locus queries), 3 malformed input data, 4 bad configuration
or flags.  Set RIEMSTAT_LOG=INFO (or DEBUG) for progress output.
"""

import argparse
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__, demos, plotting
from .control import LinearSystem, StepwiseReference, mpc_rollout
from .exceptions import (
    CutLocusError,
    DegenerateInputError,
    DimensionMismatchError,
    NoConvergenceError,
    RiemstatError,
    SingularInputError,
    SingularSystemError,
)
from .io import DatasetFormatError, read_dataset, read_gaussian, read_model, write_model
from .manifolds import Hyperbolic, SPD, SpecParseError, Sphere, make_manifold
from .mixture import em_fit, gmr
from .stats import Partition, fuse, karcher_mean

log = logging.getLogger("riemstat.cli")

EXIT_OK = 0
EXIT_NUMERICAL = 2
EXIT_INPUT = 3
EXIT_CONFIG = 4


class ConfigError(RiemstatError):
    """Bad flag values or scenario configuration."""


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse wants to sys.exit(2) on bad flags; route that to exit code 4
    def error(self, message):
        raise _UsageError(message)


def _write_json(path, payload):
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
    log.info("wrote %s", path)


def _write_table(path, columns, rows):
    lines = ["# columns=" + ",".join(columns)]
    for row in rows:
        lines.append(",".join(repr(float(v)) for v in row))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    log.info("wrote %s", path)


def _out_dir(args):
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _try_plot(fn, path, **kwargs):
    try:
        fn(path, **kwargs)
        log.info("wrote %s", path)
    except Exception:
        log.warning("could not render %s", path, exc_info=True)


def _scene_plotter(manifold):
    """Best matching figure helper for a manifold, or None."""
    if isinstance(manifold, Sphere) and manifold.ambient_dim == 3:
        return plotting.sphere_figure
    if isinstance(manifold, Hyperbolic) and manifold.ambient_dim == 3:
        return plotting.poincare_figure
    return None


def cmd_mean(args):
    out = _out_dir(args)
    ds = read_dataset(args.data)
    gaussian, n_iter = karcher_mean(
        ds.manifold,
        ds.points,
        weights=ds.weights,
        tol=args.tol,
        max_iter=args.max_iter or 100,
    )
    write_model(out / "mean_model.json", gaussian)
    _write_json(
        out / "mean_run.json",
        {
            "command": "mean",
            "manifold": ds.manifold.spec_string(),
            "n_points": len(ds),
            "tol": args.tol,
            "n_iter": n_iter,
        },
    )
    if args.plot:
        scene = _scene_plotter(ds.manifold)
        if scene:
            _try_plot(scene, out / "mean.svg", points=ds.points, gaussians=[gaussian])


def cmd_gmm(args):
    out = _out_dir(args)
    ds = read_dataset(args.data)
    model, report = em_fit(
        ds.manifold,
        ds.points,
        args.components,
        weights=ds.weights,
        seed=args.seed,
        tol=args.tol,
        max_iter=args.max_iter or 200,
    )
    write_model(out / "gmm_model.json", model, em_report=report)
    _write_table(
        out / "gmm_responsibilities.csv",
        [f"r{k + 1}" for k in range(model.n_components)],
        report.responsibilities,
    )
    _write_table(
        out / "gmm_likelihood_trace.csv",
        ["sweep", "log_likelihood"],
        [(i + 1, ll) for i, ll in enumerate(report.log_likelihoods)],
    )
    _write_json(
        out / "gmm_run.json",
        {
            "command": "gmm",
            "manifold": ds.manifold.spec_string(),
            "n_points": len(ds),
            "n_components": args.components,
            "seed": args.seed,
            "tol": args.tol,
            "n_iter": report.n_iter,
            "reseeds": [[int(s), int(k)] for s, k in report.reseeds],
            "final_log_likelihood": float(report.log_likelihoods[-1]),
        },
    )
    if args.plot:
        scene = _scene_plotter(ds.manifold)
        if isinstance(ds.manifold, SPD) and ds.manifold.ambient_dim == 4:
            _try_plot(
                plotting.spd_cone_figure,
                out / "gmm.svg",
                trains=[ds.points],
                span=float(np.max(ds.points)),
            )
        elif scene:
            _try_plot(
                scene, out / "gmm.svg", points=ds.points, gaussians=model.components
            )


def _parse_parts(text):
    try:
        parts = [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise ConfigError(f"--in-parts must be comma-separated integers: {exc}")
    if not parts or any(p < 1 for p in parts):
        raise ConfigError("--in-parts takes 1-based part indices")
    return [p - 1 for p in parts]


def cmd_gmr(args):
    out = _out_dir(args)
    model, _ = read_model(args.model)
    try:
        partition = Partition(model.manifold, _parse_parts(args.in_parts))
    except (DimensionMismatchError, ValueError) as exc:
        raise ConfigError(f"bad partition for {model.manifold}: {exc}") from exc
    inputs = read_dataset(args.inputs)
    if inputs.manifold != partition.input_manifold:
        raise DatasetFormatError(
            f"inputs live on {inputs.manifold.spec_string()}, the partitioned "
            f"model expects {partition.input_manifold.spec_string()}"
        )
    out_m = partition.output_manifold
    table = []
    for x in inputs.points:
        g = gmr(model, partition, x, tol=args.tol)
        out_m.check_point(g.mean)
        table.append(np.concatenate([x, g.mean, g.cov.reshape(-1)]))
    columns = (
        [f"in{i}" for i in range(inputs.manifold.ambient_dim)]
        + [f"m{i}" for i in range(out_m.ambient_dim)]
        + [f"c{i}_{j}" for i in range(out_m.dim) for j in range(out_m.dim)]
    )
    _write_table(out / "gmr_outputs.csv", columns, table)
    _write_json(
        out / "gmr_run.json",
        {
            "command": "gmr",
            "model": os.path.basename(args.model),
            "output_manifold": out_m.spec_string(),
            "n_queries": len(inputs),
            "tol": args.tol,
        },
    )


def cmd_fuse(args):
    out = _out_dir(args)
    gaussians = [read_gaussian(path) for path in args.models]
    fused, n_iter = fuse(gaussians, tol=args.tol, max_iter=args.max_iter or 100)
    write_model(out / "fused_gaussian.json", fused)
    _write_json(
        out / "fuse_run.json",
        {
            "command": "fuse",
            "n_inputs": len(gaussians),
            "manifold": fused.manifold.spec_string(),
            "tol": args.tol,
            "n_iter": n_iter,
        },
    )
    if args.plot:
        scene = _scene_plotter(fused.manifold)
        if scene:
            _try_plot(scene, out / "fuse.svg", gaussians=gaussians + [fused])


def _load_scenario(path):
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read scenario {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"scenario {path} is not valid JSON: {exc}") from exc
    required = ["manifold", "model", "horizon", "window", "dt", "r", "start", "steps"]
    missing = [key for key in required if key not in cfg]
    if missing:
        raise ConfigError(f"scenario {path} is missing {missing}")
    cfg.setdefault("sequence", "auto")
    cfg.setdefault("hold", True)
    return cfg


def cmd_mpc(args):
    out = _out_dir(args)
    cfg = _load_scenario(args.scenario)
    try:
        manifold = make_manifold(cfg["manifold"])
    except SpecParseError as exc:
        raise ConfigError(str(exc)) from exc

    model_path = Path(cfg["model"])
    if not model_path.is_absolute():
        model_path = Path(args.scenario).parent / model_path
    gmm, _ = read_model(model_path)
    if gmm.manifold != manifold:
        raise ConfigError(
            f"scenario manifold {manifold.spec_string()} does not match the "
            f"model manifold {gmm.manifold.spec_string()}"
        )

    try:
        horizon = int(cfg["horizon"])
        window = int(cfg["window"])
        steps = int(cfg["steps"])
        dt = float(cfg["dt"])
        r = float(cfg["r"])
        hold = bool(cfg["hold"])
        if cfg["sequence"] == "auto":
            reference = StepwiseReference.equal_segments(gmm, horizon)
        else:
            seq = [int(s) - 1 for s in cfg["sequence"]]
            if len(seq) != horizon:
                raise ValueError(
                    f"sequence has {len(seq)} entries for horizon {horizon}"
                )
            reference = StepwiseReference(gmm, seq)
        start = np.asarray(cfg["start"], dtype=float)
        manifold.check_point(start, atol=1e-6)
        start = manifold.project(start)
        system = LinearSystem.integrator(manifold.dim, horizon, dt=dt)
        if not 2 <= window <= horizon:
            raise ValueError(f"window must be in [2, {horizon}], got {window}")
    except (ValueError, DimensionMismatchError) as exc:
        raise ConfigError(f"bad scenario: {exc}") from exc

    trajectory, commands = mpc_rollout(
        manifold, start, reference, system, r, window, steps, hold=hold
    )
    demos.write_trajectory(
        out / "mpc_trajectory.csv", manifold, reference, trajectory, commands
    )
    final = reference.mean(reference.component(steps))
    _write_json(
        out / "mpc_run.json",
        {
            "command": "mpc",
            "manifold": manifold.spec_string(),
            "horizon": horizon,
            "window": window,
            "steps": steps,
            "final_target_distance": float(manifold.dist(trajectory[-1], final)),
        },
    )
    if args.plot:
        scene = _scene_plotter(manifold)
        if scene:
            _try_plot(
                scene, out / "mpc.svg", gaussians=gmm.components, trajectory=trajectory
            )


def cmd_demo(args):
    out = _out_dir(args)
    runners = {
        "fig1": lambda: demos.demo_fig1(out, seed=args.seed, plot=args.plot),
        "fig4": lambda: demos.demo_fig4(
            out, seed=args.seed, tol=args.tol, max_iter=args.max_iter or 200,
            plot=args.plot,
        ),
        "fig5": lambda: demos.demo_fig5(
            out, seed=args.seed, tol=args.tol, max_iter=args.max_iter or 200,
            plot=args.plot,
        ),
        "fig6": lambda: demos.demo_fig6(out, seed=args.seed, plot=args.plot),
    }
    info = runners[args.name]()
    _write_json(
        out / f"{args.name}_run.json",
        {"command": f"demo {args.name}", "seed": args.seed, **info},
    )


def build_parser():
    parser = _Parser(
        prog="riemstat",
        description="Gaussian statistics, mixtures and tracking control on "
        "Riemannian manifolds.",
    )
    parser.add_argument("--version", action="version", version=f"riemstat {__version__}")
    parser.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    parser.add_argument(
        "--tol", type=float, default=1e-6, help="solver tolerance (default 1e-6)"
    )
    parser.add_argument(
        "--max-iter", type=int, default=None, help="iteration budget override"
    )
    parser.add_argument(
        "--out-dir", default=".", help="directory for output files (default .)"
    )
    parser.add_argument(
        "--plot", action="store_true", help="also render SVG figures"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("mean", help="intrinsic mean of a dataset")
    p.add_argument("data", help="dataset CSV")
    p.set_defaults(func=cmd_mean)

    p = sub.add_parser("gmm", help="fit a Gaussian mixture by EM")
    p.add_argument("data", help="dataset CSV")
    p.add_argument("-k", "--components", type=int, required=True)
    p.set_defaults(func=cmd_gmm)

    p = sub.add_parser("gmr", help="condition a joint mixture on input queries")
    p.add_argument("--model", required=True, help="joint mixture model JSON")
    p.add_argument(
        "--in-parts",
        required=True,
        help="1-based indices of the product parts that form the input, "
        "e.g. '1' or '1,2'",
    )
    p.add_argument("--inputs", required=True, help="query dataset CSV")
    p.set_defaults(func=cmd_gmr)

    p = sub.add_parser("fuse", help="product of Gaussians from model files")
    p.add_argument("models", nargs="+", help="single-Gaussian model JSON files")
    p.set_defaults(func=cmd_fuse)

    p = sub.add_parser("mpc", help="receding-horizon tracking from a scenario file")
    p.add_argument("--scenario", required=True, help="scenario config JSON")
    p.set_defaults(func=cmd_mpc)

    p = sub.add_parser("demo", help="run a bundled demo scenario")
    p.add_argument("name", choices=["fig1", "fig4", "fig5", "fig6"])
    p.set_defaults(func=cmd_demo)
    return parser


def _configure_logging():
    wanted = os.environ.get("RIEMSTAT_LOG", "WARNING").upper()
    level = getattr(logging, wanted, None)
    if not isinstance(level, int):
        level = logging.WARNING
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"riemstat: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    _configure_logging()
    try:
        args.func(args)
    except ConfigError as exc:
        log.error("%s", exc)
        return EXIT_CONFIG
    except (
        NoConvergenceError,
        SingularInputError,
        SingularSystemError,
        CutLocusError,
    ) as exc:
        log.error("numerical failure: %s", exc)
        return EXIT_NUMERICAL
    except (
        DatasetFormatError,
        DegenerateInputError,
        DimensionMismatchError,
        SpecParseError,
        OSError,
        ValueError,
    ) as exc:
        log.error("bad input: %s", exc)
        return EXIT_INPUT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
