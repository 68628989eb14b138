"""Command-line front end.

Three subcommands:

* ``sigpal test``      -- run sigpal / sigclust / diproperm on a CSV file,
* ``sigpal simulate``  -- run a named or user-supplied experiment preset,
* ``sigpal theory``    -- emit closed-form TCI curves or the large-d sweep.

Exit codes: 0 success, 2 invalid input, 3 engine failure.  The seed is
always materialized and echoed, and every output embeds the resolved
configuration, so reruns are byte-identical.  ``--threads`` only moves the
same work across workers; it never changes results and is therefore not
part of the echoed configuration.
"""

from __future__ import annotations

import argparse
import json
import os
import secrets
import sys
from pathlib import Path

import numpy as np
from numpy.random import SeedSequence

from ._rng import seed_of
from .assigners import AssignerSpec
from .dataset import UNLABELED, load_csv, rotate_to_diagonal
from .engines import diproperm, sigclust, sigpal
from .errors import SigPalError
from .harness import run_experiment
from .presets import Preset, available_presets, load_preset, load_preset_file
from .spectrum import known_spectrum
from .theory import (
    AsymptoticStudyConfig,
    asymptotic_pvalue_study,
    tci_difference,
    tci_sigclust,
    tci_sigpal,
)

EXIT_OK = 0
EXIT_BAD_INPUT = 2
EXIT_ENGINE_FAILURE = 3


class CliInputError(Exception):
    """Invalid flags or input files; mapped to exit code 2."""


def _default_threads() -> int:
    raw = os.environ.get("SIGPAL_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _materialize_seed(seed) -> int:
    return secrets.randbits(63) if seed is None else int(seed)


def _parse_label_column(raw):
    if raw is None:
        return None
    try:
        return int(raw)
    except ValueError:
        return raw


def _parse_assigner(kind: str, args) -> AssignerSpec:
    return AssignerSpec(
        kind=kind.replace("-", "_"),
        restarts=args.restarts,
        max_iters=args.max_iters,
        C=args.c,
        penalty=args.penalty,
        steps=args.steps,
    )


def _parse_eigen(raw: str):
    if raw in ("hard", "soft"):
        return raw
    if raw.startswith("known:"):
        path = raw.removeprefix("known:")
        try:
            with open(path, "r", encoding="utf-8") as fh:
                payload = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise CliInputError(f"cannot read known spectrum {path!r}: {exc}") from exc
        values = payload["values"] if isinstance(payload, dict) else payload
        try:
            return known_spectrum(np.asarray(values, dtype=float))
        except (SigPalError, TypeError, ValueError) as exc:
            raise CliInputError(f"invalid known spectrum in {path!r}: {exc}") from exc
    raise CliInputError(f"--eigen must be 'hard', 'soft' or 'known:<file>', got {raw!r}")


def _write_json(path, payload: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


# ---------------------------------------------------------------------------
# test
# ---------------------------------------------------------------------------


def _cmd_test(args) -> int:
    seed = _materialize_seed(args.seed)
    print(f"seed = {seed}")
    try:
        if not Path(args.input).is_file():
            raise CliInputError(f"input file not found: {args.input}")
        dataset = load_csv(args.input, label_column=_parse_label_column(args.label_column))
        if args.rotate:
            dataset = rotate_to_diagonal(dataset).rotated

        eigen = _parse_eigen(args.eigen)
        assigner = _parse_assigner(args.assigner, args)
        sim_assigner = _parse_assigner(args.sim_assigner, args) if args.sim_assigner else None

        if args.method == "diproperm":
            if np.any(dataset.labels == UNLABELED):
                raise CliInputError("diproperm requires full labels")
        elif args.method == "sigpal":
            if assigner.needs_labels() and (dataset.n_pos < 1 or dataset.n_neg < 1):
                raise CliInputError(
                    f"assigner {args.assigner!r} needs labeled rows from both classes"
                )
    except SigPalError as exc:
        # anything wrong before the engine starts is an input problem
        raise CliInputError(str(exc)) from exc

    if args.method == "sigclust":
        result = sigclust(
            dataset.X, eigen_method=eigen, n_sim=args.n_sim, seed=seed,
            workers=args.threads, add_one=args.add_one,
        )
    elif args.method == "sigpal":
        result = sigpal(
            dataset, assigner, sim_assigner=sim_assigner, eigen_method=eigen,
            n_sim=args.n_sim, seed=seed, workers=args.threads,
            add_one=args.add_one, label_mode=args.label_mode,
        )
    else:
        result = diproperm(
            dataset.X, dataset.labels, statistic=args.statistic.replace("-", "_"),
            n_perm=args.n_perm, seed=seed, workers=args.threads, add_one=args.add_one,
        )

    config = {
        "subcommand": "test",
        "method": args.method,
        "assigner": assigner.to_dict() if args.method == "sigpal" else None,
        "sim_assigner": sim_assigner.to_dict() if sim_assigner else None,
        "eigen": args.eigen,
        "n_sim": args.n_sim,
        "n_perm": args.n_perm,
        "statistic": args.statistic,
        "alpha": args.alpha,
        "seed": seed,
        "rotate": args.rotate,
        "input": str(args.input),
        "output": str(args.output) if args.output else None,
        "format": args.format,
        "label_column": args.label_column,
        "add_one": args.add_one,
        "label_mode": args.label_mode,
    }
    out_path = Path(args.output) if args.output else Path(str(args.input) + ".result.json")
    if args.format == "json":
        _write_json(out_path, {"config": config, "result": result.to_dict()})
    else:
        result.write_nulls_csv(out_path)
    if args.nulls_csv:
        result.write_nulls_csv(args.nulls_csv)

    decision = "reject" if result.p_value < args.alpha else "fail to reject"
    print(f"method = {args.method}")
    print(f"p-value = {result.p_value!r}")
    print(f"decision at alpha={args.alpha}: {decision} H0")
    print(f"wrote {out_path}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------


def _resolve_preset(args) -> Preset:
    if bool(args.preset) == bool(args.config):
        raise CliInputError("pass exactly one of --preset or --config")
    if args.config:
        if not Path(args.config).is_file():
            raise CliInputError(f"config file not found: {args.config}")
        preset = load_preset_file(args.config)
    else:
        try:
            preset = load_preset(args.preset)
        except SigPalError as exc:
            raise CliInputError(str(exc)) from exc
    if args.desk_scale:
        preset = preset.scaled()
    return preset


def _cmd_simulate(args) -> int:
    seed = _materialize_seed(args.seed)
    print(f"seed = {seed}")
    preset = _resolve_preset(args)
    reps = args.reps or preset.reps
    n_sim = args.n_sim or preset.n_sim

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    row_streams = SeedSequence(seed).spawn(len(preset.rows))

    summary = {
        "preset": preset.name,
        "description": preset.description,
        "desk_scale": preset.desk_scale,
        "reps": reps,
        "n_sim": n_sim,
        "alpha": preset.alpha,
        "seed": seed,
        "methods": [m.to_dict() for m in preset.methods],
        "rows": {},
    }
    for (label, gen), stream in zip(preset.rows, row_streams):
        report = run_experiment(
            gen, list(preset.methods), reps=reps, n_sim=n_sim,
            alpha=preset.alpha, seed=seed_of(stream), workers=args.threads,
        )
        csv_path = out_dir / f"{label}.csv"
        report.to_csv(csv_path)
        summary["rows"][label] = report.summary_dict()
        print(f"{label}: rejections at alpha={preset.alpha}: {report.rejections()}")
    _write_json(out_dir / "summary.json", summary)
    print(f"wrote {out_dir}/summary.json")
    return EXIT_OK


# ---------------------------------------------------------------------------
# theory
# ---------------------------------------------------------------------------


def _parse_grid(raw: str) -> np.ndarray:
    parts = raw.split(":")
    if len(parts) != 3:
        raise CliInputError(f"--grid must look like start:stop:step, got {raw!r}")
    try:
        start, stop, step = (float(p) for p in parts)
    except ValueError as exc:
        raise CliInputError(f"non-numeric grid bound in {raw!r}") from exc
    if step <= 0:
        raise CliInputError("grid step must be positive")
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    if count < 1 or stop < start:
        raise CliInputError("empty theta grid")
    grid = start + step * np.arange(count)
    if np.any(grid < -1e-12) or np.any(grid > 1 + 1e-12):
        raise CliInputError("theta grid must stay within [0, 1]")
    return np.clip(grid, 0.0, 1.0)


def _cmd_theory(args) -> int:
    if args.dsweep:
        return _cmd_theory_dsweep(args)
    if not 0.0 < args.r <= 1.0:
        raise CliInputError(f"--r must lie in (0, 1], got {args.r}")
    grid = _parse_grid(args.grid)
    out_path = Path(args.output or "tci-curve.csv")
    with open(out_path, "w", encoding="utf-8", newline="") as fh:
        fh.write("theta,tci_sigpal,tci_sigclust,difference\n")
        for theta in grid:
            fh.write(
                f"{float(theta)!r},{tci_sigpal(theta, args.r)!r},"
                f"{tci_sigclust(args.r)!r},{tci_difference(theta, args.r)!r}\n"
            )
    print(f"wrote {out_path} ({grid.size} rows, r={args.r})")
    return EXIT_OK


def _cmd_theory_dsweep(args) -> int:
    seed = _materialize_seed(args.seed)
    print(f"seed = {seed}")
    try:
        d_grid = tuple(int(tok) for tok in args.dsweep.split(","))
    except ValueError as exc:
        raise CliInputError(f"--dsweep must be comma-separated integers: {args.dsweep!r}") from exc
    try:
        config = AsymptoticStudyConfig(
            a=args.a, d_grid=d_grid, reps=args.reps or 20,
            eta=args.eta, n=args.n, labeled_per_class=args.labeled_per_class,
        )
    except SigPalError as exc:
        raise CliInputError(str(exc)) from exc
    study = asymptotic_pvalue_study(
        config, seed=seed, n_sim=args.n_sim, workers=args.threads
    )
    out_path = Path(args.output or "dsweep.csv")
    with open(out_path, "w", encoding="utf-8", newline="") as fh:
        fh.write("d,mean_p,sd_p\n")
        for d, mean_p, sd_p in study.table():
            fh.write(f"{d},{mean_p!r},{sd_p!r}\n")
    print(f"wrote {out_path}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sigpal",
        description="Monte-Carlo significance tests for partially labeled data.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    test = sub.add_parser("test", help="run a hypothesis test on a CSV file")
    test.add_argument("--input", required=True, help="CSV file (label column +1/-1/NA)")
    test.add_argument("--method", choices=("sigpal", "sigclust", "diproperm"), default="sigpal")
    test.add_argument(
        "--assigner",
        choices=("two-means", "cop-kmeans", "s3lda", "l1-lda"),
        default="cop-kmeans",
    )
    test.add_argument(
        "--sim-assigner",
        choices=("two-means", "cop-kmeans", "s3lda", "l1-lda"),
        default=None,
        help="assigner for the simulated replicates (defaults to --assigner)",
    )
    test.add_argument("--eigen", default="soft", help="hard | soft | known:<json file>")
    test.add_argument("--n-sim", type=int, default=100)
    test.add_argument("--n-perm", type=int, default=100)
    test.add_argument("--statistic", choices=("mean-diff", "t-stat"), default="mean-diff")
    test.add_argument("--alpha", type=float, default=0.05)
    test.add_argument("--seed", type=int, default=None)
    test.add_argument("--rotate", action="store_true", help="rotate to a diagonal covariance first")
    test.add_argument("--label-column", default=None, help="label column name or 0-based index")
    test.add_argument("--output", default=None, help="result path (default <input>.result.json)")
    test.add_argument("--format", choices=("json", "csv"), default="json")
    test.add_argument("--nulls-csv", default=None, help="also dump null statistics, one per line")
    test.add_argument("--add-one", action="store_true", help="(count+1)/(N+1) p-value correction")
    test.add_argument("--label-mode", choices=("counts", "uniform"), default="counts")
    test.add_argument("--restarts", type=int, default=10)
    test.add_argument("--max-iters", type=int, default=100)
    test.add_argument("--c", type=float, default=1.0, help="s3lda unlabeled-term weight")
    test.add_argument("--penalty", type=float, default=0.1, help="l1-lda lasso penalty")
    test.add_argument("--steps", type=int, default=500, help="s3lda subgradient steps")
    test.add_argument("--threads", type=int, default=_default_threads())
    test.set_defaults(fn=_cmd_test)

    sim = sub.add_parser("simulate", help="run an experiment preset")
    sim.add_argument("--preset", default=None, help=f"one of: {', '.join(available_presets())}")
    sim.add_argument("--config", default=None, help="preset JSON file")
    sim.add_argument("--desk-scale", action="store_true", help="halve reps and null draws")
    sim.add_argument("--reps", type=int, default=None, help="override replication count")
    sim.add_argument("--n-sim", type=int, default=None, help="override null draw count")
    sim.add_argument("--seed", type=int, default=None)
    sim.add_argument("--out", default="sigpal-report", help="output directory")
    sim.add_argument("--threads", type=int, default=_default_threads())
    sim.set_defaults(fn=_cmd_simulate)

    theory = sub.add_parser("theory", help="closed-form TCI curves and the large-d sweep")
    theory.add_argument("--r", type=float, default=0.5, help="lambda_1 / sum(lambda) in (0, 1]")
    theory.add_argument("--grid", default="0:1:0.01", help="theta grid start:stop:step")
    theory.add_argument("--output", default=None)
    theory.add_argument("--dsweep", default=None, help="comma-separated d grid for the p-value sweep")
    theory.add_argument("--a", type=float, default=1.0, help="per-coordinate signal for --dsweep")
    theory.add_argument("--eta", type=float, default=0.5)
    theory.add_argument("--n", type=int, default=40)
    theory.add_argument("--labeled-per-class", type=int, default=5)
    theory.add_argument("--reps", type=int, default=None)
    theory.add_argument("--n-sim", type=int, default=100)
    theory.add_argument("--seed", type=int, default=None)
    theory.add_argument("--threads", type=int, default=_default_threads())
    theory.set_defaults(fn=_cmd_theory)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except CliInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except SigPalError as exc:
        print(f"engine failure: {exc}", file=sys.stderr)
        return EXIT_ENGINE_FAILURE


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
