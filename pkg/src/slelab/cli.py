"""Command-line entry point: ``slelab sample`` and ``slelab experiment``.

Exit codes: 0 ok, 2 usage / invalid configuration, 3 numeric failure,
4 partial run (some units failed or were deferred; completed units are kept).
"""

import argparse
import csv
import datetime
import hashlib
import io
import json
import os
import sys
import time
from fractions import Fraction
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .experiments import (
    ConfigError,
    ExperimentConfig,
    ExperimentRecord,
    aggregate,
    plan_units,
    run_unit,
    validate_record,
)
from .rng import RngStream
from .sle import DEFAULT_MAX_STEPS, SleError, sample_chordal, sample_radial, sample_two_sided_radial
from .stochastic import ThetaIntegrationError

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_PARTIAL = 0, 2, 3, 4


class UsageError(Exception):
    pass


# ------------------------------------------------------------------ sample


def cmd_sample(args):
    if args.kappa is None or not (0.0 < args.kappa <= 4.0):
        raise UsageError(f"--kappa must lie in (0, 4] for trace extraction (got {args.kappa})")
    rng = RngStream(args.seed)
    try:
        if args.kind == "chordal":
            if args.tmax is None:
                raise UsageError("--tmax is required for chordal samples")
            s = sample_chordal(args.kappa, args.dt, args.tmax, rng, max_steps=args.max_steps)
        elif args.kind == "radial":
            if args.tmax is None:
                raise UsageError("--tmax is required for radial samples")
            s = sample_radial(args.kappa, args.dt, args.tmax, rng, max_steps=args.max_steps)
        else:
            if args.cr_stop is None or args.theta is None:
                raise UsageError("--cr-stop and --theta are required for two-sided samples")
            s = sample_two_sided_radial(args.kappa, args.theta, args.dt, args.cr_stop, rng,
                                        max_steps=args.max_steps)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    out = Path(args.out)
    s.curve.to_csv(out)
    sidecar = out.with_suffix(".json")
    sidecar.write_text(json.dumps(s.sidecar(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    print(f"wrote {out} ({len(s.curve)} vertices) and {sidecar}")
    return EXIT_OK


# ------------------------------------------------------------------ runs


@dataclass
class RunManifest:
    run_id: str
    config_hash: str
    created_at: str
    outputs: dict
    status: str = "pending"  # pending | running | done | failed
    completed: str = ""  # one character per unit: '1' done, '0' missing, 'x' failed
    errors: dict = field(default_factory=dict)

    def to_json(self):
        return json.dumps(asdict(self), indent=2, sort_keys=True)

    @classmethod
    def load(cls, path):
        return cls(**json.loads(Path(path).read_text(encoding="utf-8")))


def config_hash(cfg):
    return hashlib.sha256(cfg.to_json().encode("utf-8")).hexdigest()


class RunStore:
    """Single writer for one run directory."""

    def __init__(self, root, run_id):
        self.dir = Path(root) / run_id
        self.units_dir = self.dir / "units"
        self.run_id = run_id

    @property
    def manifest_path(self):
        return self.dir / "manifest.json"

    @property
    def config_path(self):
        return self.dir / "config.json"

    def create(self, cfg, n_units):
        self.units_dir.mkdir(parents=True, exist_ok=True)
        self.config_path.write_text(cfg.to_json() + "\n", encoding="utf-8")
        m = RunManifest(self.run_id, config_hash(cfg), datetime.datetime.now(datetime.timezone.utc).isoformat(),
                        {"record": str(self.dir / "record.json"), "cells": str(self.dir / "cells.csv"),
                         "units": str(self.units_dir)}, "pending", "0" * n_units)
        self.write_manifest(m)
        return m

    def write_manifest(self, m):
        tmp = self.manifest_path.with_suffix(".tmp")
        tmp.write_text(m.to_json() + "\n", encoding="utf-8")
        os.replace(tmp, self.manifest_path)

    def unit_path(self, i):
        return self.units_dir / f"{i:06d}.json"

    def write_unit(self, i, result):
        tmp = self.unit_path(i).with_suffix(".tmp")
        tmp.write_text(json.dumps(result, sort_keys=True) + "\n", encoding="utf-8")
        os.replace(tmp, self.unit_path(i))

    def load_units(self, n_units):
        out = {}
        for i in range(n_units):
            p = self.unit_path(i)
            if p.exists():
                out[i] = json.loads(p.read_text(encoding="utf-8"))
        return out


def cells_csv(cells):
    keys = ["x", "n", "hits", "p_hat", "stderr"]
    extra = sorted({k for c in cells for k in c} - set(keys))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(keys + extra)
    for c in cells:
        w.writerow([c.get(k, "") for k in keys + extra])
    return buf.getvalue()


def _parse_grid(text):
    try:
        if ":" in text:
            lo, step, hi = (float(v) for v in text.split(":"))
            n = int(round((hi - lo) / step)) + 1
            return [round(lo + k * step, 12) for k in range(n)]
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise UsageError(f"cannot parse grid {text!r}: {exc}") from exc


_OVERRIDES = {"kappa": "kappa", "replicates": "replicates", "dt": "dt_base", "seed": "master_seed", "s": "s",
              "theta": "theta", "chunk": "chunk", "frac": "frac", "n_instances": "n_instances",
              "n_random": "n_random", "exc_samples": "exc_samples", "epsilon": "epsilon",
              "tolerance": "tolerance", "max_steps": "max_steps"}


def build_config(args):
    d = {}
    if args.config:
        try:
            d = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(d, dict):
            raise ConfigError("config must be a JSON object")
    if args.id:
        if d.get("experiment_id", args.id) != args.id:
            raise ConfigError(f"--id {args.id} conflicts with config experiment_id {d['experiment_id']}")
        d["experiment_id"] = args.id
    for flag, key in _OVERRIDES.items():
        v = getattr(args, flag, None)
        if v is not None:
            d[key] = v
    if args.grid is not None:
        d["grid"] = _parse_grid(args.grid)
    return ExperimentConfig.from_dict(d)


def _default_jobs():
    try:
        return max(1, int(os.environ.get("SLELAB_JOBS", "1")))
    except ValueError:
        return 1


def cmd_experiment(args):
    t0 = time.perf_counter()
    root = Path(args.out_dir)
    if args.resume:
        store = RunStore(root, args.resume)
        if not store.manifest_path.exists():
            raise UsageError(f"no run {args.resume!r} under {root}")
        cfg = ExperimentConfig.from_json(store.config_path.read_text(encoding="utf-8"))
        manifest = RunManifest.load(store.manifest_path)
        if manifest.config_hash != config_hash(cfg):
            raise ConfigError("stored config does not match the manifest hash")
    else:
        if not args.id and not args.config:
            raise UsageError("--id or --config is required (or --resume RUN_ID)")
        cfg = build_config(args)
        run_id = args.run_id or f"{cfg.experiment_id}-{config_hash(cfg)[:12]}"
        store = RunStore(root, run_id)
        if store.manifest_path.exists():
            raise UsageError(f"run {run_id!r} already exists; use --resume {run_id}")
        manifest = store.create(cfg, len(plan_units(cfg)))
    units = plan_units(cfg)
    results = store.load_units(len(units))
    bitmap = ["1" if i in results else "0" for i in range(len(units))]
    manifest.status = "running"
    manifest.errors = {}
    store.write_manifest(manifest)

    todo = [i for i in range(len(units)) if i not in results]
    if args.max_units is not None:
        todo = todo[: max(0, args.max_units)]
    jobs = args.jobs if args.jobs is not None else _default_jobs()

    def done(i, res):
        results[i] = res
        store.write_unit(i, res)
        bitmap[i] = "1"
        manifest.completed = "".join(bitmap)
        store.write_manifest(manifest)

    def failed(i, exc):
        bitmap[i] = "x"
        manifest.errors[str(i)] = f"{type(exc).__name__}: {exc}"
        manifest.completed = "".join(bitmap)
        store.write_manifest(manifest)
        print(f"unit {i} failed: {exc}", file=sys.stderr)

    if jobs > 1 and len(todo) > 1:
        from concurrent.futures import ProcessPoolExecutor, as_completed

        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futs = {pool.submit(run_unit, cfg, units[i]): i for i in todo}
            for f in as_completed(futs):
                i = futs[f]
                try:
                    done(i, f.result())
                except (SleError, ThetaIntegrationError, ArithmeticError, RuntimeError, ValueError) as exc:
                    failed(i, exc)
    else:
        for i in todo:
            try:
                done(i, run_unit(cfg, units[i]))
            except (SleError, ThetaIntegrationError, ArithmeticError, RuntimeError, ValueError) as exc:
                failed(i, exc)

    if len(results) < len(units):
        manifest.status = "failed" if manifest.errors else "pending"
        store.write_manifest(manifest)
        print(f"run {store.run_id}: {len(results)}/{len(units)} units complete "
              f"({len(manifest.errors)} failed); resume with --resume {store.run_id}")
        return EXIT_PARTIAL

    ordered = [results[i] for i in range(len(units))]
    cells, fit, verdicts, notes = aggregate(cfg, units, ordered)
    rec = ExperimentRecord(cfg.experiment_id, cfg.to_dict(), cells, fit, verdicts,
                           round(time.perf_counter() - t0, 3), notes=notes)
    d = rec.to_dict()
    validate_record(d)
    Path(manifest.outputs["record"]).write_text(json.dumps(d, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    Path(manifest.outputs["cells"]).write_text(cells_csv(cells), encoding="utf-8")
    manifest.status = "done"
    store.write_manifest(manifest)
    print(f"run {store.run_id}: record {manifest.outputs['record']}")
    for line in rec.verdict_lines():
        print(line)
    return EXIT_OK


# ------------------------------------------------------------------ parser


def real(text):
    """Float argument that also accepts fractions such as ``8/3``."""
    try:
        return float(Fraction(text.strip()))
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"invalid real value: {text!r}") from None


def build_parser():
    p = argparse.ArgumentParser(prog="slelab", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("sample", help="sample one SLE trace to CSV + JSON sidecar")
    s.add_argument("--kind", choices=["chordal", "radial", "two-sided"], required=True)
    s.add_argument("--kappa", type=real, required=True, help="e.g. 4, 2.5 or 8/3")
    s.add_argument("--dt", type=float, default=1e-3, help="base capacity-time step")
    s.add_argument("--tmax", type=float, help="capacity-time horizon (chordal, radial)")
    s.add_argument("--cr-stop", type=float, help="conformal-radius stop (two-sided)")
    s.add_argument("--theta", type=float, help="target angle θ: the curve aims at e^{2iθ} (two-sided)")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--max-steps", dest="max_steps", type=int, default=DEFAULT_MAX_STEPS,
                   help="step budget; exceeding it is a numeric failure (exit 3)")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_sample)

    e = sub.add_parser("experiment", help="run (or resume) an experiment")
    e.add_argument("--id", choices=["thm1", "thm2", "thm3", "boundary_est", "at_most_half", "crosscut_sum",
                                    "theta_stationary"])
    e.add_argument("--config", help="JSON config file (flags override it)")
    e.add_argument("--resume", metavar="RUN_ID")
    e.add_argument("--run-id")
    e.add_argument("--out-dir", default="runs")
    e.add_argument("--jobs", type=int, default=None, help="worker processes (default $SLELAB_JOBS or 1)")
    e.add_argument("--max-units", type=int, default=None, help="compute at most this many units, then stop")
    e.add_argument("--kappa", type=real)
    e.add_argument("--replicates", type=int)
    e.add_argument("--dt", type=float)
    e.add_argument("--seed", type=int)
    e.add_argument("--grid", help="comma list or lo:step:hi")
    e.add_argument("--s", type=float)
    e.add_argument("--theta", type=float)
    e.add_argument("--chunk", type=int)
    e.add_argument("--frac", type=float)
    e.add_argument("--n-instances", dest="n_instances", type=int)
    e.add_argument("--n-random", dest="n_random", type=int)
    e.add_argument("--exc-samples", dest="exc_samples", type=int)
    e.add_argument("--epsilon", type=float)
    e.add_argument("--tolerance", type=float)
    e.add_argument("--max-steps", dest="max_steps", type=int)
    e.set_defaults(func=cmd_experiment)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_USAGE
    try:
        return args.func(args)
    except (UsageError, ConfigError) as exc:
        print(f"slelab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SleError, ThetaIntegrationError, FloatingPointError) as exc:
        print(f"slelab: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
