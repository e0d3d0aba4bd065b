"""Command-line entry point: ``plapsim classify|solve|verify|sweep``."""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields

import numpy as np

from . import __version__, analytic, harness
from .model import (
    DomainSpec,
    Interval,
    ProblemParams,
    classify_regime,
    domain_from_dict,
    validate,
)
from .solver import BLOWUP, COMPLETED, SERIES_COLUMNS, Grid, SolverConfig, run

EXIT_OK, EXIT_VERIFY, EXIT_BLOWUP, EXIT_INVALID, EXIT_NUMERIC = 0, 1, 2, 3, 4

INITIAL_KINDS = ("bump", "analytic-sub", "table")


class ConfigError(ValueError):
    pass


def _reject_unknown(section: str, d: dict, allowed) -> None:
    if not isinstance(d, dict):
        raise ConfigError(f"section {section!r} must be an object")
    unknown = set(d) - set(allowed)
    if unknown:
        raise ConfigError(f"unknown keys in {section!r}: {sorted(unknown)}")


@dataclass(frozen=True)
class InitialSpec:
    kind: str = "bump"
    amplitude: float = 1.0
    width: float = 0.5
    multiplier: float = 1.0
    path: str = ""

    def __post_init__(self):
        if self.kind not in INITIAL_KINDS:
            raise ConfigError(f"initial kind must be one of {INITIAL_KINDS}, got {self.kind!r}")
        if self.kind == "table" and not self.path:
            raise ConfigError("table initial data needs a path")
        if not 0 < self.width <= 1:
            raise ConfigError("bump width must lie in (0, 1]")

    def to_dict(self) -> dict:
        d = {"kind": self.kind}
        if self.kind == "bump":
            d.update(amplitude=self.amplitude, width=self.width)
        elif self.kind == "analytic-sub":
            d.update(multiplier=self.multiplier)
        else:
            d.update(path=self.path)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "InitialSpec":
        _reject_unknown("initial", d, {f.name for f in fields(cls)})
        kw = dict(d)
        for k in ("amplitude", "width", "multiplier"):
            if k in kw:
                kw[k] = float(kw[k])
        return cls(**kw)


@dataclass(frozen=True)
class OutputSpec:
    directory: str = "out"
    series_every: int = 1

    def __post_init__(self):
        if self.series_every < 1:
            raise ConfigError("series_every must be >= 1")

    def to_dict(self) -> dict:
        return {"directory": self.directory, "series_every": self.series_every}

    @classmethod
    def from_dict(cls, d: dict) -> "OutputSpec":
        _reject_unknown("output", d, {"directory", "series_every"})
        kw = dict(d)
        if "series_every" in kw:
            kw["series_every"] = int(kw["series_every"])
        return cls(**kw)


@dataclass(frozen=True)
class SweepSpec:
    axes: dict = field(default_factory=dict)  # parameter name -> list of values
    solve: bool = False

    def __post_init__(self):
        names = {f.name for f in fields(ProblemParams)}
        for k, v in self.axes.items():
            if k not in names:
                raise ConfigError(f"unknown sweep axis {k!r}")
            if not isinstance(v, list):
                raise ConfigError(f"sweep axis {k!r} must be a list")

    def to_dict(self) -> dict:
        return {"axes": {k: list(v) for k, v in self.axes.items()}, "solve": self.solve}

    @classmethod
    def from_dict(cls, d: dict) -> "SweepSpec":
        _reject_unknown("sweep", d, {"axes", "solve"})
        axes = d.get("axes", {})
        if not isinstance(axes, dict):
            raise ConfigError("sweep axes must be an object")
        return cls({k: [float(x) for x in v] if isinstance(v, list) else v
                    for k, v in axes.items()}, bool(d.get("solve", False)))

    def tuples(self, base: ProblemParams):
        names = list(self.axes)
        if not names or any(len(v) == 0 for v in self.axes.values()):
            return names, []
        out = []
        for combo in itertools.product(*(self.axes[n] for n in names)):
            out.append((dict(zip(names, combo)), base.to_dict() | dict(zip(names, combo))))
        return names, out


@dataclass(frozen=True)
class RunConfig:
    problem: ProblemParams = field(default_factory=ProblemParams)
    domain: DomainSpec = field(default_factory=Interval)
    initial: InitialSpec = field(default_factory=InitialSpec)
    solver: SolverConfig = field(default_factory=SolverConfig)
    output: OutputSpec = field(default_factory=OutputSpec)
    seed: int = 42
    sweep: SweepSpec | None = None

    SECTIONS = ("problem", "domain", "initial", "solver", "output", "seed", "sweep")

    def to_dict(self) -> dict:
        d = {
            "problem": self.problem.to_dict(),
            "domain": self.domain.to_dict(),
            "initial": self.initial.to_dict(),
            "solver": self.solver.to_dict(),
            "output": self.output.to_dict(),
            "seed": self.seed,
        }
        if self.sweep is not None:
            d["sweep"] = self.sweep.to_dict()
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        _reject_unknown("config", d, cls.SECTIONS)
        try:
            seed = d.get("seed", 42)
            if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
                raise ConfigError("seed must be a non-negative integer")
            return cls(
                problem=ProblemParams.from_dict(d.get("problem", {})),
                domain=domain_from_dict(d.get("domain", {"shape": "interval"})),
                initial=InitialSpec.from_dict(d.get("initial", {})),
                solver=SolverConfig.from_dict(d.get("solver", {})),
                output=OutputSpec.from_dict(d.get("output", {})),
                seed=seed,
                sweep=SweepSpec.from_dict(d["sweep"]) if d.get("sweep") is not None else None,
            )
        except ConfigError:
            raise
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        try:
            d = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"malformed config: {exc}") from exc
        if not isinstance(d, dict):
            raise ConfigError("config must be a JSON object")
        return cls.from_dict(d)

    @classmethod
    def load(cls, path: str) -> "RunConfig":
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
        return cls.from_json(text)


# -- helpers ------------------------------------------------------------------

def fmt(x) -> str:
    return "%.17g" % x


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else repr(x)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def dump_json(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2) + "\n"


def build_initial(cfg: RunConfig, grid: Grid):
    """Initial field on the grid plus any resolved constants worth recording."""
    ini = cfg.initial
    if ini.kind == "bump":
        return harness.bump(grid, ini.amplitude, ini.width), {}
    if ini.kind == "analytic-sub":
        spec = analytic.build_subsolution(cfg.problem, cfg.domain)
        u0 = ini.multiplier * analytic.eval_subsolution_elapsed(spec, grid.x, 0.0)
        return u0, {"subsolution": spec.to_dict()}
    try:
        table = np.loadtxt(ini.path, delimiter=",", skiprows=1, ndmin=2)
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot read initial table: {exc}") from exc
    if table.shape[1] != 2 or len(table) < 2:
        raise ConfigError("initial table needs x,u columns and at least two rows")
    order = np.argsort(table[:, 0])
    u0 = np.interp(grid.x, table[order, 0], table[order, 1])
    u0[-1] = 0.0
    if not grid.radial:
        u0[0] = 0.0
    return u0, {}


def write_series(path: str, series, every: int = 1) -> None:
    rows = np.asarray(series)
    idx = list(range(0, len(rows), every))
    if idx[-1] != len(rows) - 1:
        idx.append(len(rows) - 1)
    buf = io.StringIO()
    buf.write(",".join(SERIES_COLUMNS) + "\n")
    for i in idx:
        buf.write(",".join(fmt(v) for v in rows[i]) + "\n")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(buf.getvalue())


def write_snapshot(path: str, x, u) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("x,u\n")
        for xi, ui in zip(x, u):
            fh.write(f"{fmt(xi)},{fmt(ui)}\n")


def _dt_summary(series) -> dict:
    dt = np.asarray(series)[1:, 4]
    if len(dt) == 0:
        return {"steps": 0}
    return {"steps": int(len(dt)), "min": float(dt.min()), "max": float(dt.max()),
            "mean": float(dt.mean()), "last": float(dt[-1])}


# -- commands -----------------------------------------------------------------

def cmd_classify(cfg: RunConfig, out=None) -> int:
    out = out or sys.stdout
    errors = validate(cfg.problem)
    if errors:
        out.write(dump_json({"tag": "Invalid", "violations": errors}))
        return EXIT_INVALID
    verdict = classify_regime(cfg.problem, cfg.domain)
    out.write(dump_json(verdict.to_dict()))
    return EXIT_OK


def solve_config(cfg: RunConfig):
    """Run one configuration. Returns (outcome, manifest, initial field)."""
    grid = Grid.build(cfg.domain, cfg.solver.n)
    u0, resolved = build_initial(cfg, grid)
    t0 = time.perf_counter()
    out = run(u0, grid, cfg.problem, cfg.solver)
    wall = time.perf_counter() - t0
    verdict = classify_regime(cfg.problem, cfg.domain)
    manifest = {
        "plapsim_version": __version__,
        "numpy_version": np.__version__,
        "backend": out.backend,
        "config": cfg.to_dict(),
        "regime": verdict.tag,
        "resolved": {
            "eps_reg": cfg.solver.eps_reg,
            "grid_h": grid.h,
            "grid_nodes": len(grid.x),
            "dt": _dt_summary(out.series),
            **resolved,
        },
        "result": {
            "status": out.status,
            "reason": out.reason,
            "t_final": float(out.t[-1]),
            "steps": out.steps,
            "final_sup_norm": float(out.sup_norm[-1]),
            "max_sup_norm": float(out.sup_norm.max()),
            "T_est": out.T_est,
            "fit": out.fit.to_dict() if out.fit else None,
        },
        "timing": {"solver_wall_time_s": wall},
    }
    return out, manifest, u0


def cmd_solve(cfg: RunConfig, out_dir: str, out=None) -> int:
    out = out or sys.stdout
    errors = validate(cfg.problem)
    if errors:
        out.write(dump_json({"status": "Invalid", "violations": errors}))
        return EXIT_INVALID
    try:
        res, manifest, _ = solve_config(cfg)
    except ConfigError:
        raise
    except ValueError as exc:
        out.write(dump_json({"status": "Invalid", "violations": [str(exc)]}))
        return EXIT_INVALID
    os.makedirs(out_dir, exist_ok=True)
    write_series(os.path.join(out_dir, "series.csv"), res.series, cfg.output.series_every)
    for k, (_, _, u) in enumerate(res.snapshots):
        write_snapshot(os.path.join(out_dir, f"snapshot_{k}.csv"), res.grid.x, u)
    manifest["result"]["snapshots"] = [{"index": k, "step": s, "t": t}
                                       for k, (s, t, _) in enumerate(res.snapshots)]
    with open(os.path.join(out_dir, "manifest.json"), "w", encoding="utf-8") as fh:
        fh.write(dump_json(manifest))
    out.write(dump_json(manifest["result"]))
    return {COMPLETED: EXIT_OK, BLOWUP: EXIT_BLOWUP}.get(res.status, EXIT_NUMERIC)


SUITES = ("lemma", "profile", "subsolution", "supersolution", "comparison")


def run_suite(suite: str, cfg: RunConfig | None, seed: int) -> harness.ExperimentReport:
    if suite == "lemma":
        return harness.lemma_suite(seed)
    if suite == "profile":
        return harness.profile_suite(seed)
    if suite == "subsolution":
        if cfg is None:
            return harness.subsolution_suite()
        return harness.subsolution_suite(cfg.problem, cfg.domain)
    if suite == "supersolution":
        if cfg is None:
            return harness.supersolution_suite()
        grid = Grid.build(cfg.domain, cfg.solver.n)
        u0, _ = build_initial(cfg, grid)
        return harness.supersolution_suite(cfg.problem, cfg.domain, float(np.max(np.abs(u0))))
    if suite == "comparison":
        return harness.comparison_suite(seed)
    raise ValueError(f"unknown suite {suite!r}")


def cmd_verify(suite: str, cfg: RunConfig | None, seed: int, out_dir: str | None,
               out=None) -> int:
    out = out or sys.stdout
    if cfg is not None and suite in ("subsolution", "supersolution") and validate(cfg.problem):
        out.write(dump_json({"status": "Invalid", "violations": validate(cfg.problem)}))
        return EXIT_INVALID
    rep = run_suite(suite, cfg, seed)
    out.write("\n".join(rep.summary_lines()) + "\n")
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
        with open(os.path.join(out_dir, f"report_{suite}.json"), "w", encoding="utf-8") as fh:
            fh.write(dump_json(rep.to_dict()))
    return EXIT_OK if rep.passed else EXIT_VERIFY


SWEEP_TAIL = ("valid", "verdict", "global_case", "status", "T_est", "max_sup_norm", "note")


def sweep_row(job) -> dict:
    """Evaluate one sweep tuple; never raises."""
    index, axis_values, params, cfg_dict, solve = job
    row = {"index": index, **axis_values}
    try:
        P = ProblemParams.from_dict(params)
    except (TypeError, ValueError) as exc:
        return row | {"valid": False, "verdict": "Invalid", "note": str(exc)}
    errors = validate(P)
    if errors:
        return row | {"valid": False, "verdict": "Invalid", "note": "; ".join(errors)}
    cfg = RunConfig.from_dict(cfg_dict | {"problem": params})
    verdict = classify_regime(P, cfg.domain)
    row |= {"valid": True, "verdict": verdict.tag, "global_case": verdict.global_case}
    if solve:
        try:
            res, _, _ = solve_config(cfg)
            row |= {"status": res.status, "T_est": res.T_est,
                    "max_sup_norm": float(res.sup_norm.max()), "note": res.reason}
        except ValueError as exc:
            row |= {"status": "Failed", "note": str(exc)}
    return row


def cmd_sweep(cfg: RunConfig, out_dir: str, jobs: int = 1, out=None) -> int:
    out = out or sys.stdout
    spec = cfg.sweep or SweepSpec()
    names, combos = spec.tuples(cfg.problem)
    base = cfg.to_dict()
    base.pop("sweep", None)
    work = [(i, axis, params, base, spec.solve) for i, (axis, params) in enumerate(combos)]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(sweep_row, work))
    else:
        rows = [sweep_row(w) for w in work]
    header = ["index", *names, *SWEEP_TAIL]
    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, "sweep.csv"), "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_cell(r.get(h)) for h in header])
    out.write(f"{len(rows)} rows -> {os.path.join(out_dir, 'sweep.csv')}\n")
    return EXIT_OK


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return fmt(v)
    return str(v)


# -- entry point --------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration")
    common.add_argument("--out", help="output directory (defaults to output.directory)")
    common.add_argument("--jobs", type=int, default=1, help="parallel sweep workers")
    common.add_argument("--seed", type=int, help="seed for randomized suites (overrides config)")

    ap = argparse.ArgumentParser(prog="plapsim", description=__doc__)
    ap.add_argument("--version", action="version", version=f"plapsim {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("classify", parents=[common], help="classify the configured parameters")
    sub.add_parser("solve", parents=[common], help="run the solver and write artifacts")
    v = sub.add_parser("verify", parents=[common], help="run a verification suite")
    v.add_argument("suite", choices=SUITES)
    sub.add_parser("sweep", parents=[common], help="Cartesian parameter sweep")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.jobs < 1:
        print("error: --jobs must be >= 1", file=sys.stderr)
        return EXIT_INVALID
    if args.seed is not None and args.seed < 0:
        print("error: --seed must be non-negative", file=sys.stderr)
        return EXIT_INVALID
    try:
        cfg = RunConfig.load(args.config) if args.config else None
        if cfg is None and args.command != "verify":
            raise ConfigError(f"{args.command} needs --config")
        if args.command == "verify":
            seed = args.seed if args.seed is not None else (cfg.seed if cfg else 42)
            return cmd_verify(args.suite, cfg, seed, args.out)
        out_dir = args.out or cfg.output.directory
        if args.command == "classify":
            return cmd_classify(cfg)
        if args.command == "solve":
            return cmd_solve(cfg, out_dir)
        return cmd_sweep(cfg, out_dir, args.jobs)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except FloatingPointError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
