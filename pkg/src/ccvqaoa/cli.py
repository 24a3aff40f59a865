"""Command line: ``ccvqaoa run|sweep|compare|wigner``.

Exit codes: 0 success, 2 configuration error, 3 simulation error.
"""

from __future__ import annotations

import argparse
import itertools
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np
import yaml

from . import config as cfgmod
from . import io
from .errors import CCVError, ConfigError
from .qaoa import run
from .wigner import default_axis, wigner

EXIT_CONFIG = 2
EXIT_SIMULATION = 3
DEFAULT_BENCH_SEEDS = list(range(10))


def _seeds(cfg, override, default):
    if override is not None:
        return [override]
    return cfg.seeds if cfg.seeds is not None else default


def _write_wigner(state, out: Path, modes, points: int, comment: str) -> list[dict]:
    cutoff = getattr(state, "cutoff", None)
    axis = default_axis(cutoff, state.hbar, points)
    meta = []
    for m in modes:
        if not 0 <= m < state.n_modes:
            raise ConfigError(f"Wigner mode {m} out of range for {state.n_modes} modes")
        g = wigner(state, m, axis, axis)
        g.to_csv(out / f"wigner_{m}.csv", comment)
        meta.append(g.header())
    return meta


def cmd_run(cfg, seed: int, out: Path) -> int:
    encoded = cfgmod.build_problem(cfg)
    qc = cfgmod.qaoa_config(cfg, seed)
    res = run(encoded, qc)
    h = cfgmod.config_hash(cfg)
    out.mkdir(parents=True, exist_ok=True)
    tag = io.provenance(h, seed)
    io.write_json(out / "result.json", io.result_dict(res, config=cfgmod.resolved(cfg), config_hash=h, seed=seed, kind=cfg.problem.kind))
    io.write_json(out / "diagnostics.json", io.diagnostics_dict(res, config_hash=h, seed=seed))
    io.write_trace(out / "trace.csv", res, tag)
    io.write_samples(out / "samples.csv", res, tag)
    if cfg.wigner.get("modes"):
        _write_wigner(res.state, out, cfg.wigner["modes"], cfg.wigner["points"], tag)
    print(f"best_cost={res.best_cost:.6f} reference={res.reference_optimum:.6f} success={res.success_probability:.3f} -> {out}")
    return 0


def _cell(args) -> dict:
    """One sweep cell; runs in a worker process."""
    data, n, depth, cutoff, seed = args
    cfg = cfgmod.parse_config(data)
    row = {"row": "run", "encoding": cfg.encoding, "n": n, "depth": depth, "cutoff": cutoff, "seed": seed}
    try:
        overrides = {"depth": depth}
        if cutoff:
            overrides["cutoff"] = cutoff
        qc = cfgmod.qaoa_config(cfg, seed, **overrides)
        encoded = cfgmod.build_problem(cfg, n)
        t0 = time.perf_counter()
        res = run(encoded, qc)
        row.update(
            n_modes=res.n_modes,
            hilbert_dim=(qc.cutoff ** res.n_modes) if qc.backend == "fock" else "",
            best_cost=res.best_cost,
            reference_optimum=res.reference_optimum,
            success_probability=res.success_probability,
            iterations=len(res.trace),
            evaluations=res.evaluations,
            wall_time_s=time.perf_counter() - t0,
            truncation_loss=res.truncation_loss,
            status="ok",
            message="",
        )
    except CCVError as e:
        row.update(status="error", message=f"{type(e).__name__}: {e}")
    return row


def _map(fn, tasks, jobs: int):
    if jobs <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, tasks))


def _grid(cfg, seeds):
    q0 = cfg.qaoa.get("depth")
    d0 = cfg.qaoa.get("cutoff")
    sizes = cfg.sweep.get("size", [cfg.problem.n])
    depths = cfg.sweep.get("depth", [q0])
    cutoffs = cfg.sweep.get("cutoff", [d0])
    data = cfgmod.resolved(cfg)
    return [(data, n, q, D, s) for n, q, D, s in itertools.product(sizes, depths, cutoffs, seeds)]


def cmd_sweep(cfg, seeds, jobs: int, out: Path) -> int:
    if not cfg.sweep:
        raise ConfigError("sweep needs a 'sweep' block with at least one of depth, size, cutoff")
    if "cutoff" in cfg.sweep and cfg.qaoa.get("backend") != "fock":
        raise ConfigError("a cutoff sweep needs the Fock backend")
    rows = _map(_cell, _grid(cfg, seeds), jobs)
    out.mkdir(parents=True, exist_ok=True)
    io.write_report(out / "report.csv", rows, io.provenance(cfgmod.config_hash(cfg), ",".join(map(str, seeds))))
    failed = sum(r["status"] != "ok" for r in rows)
    print(f"{len(rows)} cells, {failed} failed -> {out / 'report.csv'}")
    return 0


def cmd_compare(cfg, seeds, jobs: int, out: Path) -> int:
    if cfg.problem.kind not in ("quadratic", "complex-quadratic") or cfg.problem.B is not None:
        raise ConfigError("compare needs an unconstrained quadratic problem")
    tasks = []
    for enc_kind in ("ccv", "cv-baseline"):
        data = cfgmod.resolved(cfg)
        data["encoding"] = enc_kind
        sub = cfgmod.parse_config(data)
        tasks += _grid(sub, seeds)
    rows = _map(_cell, tasks, jobs)
    out.mkdir(parents=True, exist_ok=True)
    io.write_report(out / "report.csv", rows, io.provenance(cfgmod.config_hash(cfg), ",".join(map(str, seeds))))
    for agg in io.aggregate(rows):
        if agg["row"] == "median":
            print(f"{agg['encoding']:>12} n={agg['n']} modes={agg['n_modes']} dim={agg['hilbert_dim']} "
                  f"median best={agg['best_cost']:.4f} success={agg['success_probability']:.3f} time={agg['wall_time_s']:.2f}s")
    return 0


def cmd_wigner(result_path: Path, modes, points: int, out: Path | None) -> int:
    try:
        data = io.read_json(result_path)
    except FileNotFoundError:
        raise ConfigError(f"result file {result_path} not found") from None
    state = io.state_from_snapshot(data.get("state"))
    out = result_path.parent if out is None else out
    out.mkdir(parents=True, exist_ok=True)
    modes = list(range(state.n_modes)) if not modes else modes
    meta = _write_wigner(state, out, modes, points, io.provenance(data.get("config_hash", "?"), data.get("seed", "?")))
    for m, h in zip(modes, meta):
        print(f"mode {m}: negativity_volume={h['negativity_volume']:.6f} -> {out / f'wigner_{m}.csv'}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ccvqaoa", description="Complex continuous-variable QAOA experiments")
    ap.add_argument("command", choices=["run", "sweep", "compare", "wigner"])
    ap.add_argument("--config", type=Path, help="YAML experiment config")
    ap.add_argument("--jobs", type=int, default=1, help="worker processes for sweep/compare")
    ap.add_argument("--dry-run", action="store_true", help="validate and print the resolved config")
    ap.add_argument("--seed", type=int, help="run a single seed")
    ap.add_argument("--out", type=Path, help="output directory (overrides the config)")
    ap.add_argument("--result", type=Path, help="result.json to read (wigner)")
    ap.add_argument("--mode", type=int, action="append", help="mode index for wigner (repeatable)")
    ap.add_argument("--points", type=int, default=201, help="grid points per axis (wigner)")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.jobs < 1:
            raise ConfigError("--jobs must be >= 1")
        if args.command == "wigner":
            result = args.result
            if result is None:
                if args.config is None:
                    raise ConfigError("wigner needs --result or --config")
                result = Path(args.out or cfgmod.load_config(args.config).output) / "result.json"
            if args.dry_run:
                print(f"would read {result}")
                return 0
            return cmd_wigner(result, args.mode, args.points, args.out)
        if args.config is None:
            raise ConfigError(f"{args.command} needs --config")
        cfg = cfgmod.load_config(args.config)
        out = Path(args.out or cfg.output)
        if args.dry_run:
            resolved = cfgmod.resolved(cfg)
            resolved["config_hash"] = cfgmod.config_hash(cfg)
            print(yaml.safe_dump(resolved, sort_keys=True))
            return 0
        if args.command == "run":
            return cmd_run(cfg, _seeds(cfg, args.seed, [0])[0], out)
        seeds = _seeds(cfg, args.seed, DEFAULT_BENCH_SEEDS)
        if args.command == "sweep":
            return cmd_sweep(cfg, seeds, args.jobs, out)
        return cmd_compare(cfg, seeds, args.jobs, out)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except CCVError as e:
        print(f"simulation error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_SIMULATION
    except (np.linalg.LinAlgError, FloatingPointError) as e:
        print(f"simulation error: {e}", file=sys.stderr)
        return EXIT_SIMULATION


if __name__ == "__main__":
    sys.exit(main())
