"""Result files: JSON summaries, CSV traces and samples, state snapshots."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .errors import SimulationError
from .fock import FockState
from .gaussian import GaussianState
from .qaoa import RunResult


def state_snapshot(state) -> dict:
    if isinstance(state, FockState):
        return {
            "backend": "fock",
            "n_modes": state.n_modes,
            "cutoff": state.cutoff,
            "hbar": state.hbar,
            "truncation_loss": state.truncation_loss,
            "amplitudes": [[float(a.real), float(a.imag)] for a in state.amplitudes],
        }
    if isinstance(state, GaussianState):
        return {
            "backend": "gaussian",
            "n_modes": state.n_modes,
            "hbar": state.hbar,
            "mean": state.mean.tolist(),
            "cov": state.cov.tolist(),
        }
    raise TypeError(f"cannot snapshot {type(state).__name__}")


def state_from_snapshot(snap: dict | None):
    if not snap:
        raise SimulationError("result holds no final state snapshot")
    try:
        if snap["backend"] == "fock":
            amps = np.array([complex(re, im) for re, im in snap["amplitudes"]])
            return FockState(snap["n_modes"], snap["cutoff"], amps, snap["hbar"], snap.get("truncation_loss", 0.0))
        if snap["backend"] == "gaussian":
            return GaussianState(snap["n_modes"], np.array(snap["mean"]), np.array(snap["cov"]), snap["hbar"])
    except (KeyError, TypeError, ValueError) as e:
        raise SimulationError(f"malformed state snapshot: {e}") from None
    raise SimulationError(f"unknown snapshot backend {snap.get('backend')!r}")


def result_dict(res: RunResult, *, config: dict, config_hash: str, seed: int, kind: str) -> dict:
    """Deterministic summary; wall times are kept out (see :func:`diagnostics_dict`)."""
    return {
        "config_hash": config_hash,
        "seed": seed,
        "problem_kind": kind,
        "n_modes": res.n_modes,
        "gamma": res.gamma.tolist(),
        "beta": res.beta.tolist(),
        "best_cost": res.best_cost,
        "best_sample": res.best_sample.tolist(),
        "reference_optimum": res.reference_optimum,
        "success_probability": res.success_probability,
        "final_estimate": res.final_estimate,
        "iterations": len(res.trace),
        "evaluations": res.evaluations,
        "converged": res.converged,
        "truncation_loss": res.truncation_loss,
        "config": config,
        "state": state_snapshot(res.state),
    }


def diagnostics_dict(res: RunResult, *, config_hash: str, seed: int) -> dict:
    return {"config_hash": config_hash, "seed": seed, "wall_time_s": res.wall_time}


def write_json(path, data: dict) -> None:
    Path(path).write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")


def read_json(path) -> dict:
    return json.loads(Path(path).read_text())


def provenance(config_hash: str, seed) -> str:
    return f"config_hash={config_hash} seed={seed}"


def _open_csv(path, comment: str):
    fh = Path(path).open("w", newline="")
    fh.write(f"# {comment}\n")
    return fh, csv.writer(fh)


def write_trace(path, res: RunResult, comment: str) -> None:
    q = len(res.gamma)
    n2 = 2 * res.n_modes
    fh, w = _open_csv(path, comment)
    with fh:
        w.writerow(
            ["t", *[f"gamma_{j + 1}" for j in range(q)], *[f"beta_{j + 1}" for j in range(q)], "cost", "best_sample_cost", "success"]
            + [f"{'xp'[k % 2]}{k // 2}" for k in range(n2)]
        )
        for r in res.trace:
            w.writerow([r.t, *map(repr, map(float, r.gamma)), *map(repr, map(float, r.beta)), repr(r.cost), repr(r.best_sample_cost), r.success, *map(repr, map(float, r.best_sample))])


def write_samples(path, res: RunResult, comment: str) -> None:
    n2 = 2 * res.n_modes
    fh, w = _open_csv(path, comment)
    with fh:
        w.writerow(["index"] + [f"{'xp'[k % 2]}{k // 2}" for k in range(n2)] + ["cost"])
        for i, (s, c) in enumerate(zip(res.final_samples, res.final_costs)):
            w.writerow([i, *map(repr, map(float, s)), repr(float(c))])


REPORT_FIELDS = [
    "row", "encoding", "n", "depth", "cutoff", "seed", "n_modes", "hilbert_dim",
    "best_cost", "reference_optimum", "success_probability", "iterations", "evaluations",
    "wall_time_s", "truncation_loss", "status", "message",
]
AGG_COLUMNS = ("best_cost", "success_probability", "wall_time_s")


def aggregate(rows: list[dict]) -> list[dict]:
    """Median, IQR and mean per (encoding, n, depth, cutoff) cell over seeds."""
    cells: dict[tuple, list[dict]] = {}
    for r in rows:
        if r["status"] == "ok":
            cells.setdefault((r["encoding"], r["n"], r["depth"], r["cutoff"]), []).append(r)
    out = []
    for key in sorted(cells, key=lambda k: tuple(str(v) for v in k)):
        group = cells[key]
        for stat in ("median", "iqr", "mean"):
            row = {f: "" for f in REPORT_FIELDS}
            row.update(row=stat, encoding=key[0], n=key[1], depth=key[2], cutoff=key[3], seed=f"{len(group)} seeds", status="ok")
            row.update(n_modes=group[0]["n_modes"], hilbert_dim=group[0]["hilbert_dim"], reference_optimum=group[0]["reference_optimum"])
            for col in AGG_COLUMNS:
                v = np.array([g[col] for g in group], dtype=float)
                if stat == "median":
                    row[col] = float(np.median(v))
                elif stat == "mean":
                    row[col] = float(np.mean(v))
                else:
                    q75, q25 = np.percentile(v, [75, 25])
                    row[col] = float(q75 - q25)
            out.append(row)
    return out


def write_report(path, rows: list[dict], comment: str) -> None:
    fh, _ = _open_csv(path, comment)
    with fh:
        w = csv.DictWriter(fh, fieldnames=REPORT_FIELDS)
        w.writeheader()
        for r in rows:
            w.writerow({k: r.get(k, "") for k in REPORT_FIELDS})
        for r in aggregate(rows):
            w.writerow(r)


def read_report(path) -> list[dict]:
    with Path(path).open() as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    return list(csv.DictReader(lines))
