"""Experiment configuration: YAML in, validated dataclasses out.

Complex numbers are written as ``[re, im]`` pairs and matrices as nested
lists of such pairs.  Unknown keys are rejected at every level.

Example::

    problem:
      preset: quadratic-n1
    qaoa:
      depth: 2
      shots: 50
      squeeze: 0.6
    seeds: [0, 1, 2]
    output: runs/n1
"""

from __future__ import annotations

import copy
import hashlib
import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any

import numpy as np
import yaml

from . import encoding as enc
from .errors import ConfigError, EncodingError
from .polynomial import QuadraturePolynomial
from .qaoa import QaoaConfig

PRESETS: dict[str, dict[str, Any]] = {
    **{f"quadratic-n{n}": {"kind": "quadratic", "n": n} for n in range(1, 5)},
    "constrained-quadratic": {"kind": "constrained-quadratic", "penalty": 10.0},
    "styblinski-tang-2d": {"kind": "styblinski-tang", "n": 2},
    "quartic-complex": {
        "kind": "quartic-complex",
        "hconst": [-0.75, -0.75],
        "b": [float(np.sqrt(6.6403)), 0.0],
        "c": [-4.0708, 4.0708],
    },
}

KINDS = ("quadratic", "complex-quadratic", "constrained-quadratic", "styblinski-tang", "quartic-complex")
SWEEP_AXES = ("depth", "size", "cutoff")


@dataclass
class ProblemConfig:
    kind: str = "quadratic"
    preset: str | None = None
    n: int = 1
    A: list | None = None
    c: list | None = None
    B: list | None = None
    d: list | None = None
    penalty: float | None = None
    hconst: list | None = None
    b: list | None = None
    inequalities: list = field(default_factory=list)


@dataclass
class ExperimentConfig:
    problem: ProblemConfig = field(default_factory=ProblemConfig)
    encoding: str = "ccv"
    qaoa: dict = field(default_factory=dict)
    output: str = "out"
    seeds: list[int] | None = None
    sweep: dict = field(default_factory=dict)
    wigner: dict = field(default_factory=dict)


_QAOA_KEYS = {f.name for f in fields(QaoaConfig)} - {"seed"}
_WIGNER_KEYS = {"modes", "points"}


def _check_keys(section: str, data: dict, allowed) -> None:
    if not isinstance(data, dict):
        raise ConfigError(f"section {section!r} must be a mapping")
    extra = sorted(set(data) - set(allowed))
    if extra:
        raise ConfigError(f"unknown key(s) in {section}: {', '.join(extra)}")


def as_complex(v, name: str = "value") -> complex:
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, (list, tuple)) and len(v) == 2 and all(isinstance(t, (int, float)) for t in v):
        return complex(v[0], v[1])
    raise ConfigError(f"{name} must be a number or an [re, im] pair, got {v!r}")


def as_complex_array(v, name: str) -> np.ndarray:
    def conv(item):
        if isinstance(item, (int, float)) or (
            isinstance(item, (list, tuple)) and len(item) == 2 and all(isinstance(t, (int, float)) for t in item)
        ):
            return as_complex(item, name)
        if isinstance(item, (list, tuple)):
            return [conv(t) for t in item]
        raise ConfigError(f"malformed entry in {name}: {item!r}")

    try:
        return np.array(conv(v), dtype=complex)
    except ValueError as e:
        raise ConfigError(f"{name} is ragged: {e}") from None


def complex_to_pairs(a) -> list:
    a = np.asarray(a, dtype=complex)
    if a.ndim == 0:
        return [float(a.real), float(a.imag)]
    return [complex_to_pairs(x) for x in a]


def parse_config(data: dict | None) -> ExperimentConfig:
    data = {} if data is None else copy.deepcopy(data)
    _check_keys("config", data, {f.name for f in fields(ExperimentConfig)})
    prob = data.get("problem", {}) or {}
    _check_keys("problem", prob, {f.name for f in fields(ProblemConfig)})
    preset = prob.get("preset")
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError(f"unknown preset {preset!r}; choose from {', '.join(PRESETS)}")
        prob = {**PRESETS[preset], **prob}
    problem = ProblemConfig(**prob)
    if problem.kind not in KINDS:
        raise ConfigError(f"unknown problem kind {problem.kind!r}")
    if not isinstance(problem.n, int) or problem.n < 1:
        raise ConfigError("problem.n must be a positive integer")
    qaoa = data.get("qaoa", {}) or {}
    _check_keys("qaoa", qaoa, _QAOA_KEYS)
    wig = data.get("wigner", {}) or {}
    _check_keys("wigner", wig, _WIGNER_KEYS)
    sweep = data.get("sweep", {}) or {}
    _check_keys("sweep", sweep, SWEEP_AXES)
    for axis, values in sweep.items():
        if not isinstance(values, list) or not values:
            raise ConfigError(f"sweep axis {axis!r} needs a non-empty list of values")
        if not all(isinstance(v, int) and v >= 1 for v in values):
            raise ConfigError(f"sweep values for {axis!r} must be positive integers")
    seeds = data.get("seeds")
    if seeds is not None and (not isinstance(seeds, list) or not seeds or not all(isinstance(s, int) for s in seeds)):
        raise ConfigError("seeds must be a non-empty list of integers")
    encoding = data.get("encoding", "ccv")
    if encoding not in ("ccv", "cv-baseline"):
        raise ConfigError(f"unknown encoding {encoding!r}")
    defaults = {f.name: f.default for f in fields(QaoaConfig) if f.name not in ("seed", "mixer")}
    qaoa = {**defaults, "mixer": "kinetic", **qaoa}
    wig = {"modes": [], "points": 201, **wig}
    cfg = ExperimentConfig(problem, encoding, qaoa, str(data.get("output", "out")), seeds, sweep, wig)
    qaoa_config(cfg, 0)  # validates the qaoa block
    try:
        build_problem(cfg)  # validates the problem block
    except (EncodingError, ValueError) as e:
        if isinstance(e, ConfigError):
            raise
        raise ConfigError(f"invalid problem: {e}") from None
    return cfg


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        data = yaml.safe_load(path.read_text())
    except FileNotFoundError:
        raise ConfigError(f"config file {path} not found") from None
    except yaml.YAMLError as e:
        raise ConfigError(f"malformed YAML in {path}: {e}") from None
    return parse_config(data)


def resolved(cfg: ExperimentConfig) -> dict:
    """Canonical dictionary form; parsing it again gives the same config."""
    out = asdict(cfg)
    out["qaoa"] = {k: v for k, v in sorted(out["qaoa"].items())}
    return out


def config_hash(cfg: ExperimentConfig) -> str:
    blob = json.dumps(resolved(cfg), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def qaoa_config(cfg: ExperimentConfig, seed: int, **overrides) -> QaoaConfig:
    params = {**cfg.qaoa, **overrides}
    mixer = params.pop("mixer", None)
    if mixer not in (None, "kinetic"):
        raise ConfigError("only the kinetic mixer ('kinetic', the default) can be selected from a config")
    try:
        return QaoaConfig(seed=seed, **params)
    except TypeError as e:
        raise ConfigError(str(e)) from None


def build_problem(cfg: ExperimentConfig, n: int | None = None) -> enc.EncodedProblem:
    """Encoded problem for the config; ``n`` overrides the problem size (size sweeps)."""
    p = cfg.problem
    n = p.n if n is None else n
    kind = p.kind
    if kind in ("quadratic", "complex-quadratic"):
        if kind == "quadratic":
            problem = enc.quadratic_instance(n)
        else:
            if p.A is None or p.c is None:
                raise ConfigError("complex-quadratic needs A and c")
            problem = enc.ComplexQuadraticProblem(as_complex_array(p.A, "A"), as_complex_array(p.c, "c"))
        encoded = enc.encode_cv_baseline(problem) if cfg.encoding == "cv-baseline" else enc.encode_complex_quadratic(problem)
        if p.B is not None:
            if p.d is None:
                raise ConfigError("equality constraint B z = d needs d")
            encoded = enc.apply_equality_penalty(encoded, [(as_complex_array(p.B, "B"), as_complex_array(p.d, "d"))], _penalty(p))
    elif kind == "constrained-quadratic":
        if cfg.encoding != "ccv":
            raise ConfigError("the constrained problem is only available in the ccv encoding")
        kw = {}
        if p.A is not None:
            kw["A"] = as_complex_array(p.A, "A")
        if p.B is not None:
            kw["B"] = as_complex_array(p.B, "B")
        if p.c is not None:
            kw["c"] = as_complex_array(p.c, "c")
        encoded = enc.constrained_quadratic(_penalty(p), **kw)
    elif kind == "styblinski-tang":
        encoded = enc.styblinski_tang(n)
    else:
        if p.hconst is None or p.b is None or p.c is None:
            raise ConfigError("quartic-complex needs hconst, b and c")
        encoded = enc.encode_quartic_complex(as_complex(p.hconst, "hconst"), as_complex(p.b, "b"), as_complex(p.c, "c"))
    for item in p.inequalities:
        encoded = _apply_inequality(encoded, item)
    return encoded


def _penalty(p: ProblemConfig) -> float:
    lam = 10.0 if p.penalty is None else float(p.penalty)
    if lam <= 0:
        raise ConfigError("penalty must be > 0")
    return lam


def _apply_inequality(encoded: enc.EncodedProblem, item: dict) -> enc.EncodedProblem:
    """``{terms: [...], method: slack|swish, penalty: float, taylor_order: int}`` with ``h <= 0``."""
    _check_keys("inequality", item, {"terms", "method", "penalty", "taylor_order"})
    try:
        h = QuadraturePolynomial.from_list(encoded.n_modes, item.get("terms", []))
    except (KeyError, TypeError, ValueError) as e:
        raise ConfigError(f"malformed inequality terms: {e}") from None
    lam = float(item.get("penalty", 1.0))
    if lam <= 0:
        raise ConfigError("inequality penalty must be > 0")
    method = item.get("method", "swish")
    if method == "slack":
        return enc.apply_slack_reformulation(encoded, h, lam)
    if method == "swish":
        return enc.apply_swish_penalty(encoded, h, lam, item.get("taylor_order"))
    raise ConfigError(f"unknown inequality method {method!r}")
