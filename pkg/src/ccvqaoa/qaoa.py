"""Variational loop: squeezed vacuum, alternating cost and mixer layers, sampled cost, CMA-ES.

Parameter vectors are laid out as ``(gamma_1, ..., gamma_q, beta_1, ..., beta_q)``.
Layer ``j`` applies ``exp(-i gamma_j H_C)`` and then ``exp(-i beta_j H_M)``.
"""

from __future__ import annotations

import math
import time
import warnings
from dataclasses import dataclass, field, replace
from typing import Literal

import numpy as np

from . import cma, fock, gaussian
from .encoding import EncodedProblem, classical_oracle
from .errors import ConfigError, DegenerateMixerError, NotGaussianError, SimulationError
from .gates import squeezing
from .operators import DEFAULT_HBAR, commutator, hamiltonian_matrix
from .polynomial import QuadraturePolynomial, kinetic_mixer

Phase = Literal["single", "real", "imag"]
COMMUTATOR_TOL = 1e-10
# stream tags for the SeedSequence spawn keys
_CMA_STREAM = 1 << 30
_INIT_STREAM = (1 << 30) + 1
_FINAL_STREAM = (1 << 30) + 2


@dataclass(frozen=True)
class QaoaConfig:
    depth: int = 2
    shots: int = 50
    squeeze: float = 0.6
    backend: str = "gaussian"
    cutoff: int | None = None
    tol: float = 1e-6
    max_iters: int = 100
    seed: int = 0
    hbar: float = DEFAULT_HBAR
    mixer: QuadraturePolynomial | None = None
    measurement: str | None = None
    success_tol: float = 0.05
    bias_correction: bool = False
    final_shots: int | None = None
    sigma0: float = 0.2
    init_range: float = 0.1
    popsize: int | None = None
    shot_multiplier: int = 1
    kerr: float = 0.0

    def __post_init__(self):
        if self.depth < 1:
            raise ConfigError("depth must be >= 1")
        if self.shots < 1:
            raise ConfigError("shots must be >= 1")
        if self.final_shots is not None and self.final_shots < 1:
            raise ConfigError("final_shots must be >= 1")
        if self.max_iters < 0:
            raise ConfigError("max_iters must be >= 0")
        if self.tol <= 0 or self.success_tol <= 0 or self.sigma0 <= 0:
            raise ConfigError("tol, success_tol and sigma0 must be positive")
        if self.shot_multiplier < 1:
            raise ConfigError("shot_multiplier must be >= 1")
        if self.hbar <= 0:
            raise ConfigError("hbar must be positive")
        if self.backend not in ("gaussian", "fock"):
            raise ConfigError(f"unknown backend {self.backend!r}")
        if self.backend == "fock" and (self.cutoff is None or self.cutoff < 2):
            raise ConfigError("the Fock backend needs a cutoff >= 2")
        meas = self.resolved_measurement
        if meas not in ("heterodyne", "two-phase"):
            raise ConfigError(f"unknown measurement {self.measurement!r}")
        if self.backend == "fock" and meas == "heterodyne":
            raise ConfigError("the Fock backend samples with two-phase homodyne, not heterodyne")
        if self.backend == "gaussian" and self.kerr:
            raise ConfigError("a Kerr layer needs the Fock backend")

    @property
    def resolved_measurement(self) -> str:
        if self.measurement is not None:
            return self.measurement
        return "heterodyne" if self.backend == "gaussian" else "two-phase"

    @property
    def n_final(self) -> int:
        return self.final_shots if self.final_shots is not None else self.shots


@dataclass(frozen=True)
class IterationRecord:
    t: int
    gamma: np.ndarray
    beta: np.ndarray
    cost: float
    best_sample: np.ndarray
    best_sample_cost: float
    success: float | None = None


@dataclass
class RunResult:
    gamma: np.ndarray
    beta: np.ndarray
    trace: list[IterationRecord]
    final_samples: np.ndarray
    final_costs: np.ndarray
    best_sample: np.ndarray
    best_cost: float
    success_probability: float
    reference_optimum: float
    n_modes: int
    evaluations: int
    truncation_loss: float = 0.0
    wall_time: float = 0.0
    state: object = None
    converged: bool = False

    @property
    def final_estimate(self) -> float:
        return float(np.mean(self.final_costs))


# -- circuit ----------------------------------------------------------------


@dataclass(frozen=True)
class Layer:
    kind: Literal["cost", "mixer", "kerr"]
    time: float


def build_layers(params, depth: int, kerr: float = 0.0) -> list[Layer]:
    params = np.asarray(params, dtype=float).reshape(-1)
    if params.size != 2 * depth:
        raise ValueError(f"expected {2 * depth} parameters, got {params.size}")
    layers = []
    for j in range(depth):
        layers.append(Layer("cost", float(params[j])))
        if kerr:
            layers.append(Layer("kerr", kerr))
        layers.append(Layer("mixer", float(params[depth + j])))
    return layers


def check_mixer(cost: QuadraturePolynomial, mixer: QuadraturePolynomial, backend: str, cutoff: int | None, hbar: float) -> None:
    """Raise :class:`DegenerateMixerError` if the mixer commutes with the cost.

    Quadratic pairs are checked through their phase-space generators; anything
    else on the Fock matrices.
    """
    if cost.degree <= 2 and mixer.degree <= 2:
        Mc, vc, _ = gaussian.quadratic_form(cost)
        Mm, vm, _ = gaussian.quadratic_form(mixer)
        Om = gaussian.symplectic_form(cost.n_modes)
        parts = [Mm @ Om @ Mc - Mc @ Om @ Mm, Mm @ Om @ vc - Mc @ Om @ vm, np.atleast_1d(vm @ Om @ vc)]
        if max(np.abs(p).max(initial=0.0) for p in parts) < COMMUTATOR_TOL:
            raise DegenerateMixerError("mixer and cost Hamiltonians commute")
        return
    D = cutoff if cutoff is not None else 2 * max(cost.degree, mixer.degree) + 2
    Hc = hamiltonian_matrix(cost, D, hbar)
    Hm = hamiltonian_matrix(mixer, D, hbar)
    if np.abs(commutator(Hm, Hc)).max() < COMMUTATOR_TOL:
        raise DegenerateMixerError("mixer and cost Hamiltonians commute on the truncated space")


def _squeeze_sign(phase: Phase, r: float) -> float:
    if phase == "real":
        return -abs(r)
    if phase == "imag":
        return abs(r)
    return r


def prepare_initial(config: QaoaConfig, n_modes: int, phase: Phase = "single"):
    """Vacuum followed by squeezing ``r`` on every mode.

    The real-part phase squeezes momentum (``-|r|``, wide in ``x``); the
    imaginary-part phase squeezes position (``+|r|``).
    """
    r = _squeeze_sign(phase, config.squeeze)
    gates = [squeezing(r, m) for m in range(n_modes)] if r else []
    if config.backend == "gaussian":
        return gaussian.apply_circuit(gaussian.gaussian_vacuum(n_modes, config.hbar), gates)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", fock.CutoffWarning)
        return fock.apply_circuit(fock.vacuum_state(n_modes, config.cutoff, config.hbar), gates)


class Simulator:
    """Backend-specific evolution with the expensive pieces cached per problem."""

    def __init__(self, encoded: EncodedProblem, config: QaoaConfig):
        self.encoded = encoded
        self.config = config
        self.n_modes = encoded.n_modes
        self.cost_h = encoded.hamiltonian
        self.mixer = config.mixer if config.mixer is not None else kinetic_mixer(self.n_modes)
        if self.mixer.n_modes != self.n_modes:
            raise ConfigError("mixer acts on a different number of modes than the cost")
        if config.backend == "gaussian" and self.cost_h.degree > 2:
            raise NotGaussianError(f"cost Hamiltonian has degree {self.cost_h.degree}; use the Fock backend")
        if self.cost_h.terms:
            # a constant cost has nothing to mix; its estimate is still exact
            check_mixer(self.cost_h, self.mixer, config.backend, config.cutoff, config.hbar)
        self.x_only = not encoded.measures_p
        self.measurement = "homodyne-x" if self.x_only else config.resolved_measurement
        phases: tuple[Phase, ...]
        if self.measurement == "heterodyne":
            phases = ("single",)
        elif self.measurement == "homodyne-x":
            phases = ("real",)
        else:
            phases = ("real", "imag")
        self.phases = phases
        self.initial = {ph: prepare_initial(config, self.n_modes, ph) for ph in phases}
        if config.backend == "fock":
            D = config.cutoff
            self.prop_c = fock.Propagator(hamiltonian_matrix(self.cost_h, D, config.hbar))
            self.prop_m = fock.Propagator(hamiltonian_matrix(self.mixer, D, config.hbar))
            n2 = np.arange(D) ** 2
            total = np.zeros(D**self.n_modes)
            for m in range(self.n_modes):
                shape = [1] * self.n_modes
                shape[m] = D
                total = (total.reshape((D,) * self.n_modes) + n2.reshape(shape)).reshape(-1)
            self.kerr_diag = np.exp(-1j * config.kerr * total)
        self.bias = self._heterodyne_bias() if config.bias_correction else 0.0

    def _heterodyne_bias(self) -> float:
        # E_Q[f] - E_W[f] for quadratic f: hbar/2 times the sum of squared-term coefficients
        cost = self.encoded.cost
        if cost.degree > 2:
            raise ConfigError("heterodyne bias correction is only defined for quadratic costs")
        M, _, _ = gaussian.quadratic_form(cost)
        return 0.25 * self.config.hbar * float(np.trace(M))

    def evolve(self, params, phase: Phase = "single"):
        layers = build_layers(params, self.config.depth, self.config.kerr if self.config.backend == "fock" else 0.0)
        state = self.initial[phase]
        if self.config.backend == "gaussian":
            for layer in layers:
                h = self.cost_h if layer.kind == "cost" else self.mixer
                if layer.time:
                    state = gaussian.quadratic_evolution(state, h, layer.time)
            return state
        amps = state.amplitudes
        for layer in layers:
            if layer.kind == "kerr":
                amps = self.kerr_diag * amps
            elif layer.time:
                prop = self.prop_c if layer.kind == "cost" else self.prop_m
                amps = prop.apply(amps, layer.time)
        return state.replace(amps)

    def _quadrature(self, state, quad: str, n: int, rng) -> np.ndarray:
        if self.config.backend == "gaussian":
            return gaussian.gaussian_homodyne_sample_all(state, quad, n, rng)
        return fock.homodyne_sample_all(state, quad, n, rng)

    def sample(self, params, n: int, rng: np.random.Generator) -> tuple[np.ndarray, object]:
        """Quadrature samples, shape ``(n, 2 * n_modes)``, and the final state of the first phase."""
        out = np.zeros((n, 2 * self.n_modes))
        if self.measurement == "heterodyne":
            state = self.evolve(params, "single")
            return gaussian.heterodyne_sample(state, n, rng), state
        state = self.evolve(params, "real")
        out[:, 0::2] = self._quadrature(state, "x", n, rng)
        if self.measurement == "two-phase":
            # k-th x draw pairs with the k-th p draw from an independent execution
            out[:, 1::2] = self._quadrature(self.evolve(params, "imag"), "p", n, rng)
        return out, state

    def estimate(self, params, n: int, rng) -> tuple[float, np.ndarray, np.ndarray, object]:
        samples, state = self.sample(params, n, rng)
        costs = self.encoded.classical_cost(samples)
        return float(np.mean(costs)) - self.bias, samples, costs, state


def estimate_cost(encoded: EncodedProblem, config: QaoaConfig, params, rng=None) -> tuple[float, np.ndarray]:
    """Sampled estimate of the cost at ``params`` from ``config.shots`` draws."""
    sim = Simulator(encoded, config)
    rng = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    est, samples, _, _ = sim.estimate(params, config.shots * config.shot_multiplier, rng)
    return est, samples


def success_probability(costs, f_star: float, tol: float = 0.05) -> float:
    """Fraction of samples with cost ``<= f_star + tol * max(1, |f_star|)``."""
    costs = np.asarray(costs, dtype=float).reshape(-1)
    if costs.size == 0:
        raise ValueError("no samples")
    return float(np.mean(costs <= f_star + tol * max(1.0, abs(f_star))))


def _stream(seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, *key]))


def run(encoded: EncodedProblem, config: QaoaConfig, f_star: float | None = None) -> RunResult:
    """Optimize the circuit parameters and sample the optimized state.

    One iteration is one CMA-ES generation.  Its recorded cost is the lowest
    candidate estimate in that generation; the stopping test compares
    consecutive iterations.  The returned parameters are the CMA-ES mean.
    """
    t0 = time.perf_counter()
    sim = Simulator(encoded, config)
    if f_star is None:
        f_star = classical_oracle(encoded, seed=config.seed).value
    q = config.depth
    x0 = _stream(config.seed, _INIT_STREAM).uniform(-config.init_range, config.init_range, 2 * q)
    n_est = config.shots * config.shot_multiplier
    trace: list[IterationRecord] = []
    evaluations = 0
    converged = False
    params = x0
    if config.max_iters == 0:
        est, samples, costs, _ = sim.estimate(x0, n_est, _stream(config.seed, 0, 0))
        evaluations = 1
        trace.append(_record(0, x0, q, est, samples, costs, f_star, config.success_tol))
    else:
        es = cma.cma_init(x0, config.sigma0, config.popsize)
        cma_rng = _stream(config.seed, _CMA_STREAM)
        for t in range(config.max_iters):
            X = cma.cma_ask(es, cma_rng)
            results = [sim.estimate(x, n_est, _stream(config.seed, t, i)) for i, x in enumerate(X)]
            evaluations += len(X)
            fit = np.array([r[0] for r in results])
            if not np.isfinite(fit).any():
                raise SimulationError(f"no finite cost estimate at iteration {t}")
            k = int(np.nanargmin(np.where(np.isfinite(fit), fit, np.nan)))
            all_samples = np.concatenate([r[1] for r in results])
            all_costs = np.concatenate([r[2] for r in results])
            j = int(np.argmin(all_costs))
            rec = IterationRecord(
                t, X[k, :q].copy(), X[k, q:].copy(), float(fit[k]), all_samples[j], float(all_costs[j]),
                success_probability(results[k][2], f_star, config.success_tol),
            )
            trace.append(rec)
            if t > 0 and abs(trace[-1].cost - trace[-2].cost) < config.tol:
                converged = True
                break
            es = cma.cma_tell(es, X, fit)
        params = es.mean
    samples, state = sim.sample(params, config.n_final, _stream(config.seed, _FINAL_STREAM))
    costs = encoded.classical_cost(samples)
    if not np.all(np.isfinite(costs)):
        raise SimulationError("non-finite cost among final samples")
    b = int(np.argmin(costs))
    loss = state.truncation_loss if isinstance(state, fock.FockState) else 0.0
    return RunResult(
        gamma=params[:q].copy(),
        beta=params[q:].copy(),
        trace=trace,
        final_samples=samples,
        final_costs=costs,
        best_sample=samples[b].copy(),
        best_cost=float(costs[b]),
        success_probability=success_probability(costs, f_star, config.success_tol),
        reference_optimum=float(f_star),
        n_modes=encoded.n_modes,
        evaluations=evaluations,
        truncation_loss=float(loss),
        wall_time=time.perf_counter() - t0,
        state=state,
        converged=converged,
    )


def _record(t, x, q, est, samples, costs, f_star, tol) -> IterationRecord:
    j = int(np.argmin(costs))
    return IterationRecord(t, x[:q].copy(), x[q:].copy(), est, samples[j].copy(), float(costs[j]), success_probability(costs, f_star, tol))


@dataclass
class Comparison:
    ccv: RunResult
    baseline: RunResult
    ccv_dim: int
    baseline_dim: int


def compare_baseline(problem, config: QaoaConfig) -> Comparison:
    """Run the complex encoding and the two-modes-per-variable baseline with one budget."""
    from .encoding import encode_complex_quadratic, encode_cv_baseline

    ccv_enc = encode_complex_quadratic(problem)
    base_enc = encode_cv_baseline(problem)
    f_star = classical_oracle(ccv_enc, seed=config.seed).value
    ccv = run(ccv_enc, config, f_star)
    base = run(base_enc, config, f_star)
    D = config.cutoff or 0
    return Comparison(ccv, base, D**ccv.n_modes, D**base.n_modes)
