"""Gaussian states as mean vector and covariance matrix.

Quadratures are interleaved, ``(x1, p1, x2, p2, ...)``.  A Hamiltonian that is
at most quadratic, ``H = 1/2 xi^T M xi + v^T xi``, moves the moments along the
linear Heisenberg flow ``d xi/dt = hbar Omega (M xi + v)``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .errors import NotGaussianError, NumericalStateError
from .gates import GateSpec, generator
from .operators import DEFAULT_HBAR
from .polynomial import QuadraturePolynomial

EIG_FLOOR = 1e-12


def symplectic_form(n_modes: int) -> np.ndarray:
    return np.kron(np.eye(n_modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


@dataclass(frozen=True)
class GaussianState:
    n_modes: int
    mean: np.ndarray
    cov: np.ndarray
    hbar: float = DEFAULT_HBAR

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=float).reshape(-1)
        cov = np.asarray(self.cov, dtype=float)
        n2 = 2 * self.n_modes
        if mean.shape != (n2,) or cov.shape != (n2, n2):
            raise ValueError("mean/cov shapes do not match n_modes")
        if np.abs(cov - cov.T).max(initial=0.0) > 1e-12 * max(1.0, np.abs(cov).max()):
            raise NumericalStateError("covariance matrix is not symmetric")
        cov = 0.5 * (cov + cov.T)
        mean.setflags(write=False)
        cov.setflags(write=False)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    def is_physical(self, tol: float = 1e-9) -> bool:
        """Uncertainty relation ``cov + i hbar/2 Omega >= 0``."""
        lhs = self.cov + 0.5j * self.hbar * symplectic_form(self.n_modes)
        return bool(np.linalg.eigvalsh(lhs).min() >= -tol * max(1.0, np.abs(self.cov).max()))

    def mode_moments(self, mode: int) -> tuple[np.ndarray, np.ndarray]:
        sl = slice(2 * mode, 2 * mode + 2)
        return self.mean[sl].copy(), self.cov[sl, sl].copy()


def symplectic_eigenvalues(cov: np.ndarray) -> np.ndarray:
    n = cov.shape[0] // 2
    ev = np.abs(np.linalg.eigvals(1j * symplectic_form(n) @ cov))
    return np.sort(ev)[::2]


def gaussian_vacuum(n_modes: int, hbar: float = DEFAULT_HBAR) -> GaussianState:
    return GaussianState(n_modes, np.zeros(2 * n_modes), 0.5 * hbar * np.eye(2 * n_modes), hbar)


def quadratic_form(poly: QuadraturePolynomial) -> tuple[np.ndarray, np.ndarray, float]:
    """Split a degree <= 2 polynomial into ``(M, v, c)`` with ``H = 1/2 xi^T M xi + v^T xi + c``."""
    if poly.degree > 2:
        raise NotGaussianError(f"polynomial of degree {poly.degree} is not Gaussian")
    poly = poly.real_part()
    n2 = 2 * poly.n_modes
    M = np.zeros((n2, n2))
    v = np.zeros(n2)
    const = 0.0
    for key, coef in poly.terms.items():
        idx = []
        for mode, (a, b) in enumerate(key):
            idx += [2 * mode] * a + [2 * mode + 1] * b
        if not idx:
            const += coef
        elif len(idx) == 1:
            v[idx[0]] += coef
        elif idx[0] == idx[1]:
            M[idx[0], idx[0]] += 2 * coef
        else:
            M[idx[0], idx[1]] += coef
            M[idx[1], idx[0]] += coef
    return M, v, const


def quadratic_flow(poly: QuadraturePolynomial, t: float, hbar: float = DEFAULT_HBAR) -> tuple[np.ndarray, np.ndarray]:
    """Symplectic matrix ``S`` and shift ``d`` with ``xi -> S xi + d`` under ``exp(-i t H)``."""
    M, v, _ = quadratic_form(poly)
    n2 = M.shape[0]
    Om = symplectic_form(n2 // 2)
    gen = np.zeros((n2 + 1, n2 + 1))
    gen[:n2, :n2] = hbar * Om @ M
    gen[:n2, n2] = hbar * Om @ v
    E = expm(t * gen)
    return E[:n2, :n2], E[:n2, n2]


def quadratic_evolution(state: GaussianState, poly: QuadraturePolynomial, t: float) -> GaussianState:
    if poly.n_modes != state.n_modes:
        raise ValueError("polynomial and state have different mode counts")
    S, d = quadratic_flow(poly, t, state.hbar)
    return GaussianState(state.n_modes, S @ state.mean + d, S @ state.cov @ S.T, state.hbar)


def apply_gate(state: GaussianState, gate: GateSpec) -> GaussianState:
    if not gate.is_gaussian:
        raise NotGaussianError(f"{gate.kind} is not a Gaussian gate")
    if any(m < 0 or m >= state.n_modes for m in gate.modes):
        raise IndexError(f"gate modes {gate.modes} out of range for {state.n_modes} modes")
    local = generator(gate, state.hbar)
    # scatter the local generator onto the register
    terms = {}
    for key, coef in local.terms.items():
        full = [(0, 0)] * state.n_modes
        for j, m in enumerate(gate.modes):
            full[m] = key[j]
        terms[tuple(full)] = coef
    return quadratic_evolution(state, QuadraturePolynomial(state.n_modes, terms), 1.0)


def apply_circuit(state: GaussianState, gates) -> GaussianState:
    for g in gates:
        state = apply_gate(state, g)
    return state


# -- sampling ---------------------------------------------------------------


def _as_rng(rng_or_seed) -> np.random.Generator:
    if isinstance(rng_or_seed, np.random.Generator):
        return rng_or_seed
    return np.random.default_rng(rng_or_seed)


def _sample_normal(mean: np.ndarray, cov: np.ndarray, n_shots: int, rng: np.random.Generator) -> np.ndarray:
    w, V = np.linalg.eigh(cov)
    if w.min() < -1e-9 * max(1.0, np.abs(w).max()):
        raise NumericalStateError(f"covariance has negative eigenvalue {w.min():.3e}")
    root = V * np.sqrt(np.clip(w, EIG_FLOOR, None))
    z = rng.standard_normal((n_shots, len(mean)))
    return mean + z @ root.T


def heterodyne_sample(state: GaussianState, n_shots: int, rng_seed=None, *, correct_bias: bool = False) -> np.ndarray:
    """Draw ``(x, p)`` pairs for every mode from the Husimi Q distribution.

    Returns an array of shape ``(n_shots, 2 * n_modes)`` in interleaved order.
    The draws have covariance ``cov + hbar/2 I``.
    """
    rng = _as_rng(rng_seed)
    noisy = state.cov + 0.5 * state.hbar * np.eye(2 * state.n_modes)
    if np.linalg.eigvalsh(noisy).min() <= 0:
        raise NumericalStateError("heterodyne covariance is not positive definite")
    return _sample_normal(state.mean, noisy, n_shots, rng)


def gaussian_homodyne_sample(state: GaussianState, quadrature: str, mode: int, n_shots: int, rng_seed=None) -> np.ndarray:
    rng = _as_rng(rng_seed)
    i = 2 * mode + (0 if quadrature.lower() == "x" else 1)
    if quadrature.lower() not in ("x", "p"):
        raise ValueError(f"quadrature must be 'x' or 'p', got {quadrature!r}")
    var = max(state.cov[i, i], EIG_FLOOR)
    return state.mean[i] + np.sqrt(var) * rng.standard_normal(n_shots)


def gaussian_homodyne_sample_all(state: GaussianState, quadrature: str, n_shots: int, rng_seed=None) -> np.ndarray:
    """Joint draws of one quadrature on every mode, shape ``(n_shots, n_modes)``."""
    rng = _as_rng(rng_seed)
    off = 0 if quadrature.lower() == "x" else 1
    idx = np.arange(state.n_modes) * 2 + off
    return _sample_normal(state.mean[idx], state.cov[np.ix_(idx, idx)], n_shots, rng)


# -- exact moments ----------------------------------------------------------


def _centered_moment(idx: tuple[int, ...], cov: np.ndarray) -> float:
    if len(idx) % 2:
        return 0.0
    if not idx:
        return 1.0
    first, rest = idx[0], idx[1:]
    total = 0.0
    for j in range(len(rest)):
        total += cov[first, rest[j]] * _centered_moment(rest[:j] + rest[j + 1 :], cov)
    return total


def _raw_moment(idx: list[int], mean: np.ndarray, cov: np.ndarray) -> float:
    total = 0.0
    n = len(idx)
    for r in range(n + 1):
        for chosen in itertools.combinations(range(n), r):
            mu = np.prod([mean[idx[i]] for i in range(n) if i not in chosen])
            total += mu * _centered_moment(tuple(idx[i] for i in chosen), cov)
    return total


def gaussian_expectation(state: GaussianState, poly: QuadraturePolynomial) -> float:
    """Exact ``<poly>`` for polynomials of degree <= 4.

    Moments of the Wigner function are Weyl-ordered; the symmetrized
    ``x^2 p^2`` ordering used for matrices differs from Weyl order by
    ``-hbar^2 / 2``, which is added back here.
    """
    if poly.degree > 4:
        raise NotImplementedError("exact Gaussian moments are implemented up to degree 4; use sampling")
    poly = poly.real_part()
    total = 0.0
    for key, coef in poly.terms.items():
        idx = []
        for mode, (a, b) in enumerate(key):
            idx += [2 * mode] * a + [2 * mode + 1] * b
        total += coef * _raw_moment(idx, state.mean, state.cov)
        total += coef * sum(-0.5 * state.hbar**2 for a, b in key if a == 2 and b == 2)
    return float(total)
