"""Truncated Fock-space simulation of pure multi-mode states.

States are flat complex vectors over ``D**n_modes`` with mode 0 as the most
significant tensor factor.  Gates are applied with matrix elements computed in
a padded space and projected back onto the cutoff; the lost norm is recorded
and the state renormalized.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import scipy.sparse as sp
from scipy.linalg import eigh, expm
from scipy.sparse.linalg import expm_multiply

from .errors import GridTooSmallError, InvalidCutoffError
from .gates import GateSpec, generator
from .operators import DEFAULT_HBAR, hamiltonian_matrix, hamiltonian_sparse
from .polynomial import QuadraturePolynomial as QP

GRID_POINTS = 4096
TOP_LEVEL_WARN = 1e-6


class CutoffWarning(UserWarning):
    """Population at the truncation edge exceeds the adequacy threshold."""


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class FockState:
    n_modes: int
    cutoff: int
    amplitudes: np.ndarray
    hbar: float = DEFAULT_HBAR
    truncation_loss: float = 0.0

    def __post_init__(self):
        if self.cutoff < 2:
            raise InvalidCutoffError(f"cutoff must be >= 2, got {self.cutoff}")
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size != self.cutoff**self.n_modes:
            raise ValueError("amplitude vector does not match cutoff**n_modes")
        object.__setattr__(self, "amplitudes", _readonly(amps))

    @property
    def dim(self) -> int:
        return self.cutoff**self.n_modes

    @property
    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape((self.cutoff,) * self.n_modes)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def replace(self, amplitudes: np.ndarray, extra_loss: float = 0.0) -> "FockState":
        return FockState(self.n_modes, self.cutoff, amplitudes, self.hbar, self.truncation_loss + extra_loss)

    def top_level_population(self) -> float:
        """Largest population of the highest retained level over all modes."""
        return max(fock_probabilities(self, m)[-1] for m in range(self.n_modes))


def vacuum_state(n_modes: int, D: int, hbar: float = DEFAULT_HBAR) -> FockState:
    if n_modes < 1:
        raise ValueError("n_modes must be positive")
    if D < 2:
        raise InvalidCutoffError(f"cutoff must be >= 2, got {D}")
    amps = np.zeros(D**n_modes, dtype=complex)
    amps[0] = 1.0
    return FockState(n_modes, D, amps, hbar)


# -- gate application -------------------------------------------------------


def _pad_cutoff(D: int) -> int:
    return D + max(D, 20)


@lru_cache(maxsize=256)
def _single_mode_gate(gate: GateSpec, D: int, hbar: float) -> np.ndarray:
    if gate.kind == "kerr":
        n = np.arange(D)
        return np.diag(np.exp(-1j * gate.params[0] * n**2))
    if gate.kind == "rotation":
        n = np.arange(D)
        return np.diag(np.exp(1j * gate.params[0] * n))
    Dp = _pad_cutoff(D)
    G = hamiltonian_matrix(generator(gate, hbar), Dp, hbar)
    return expm(-1j * G)[:D, :D]


@lru_cache(maxsize=64)
def _two_mode_generator(gate: GateSpec, Dp: int, hbar: float) -> sp.csr_matrix:
    return (-1j * hamiltonian_sparse(generator(gate, hbar), Dp, hbar)).tocsr()


def _move_front(t: np.ndarray, modes: tuple[int, ...]) -> tuple[np.ndarray, list[int]]:
    n = t.ndim
    order = list(modes) + [m for m in range(n) if m not in modes]
    return np.transpose(t, order), order


def _restore(t: np.ndarray, order: list[int]) -> np.ndarray:
    return np.transpose(t, np.argsort(order))


def apply_gate(state: FockState, gate: GateSpec, warn: bool = True) -> FockState:
    """Apply ``gate`` and renormalize, accumulating the norm lost to truncation."""
    if any(m < 0 or m >= state.n_modes for m in gate.modes):
        raise IndexError(f"gate modes {gate.modes} out of range for {state.n_modes} modes")
    D = state.cutoff
    t, order = _move_front(state.tensor, gate.modes)
    k = len(gate.modes)
    rest_shape = t.shape[k:]
    mat = t.reshape(D**k, -1)
    if k == 1:
        out = _single_mode_gate(gate, D, state.hbar) @ mat
    else:
        Dp = _pad_cutoff(D)
        big = np.zeros((Dp, Dp, mat.shape[1]), dtype=complex)
        big[:D, :D] = mat.reshape(D, D, -1)
        big = expm_multiply(_two_mode_generator(gate, Dp, state.hbar), big.reshape(Dp * Dp, -1))
        out = big.reshape(Dp, Dp, -1)[:D, :D].reshape(D * D, -1)
    out = _restore(out.reshape((D,) * k + rest_shape), order).reshape(-1)
    before = state.norm**2
    after = float(np.vdot(out, out).real)
    if after <= 0:
        raise InvalidCutoffError("gate pushed the whole state beyond the cutoff")
    new = state.replace(out / np.sqrt(after) * np.sqrt(before), extra_loss=max(0.0, before - after))
    if warn:
        top = new.top_level_population()
        if top > TOP_LEVEL_WARN:
            warnings.warn(f"top Fock level holds population {top:.2e}; cutoff {D} may be too small", CutoffWarning, stacklevel=2)
    return new


def apply_circuit(state: FockState, gates, warn: bool = True) -> FockState:
    for g in gates:
        state = apply_gate(state, g, warn=warn)
    return state


# -- Hamiltonian evolution --------------------------------------------------


class Propagator:
    """Cached eigendecomposition of a Hermitian matrix for repeated ``exp(-iHt)``."""

    def __init__(self, H: np.ndarray):
        H = np.asarray(H)
        self.dim = H.shape[0]
        self.energies, self.vectors = eigh(H)

    def apply(self, amplitudes: np.ndarray, t: float) -> np.ndarray:
        c = self.vectors.conj().T @ amplitudes
        return self.vectors @ (np.exp(-1j * t * self.energies) * c)


def evolve(state: FockState, H, t: float) -> FockState:
    """``|psi> -> exp(-iHt) |psi>`` for a Hermitian matrix or a :class:`Propagator`."""
    prop = H if isinstance(H, Propagator) else Propagator(H)
    if prop.dim != state.dim:
        raise ValueError(f"dimension mismatch: H is {prop.dim}, state is {state.dim}")
    return state.replace(prop.apply(state.amplitudes, t))


def expectation(state: FockState, H: np.ndarray) -> float:
    H = np.asarray(H)
    if H.shape != (state.dim, state.dim):
        raise ValueError(f"dimension mismatch: H is {H.shape}, state is {state.dim}")
    v = state.amplitudes
    return float(np.real(np.vdot(v, H @ v)))


def reduced_density_matrix(state: FockState, mode: int) -> np.ndarray:
    t, _ = _move_front(state.tensor, (mode,))
    m = t.reshape(state.cutoff, -1)
    return m @ m.conj().T


def fock_probabilities(state: FockState, mode: int) -> np.ndarray:
    t, _ = _move_front(state.tensor, (mode,))
    m = t.reshape(state.cutoff, -1)
    return np.sum(np.abs(m) ** 2, axis=1)


# -- homodyne sampling ------------------------------------------------------


def hermite_functions(n_max: int, q: np.ndarray, hbar: float = DEFAULT_HBAR) -> np.ndarray:
    """Oscillator eigenfunctions ``<q|n>`` for ``n < n_max``, shape ``(n_max, len(q))``."""
    q = np.asarray(q, dtype=float)
    u = q / np.sqrt(hbar)
    out = np.zeros((n_max,) + q.shape)
    out[0] = (np.pi * hbar) ** -0.25 * np.exp(-(u**2) / 2)
    if n_max > 1:
        out[1] = np.sqrt(2.0) * u * out[0]
    for n in range(2, n_max):
        out[n] = np.sqrt(2.0 / n) * u * out[n - 1] - np.sqrt((n - 1) / n) * out[n - 2]
    return out


def quadrature_grid(D: int, hbar: float = DEFAULT_HBAR, points: int = GRID_POINTS) -> np.ndarray:
    half = max(6 * np.sqrt(hbar / 2), 4 * np.sqrt(hbar * (2 * D + 1) / 2))
    return np.linspace(-half, half, points)


@lru_cache(maxsize=32)
def _basis_table(D: int, hbar: float, quadrature: str, points: int) -> tuple[np.ndarray, np.ndarray]:
    grid = quadrature_grid(D, hbar, points)
    psi = hermite_functions(D, grid, hbar)
    if quadrature == "p":
        # <p|n> = (-i)^n psi_n(p)
        psi = psi * ((-1j) ** np.arange(D))[:, None]
    elif quadrature != "x":
        raise ValueError(f"quadrature must be 'x' or 'p', got {quadrature!r}")
    grid.setflags(write=False)
    psi.setflags(write=False)
    return grid, psi


def _density_from_tensor(psi_basis: np.ndarray, amps: np.ndarray) -> np.ndarray:
    # amps: (D, rest) -> density on grid, summed over the remaining modes
    wave = psi_basis.T @ amps
    return np.sum(np.abs(wave) ** 2, axis=1)


def quadrature_density(
    state: FockState, quadrature: str, mode: int, points: int = GRID_POINTS
) -> tuple[np.ndarray, np.ndarray]:
    """Marginal density of ``x`` or ``p`` on ``mode``, tabulated on the sampling grid."""
    grid, basis = _basis_table(state.cutoff, state.hbar, quadrature.lower(), points)
    t, _ = _move_front(state.tensor, (mode,))
    dens = _density_from_tensor(basis, t.reshape(state.cutoff, -1)) / state.norm**2
    return grid, dens


def _inverse_cdf(grid: np.ndarray, dens: np.ndarray, u: np.ndarray) -> np.ndarray:
    cdf = np.concatenate([[0.0], np.cumsum(0.5 * (dens[1:] + dens[:-1]) * np.diff(grid))])
    mass = cdf[-1]
    if mass < 1 - 1e-4:
        raise GridTooSmallError(f"sampling grid holds only {mass:.6f} of the probability mass")
    return np.interp(u * mass, cdf, grid)


def _as_rng(rng_or_seed) -> np.random.Generator:
    if isinstance(rng_or_seed, np.random.Generator):
        return rng_or_seed
    return np.random.default_rng(rng_or_seed)


def homodyne_sample(state: FockState, quadrature: str, mode: int, n_shots: int, rng_seed=None) -> np.ndarray:
    """Draw ``n_shots`` values of one quadrature on one mode from its exact marginal."""
    rng = _as_rng(rng_seed)
    grid, dens = quadrature_density(state, quadrature, mode)
    return _inverse_cdf(grid, dens, rng.random(n_shots))


def homodyne_sample_all(state: FockState, quadrature: str, n_shots: int, rng_seed=None) -> np.ndarray:
    """Jointly sample one quadrature on every mode, shape ``(n_shots, n_modes)``.

    Modes are sampled in order, each from the density conditioned on the values
    already drawn for the earlier modes.
    """
    rng = _as_rng(rng_seed)
    q = quadrature.lower()
    D, n = state.cutoff, state.n_modes
    grid, basis = _basis_table(D, state.hbar, q, GRID_POINTS)
    amps = state.tensor / state.norm
    u = rng.random((n_shots, n))
    out = np.empty((n_shots, n))
    first = _density_from_tensor(basis, amps.reshape(D, -1))
    out[:, 0] = _inverse_cdf(grid, first, u[:, 0])
    if n == 1:
        return out
    # condition the remaining modes on each drawn value in turn
    phase = (-1j) ** np.arange(D) if q == "p" else np.ones(D)
    for s in range(n_shots):
        cond = amps.reshape(D, -1)
        for m in range(1, n):
            vals = hermite_functions(D, np.array([out[s, m - 1]]), state.hbar)[:, 0] * phase
            cond = (vals @ cond.reshape(D, -1)).reshape(-1)
            cond = cond / np.linalg.norm(cond)
            dens = _density_from_tensor(basis, cond.reshape(D, -1))
            out[s, m] = _inverse_cdf(grid, dens / np.trapezoid(dens, grid), u[s, m : m + 1])[0]
    return out


def quadrature_moments(state: FockState) -> tuple[np.ndarray, np.ndarray]:
    """Mean vector and symmetrized covariance in interleaved ``(x1, p1, ...)`` order."""
    n = state.n_modes
    polys = [QP.x(m, n) if k == 0 else QP.p(m, n) for m in range(n) for k in (0, 1)]
    mean = np.array([expectation(state, hamiltonian_matrix(q, state.cutoff, state.hbar, max_dim=state.dim)) for q in polys])
    cov = np.zeros((2 * n, 2 * n))
    for i in range(2 * n):
        for j in range(i, 2 * n):
            H = hamiltonian_matrix(polys[i] * polys[j], state.cutoff, state.hbar, max_dim=state.dim)
            cov[i, j] = cov[j, i] = expectation(state, H) - mean[i] * mean[j]
    return mean, cov
