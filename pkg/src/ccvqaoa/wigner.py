"""Single-mode Wigner functions on a phase-space grid.

Fock states use the iterative Laguerre recursion on the reduced density
matrix; Gaussian states use the closed-form normal density of the mode's
moments.  ``values[j, i]`` is ``W(x_i, p_j)``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import GridTooSmallError
from .fock import FockState, quadrature_density, reduced_density_matrix
from .gaussian import GaussianState
from .operators import DEFAULT_HBAR

GRID_POINTS = 201
MASS_TOL = 1e-3
MARGINAL_TOL = 1e-3


@dataclass(frozen=True)
class WignerGrid:
    x: np.ndarray
    p: np.ndarray
    values: np.ndarray
    hbar: float = DEFAULT_HBAR
    mode: int = 0
    cutoff: int | None = None

    @property
    def cell(self) -> float:
        return float((self.x[1] - self.x[0]) * (self.p[1] - self.p[0]))

    @property
    def normalization(self) -> float:
        return float(self.values.sum() * self.cell)

    @property
    def negativity_volume(self) -> float:
        """``integral |W| - integral W``, twice the negative volume."""
        return float((np.abs(self.values).sum() - self.values.sum()) * self.cell)

    @property
    def bound(self) -> float:
        return 1.0 / (np.pi * self.hbar)

    def x_marginal(self) -> np.ndarray:
        return self.values.sum(axis=0) * (self.p[1] - self.p[0])

    def p_marginal(self) -> np.ndarray:
        return self.values.sum(axis=1) * (self.x[1] - self.x[0])

    def header(self) -> dict:
        return {
            "hbar": self.hbar,
            "cutoff": self.cutoff,
            "mode": self.mode,
            "negativity_volume": self.negativity_volume,
        }

    def to_csv(self, path, comment: str | None = None) -> None:
        """First row: x axis (after an empty corner); first column: p axis."""
        path = Path(path)
        with path.open("w") as fh:
            if comment:
                fh.write(f"# {comment}\n")
            fh.write("," + ",".join(f"{v:.10g}" for v in self.x) + "\n")
            for pj, row in zip(self.p, self.values):
                fh.write(f"{pj:.10g}," + ",".join(f"{v:.10g}" for v in row) + "\n")
        path.with_suffix(".json").write_text(json.dumps(self.header(), indent=2, sort_keys=True) + "\n")

    @classmethod
    def from_csv(cls, path) -> "WignerGrid":
        path = Path(path)
        data = np.genfromtxt(path, delimiter=",", comments="#")
        meta = json.loads(path.with_suffix(".json").read_text())
        return cls(data[0, 1:], data[1:, 0], data[1:, 1:], meta["hbar"], meta["mode"], meta["cutoff"])


def default_axis(cutoff: int | None, hbar: float = DEFAULT_HBAR, points: int = GRID_POINTS) -> np.ndarray:
    D = cutoff if cutoff is not None else 10
    half = 4 + np.sqrt(hbar * (2 * D + 1))
    return np.linspace(-half, half, points)


def wigner_from_density_matrix(rho: np.ndarray, x: np.ndarray, p: np.ndarray, hbar: float = DEFAULT_HBAR) -> np.ndarray:
    """Laguerre-series Wigner function of a single-mode density matrix."""
    D = rho.shape[0]
    X, P = np.meshgrid(x, p)
    A = (X + 1j * P) / np.sqrt(2 * hbar)
    w = [np.zeros_like(A) for _ in range(D)]
    w[0] = np.exp(-2 * np.abs(A) ** 2) / np.pi
    W = np.real(rho[0, 0]) * np.real(w[0])
    for n in range(1, D):
        w[n] = 2 * A * w[n - 1] / np.sqrt(n)
        W = W + 2 * np.real(rho[0, n] * w[n])
    for m in range(1, D):
        temp = w[m].copy()
        w[m] = (2 * np.conj(A) * temp - np.sqrt(m) * w[m - 1]) / np.sqrt(m)
        W = W + np.real(rho[m, m] * w[m])
        for n in range(m + 1, D):
            temp2 = (2 * A * w[n - 1] - np.sqrt(m) * temp) / np.sqrt(n)
            temp = w[n].copy()
            w[n] = temp2
            W = W + 2 * np.real(rho[m, n] * w[n])
    return W / hbar


def wigner_fock(state: FockState, mode: int = 0, x=None, p=None, check_mass: bool = True) -> WignerGrid:
    x = default_axis(state.cutoff, state.hbar) if x is None else np.asarray(x, dtype=float)
    p = x if p is None else np.asarray(p, dtype=float)
    rho = reduced_density_matrix(state, mode)
    rho = rho / np.trace(rho).real
    W = wigner_from_density_matrix(rho, x, p, state.hbar)
    grid = WignerGrid(x, p, W, state.hbar, mode, state.cutoff)
    if check_mass:
        mass = _contained_mass(state, mode, x, p)
        if mass < 1 - MASS_TOL:
            raise GridTooSmallError(f"grid holds only {mass:.5f} of the quadrature mass")
    return grid


def _contained_mass(state: FockState, mode: int, x: np.ndarray, p: np.ndarray) -> float:
    out = 1.0
    for quad, axis in (("x", x), ("p", p)):
        g, d = quadrature_density(state, quad, mode)
        inside = (g >= axis[0]) & (g <= axis[-1])
        out = min(out, float(np.trapezoid(d * inside, g)))
    return out


def wigner_gaussian(state: GaussianState, mode: int = 0, x=None, p=None, cutoff: int | None = None) -> WignerGrid:
    x = default_axis(cutoff, state.hbar) if x is None else np.asarray(x, dtype=float)
    p = x if p is None else np.asarray(p, dtype=float)
    mu, cov = state.mode_moments(mode)
    X, P = np.meshgrid(x, p)
    d = np.stack([X - mu[0], P - mu[1]], axis=-1)
    inv = np.linalg.inv(cov)
    quad = np.einsum("...i,ij,...j->...", d, inv, d)
    W = np.exp(-0.5 * quad) / (2 * np.pi * np.sqrt(np.linalg.det(cov)))
    return WignerGrid(x, p, W, state.hbar, mode, cutoff)


def wigner(state, mode: int = 0, x=None, p=None) -> WignerGrid:
    if isinstance(state, FockState):
        return wigner_fock(state, mode, x, p)
    return wigner_gaussian(state, mode, x, p)


def _gaussian_marginal(state: GaussianState, mode: int, quad: str, axis: np.ndarray) -> np.ndarray:
    mu, cov = state.mode_moments(mode)
    i = 0 if quad == "x" else 1
    return np.exp(-0.5 * (axis - mu[i]) ** 2 / cov[i, i]) / np.sqrt(2 * np.pi * cov[i, i])


def marginal_check(grid: WignerGrid, state, tol: float = MARGINAL_TOL) -> tuple[float, float, bool]:
    """Sup-norm gaps between the grid marginals and the exact quadrature densities.

    Returns ``(x_error, p_error, ok)`` where ``ok`` means both are below ``tol``.
    """
    errs = []
    for quad, axis, marg in (("x", grid.x, grid.x_marginal()), ("p", grid.p, grid.p_marginal())):
        if isinstance(state, FockState):
            g, d = quadrature_density(state, quad, grid.mode)
            exact = np.interp(axis, g, d)
        else:
            exact = _gaussian_marginal(state, grid.mode, quad, axis)
        errs.append(float(np.abs(marg - exact).max()))
    return errs[0], errs[1], bool(max(errs) < tol)
