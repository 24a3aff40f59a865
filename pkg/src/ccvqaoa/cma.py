"""(mu/mu_w, lambda) CMA-ES with cumulative step-size adaptation.

Default strategy parameters follow Hansen's tutorial parameterization.  Only
the ranking of fitness values is used, so any strictly increasing transform
of the objective leaves the iterates unchanged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

EIG_FLOOR = 1e-14


@dataclass(frozen=True)
class CmaParameters:
    dim: int
    popsize: int
    mu: int
    weights: np.ndarray
    mueff: float
    cc: float
    cs: float
    c1: float
    cmu: float
    damps: float
    chi_n: float

    @classmethod
    def default(cls, dim: int, popsize: int | None = None) -> "CmaParameters":
        if dim < 1:
            raise ValueError("dimension must be >= 1")
        lam = popsize if popsize is not None else 4 + int(math.floor(3 * math.log(dim)))
        if lam < 2:
            raise ValueError("population size must be >= 2")
        mu = lam // 2
        w = math.log((lam + 1) / 2) - np.log(np.arange(1, mu + 1))
        w = w / w.sum()
        mueff = 1.0 / np.sum(w**2)
        n = dim
        cc = (4 + mueff / n) / (n + 4 + 2 * mueff / n)
        cs = (mueff + 2) / (n + mueff + 5)
        c1 = 2 / ((n + 1.3) ** 2 + mueff)
        cmu = min(1 - c1, 2 * (mueff - 2 + 1 / mueff) / ((n + 2) ** 2 + mueff))
        damps = 1 + 2 * max(0.0, math.sqrt((mueff - 1) / (n + 1)) - 1) + cs
        chi_n = math.sqrt(n) * (1 - 1 / (4 * n) + 1 / (21 * n**2))
        w.setflags(write=False)
        return cls(n, lam, mu, w, float(mueff), cc, cs, c1, cmu, damps, chi_n)


@dataclass(frozen=True)
class CmaState:
    """Immutable optimizer state; ``tell`` returns a new instance."""

    params: CmaParameters
    mean: np.ndarray
    sigma: float
    cov: np.ndarray
    p_sigma: np.ndarray
    p_c: np.ndarray
    generation: int = 0
    best_x: np.ndarray | None = None
    best_f: float = math.inf
    eig: tuple[np.ndarray, np.ndarray] | None = field(default=None, repr=False, compare=False)

    @property
    def dim(self) -> int:
        return self.params.dim

    @property
    def popsize(self) -> int:
        return self.params.popsize

    def decomposition(self) -> tuple[np.ndarray, np.ndarray]:
        """Eigenvalues (clamped) and eigenvectors of ``C``."""
        if self.eig is not None:
            return self.eig
        return _eig_repair(self.cov)


def _eig_repair(C: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    C = 0.5 * (C + C.T)
    d, B = np.linalg.eigh(C)
    floor = EIG_FLOOR * max(1.0, d.max(initial=0.0))
    return np.clip(d, floor, None), B


def cma_init(x0, sigma0: float, popsize: int | None = None) -> CmaState:
    x0 = np.asarray(x0, dtype=float).reshape(-1)
    if not sigma0 > 0:
        raise ValueError("sigma0 must be > 0")
    params = CmaParameters.default(x0.size, popsize)
    n = x0.size
    return CmaState(params, x0.copy(), float(sigma0), np.eye(n), np.zeros(n), np.zeros(n))


def cma_ask(state: CmaState, rng: np.random.Generator) -> np.ndarray:
    """Candidates ``mean + sigma * C^(1/2) z``, shape ``(popsize, dim)``."""
    d, B = state.decomposition()
    z = rng.standard_normal((state.popsize, state.dim))
    y = (z * np.sqrt(d)) @ B.T
    return state.mean + state.sigma * y


def _ranks(fitness: np.ndarray) -> np.ndarray:
    # non-finite values rank last, in input order
    f = np.where(np.isfinite(fitness), fitness, np.inf)
    return np.argsort(f, kind="stable")


def cma_tell(state: CmaState, candidates, fitness) -> CmaState:
    P = state.params
    X = np.asarray(candidates, dtype=float)
    f = np.asarray(fitness, dtype=float).reshape(-1)
    if X.shape != (P.popsize, P.dim) or f.size != P.popsize:
        raise ValueError(f"expected {P.popsize} candidates of dimension {P.dim}")
    order = _ranks(f)
    best_x, best_f = state.best_x, state.best_f
    if np.isfinite(f[order[0]]) and f[order[0]] < best_f:
        best_x, best_f = X[order[0]].copy(), float(f[order[0]])

    n = P.dim
    sel = X[order[: P.mu]]
    old = state.mean
    mean = P.weights @ sel
    y_w = (mean - old) / state.sigma

    d, B = state.decomposition()
    inv_sqrt = (B / np.sqrt(d)) @ B.T
    ps = (1 - P.cs) * state.p_sigma + math.sqrt(P.cs * (2 - P.cs) * P.mueff) * (inv_sqrt @ y_w)
    gen = state.generation + 1
    ps_norm = np.linalg.norm(ps)
    hsig = ps_norm / math.sqrt(1 - (1 - P.cs) ** (2 * gen)) / P.chi_n < 1.4 + 2 / (n + 1)
    pc = (1 - P.cc) * state.p_c + hsig * math.sqrt(P.cc * (2 - P.cc) * P.mueff) * y_w

    Y = (sel - old) / state.sigma
    rank_mu = (Y.T * P.weights) @ Y
    delta = (1 - hsig) * P.cc * (2 - P.cc)
    C = (1 - P.c1 - P.cmu) * state.cov + P.c1 * (np.outer(pc, pc) + delta * state.cov) + P.cmu * rank_mu
    C = 0.5 * (C + C.T)
    d_new, B_new = _eig_repair(C)
    if d_new.min() <= EIG_FLOOR * max(1.0, d_new.max()):
        C = (B_new * d_new) @ B_new.T
    sigma = state.sigma * math.exp((P.cs / P.damps) * (ps_norm / P.chi_n - 1))
    return CmaState(P, mean, sigma, C, ps, pc, gen, best_x, best_f, (d_new, B_new))


@dataclass(frozen=True)
class CmaResult:
    x_best: np.ndarray
    f_best: float
    mean: np.ndarray
    generations: int
    history: list[float]


def minimize(
    f: Callable[[np.ndarray], float],
    x0: Sequence[float],
    sigma0: float,
    max_generations: int = 200,
    popsize: int | None = None,
    seed: int | None = None,
    ftarget: float = -math.inf,
) -> CmaResult:
    """Convenience loop over :func:`cma_ask` / :func:`cma_tell`."""
    rng = np.random.default_rng(seed)
    st = cma_init(x0, sigma0, popsize)
    history = []
    for _ in range(max_generations):
        X = cma_ask(st, rng)
        st = cma_tell(st, X, [f(x) for x in X])
        history.append(st.best_f)
        if st.best_f <= ftarget:
            break
    return CmaResult(st.best_x, st.best_f, st.mean, st.generation, history)
