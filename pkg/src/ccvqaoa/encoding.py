"""Encoding of optimization problems as quadrature polynomials.

Complex variables map one-to-one onto modes, ``z_j = x_j + i p_j``.  The
baseline encoding instead puts ``Re z_j`` and ``Im z_j`` on the ``x``
quadratures of two separate modes.  Real problems pair consecutive variables
onto the ``(x, p)`` quadratures of one mode.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import minimize
from scipy.special import bernoulli

from .errors import EncodingError
from .polynomial import QuadraturePolynomial as QP

HERMITIAN_TOL = 1e-12


@dataclass(frozen=True)
class ComplexQuadraticProblem:
    """``min_z z^H A z + Re(c^H z)``."""

    A: np.ndarray
    c: np.ndarray

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=complex))
        c = np.asarray(self.c, dtype=complex).reshape(-1)
        if A.shape[0] != A.shape[1] or A.shape[0] != c.size:
            raise EncodingError(f"inconsistent shapes A{A.shape}, c{c.shape}")
        if np.abs(A - A.conj().T).max() > HERMITIAN_TOL:
            raise EncodingError("A is not Hermitian")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "c", c)

    @property
    def n(self) -> int:
        return self.c.size

    def objective(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        quad = np.einsum("...i,ij,...j->...", z.conj(), self.A, z)
        return np.real(quad) + np.real(z @ self.c.conj())


@dataclass(frozen=True)
class ConstraintSet:
    """Affine equalities ``C z = d`` and real polynomial inequalities ``h_j <= 0``.

    Inequalities are polynomials over the encoded problem's modes.
    """

    equalities: tuple = ()
    inequalities: tuple = ()


@dataclass(frozen=True)
class EncodedProblem:
    """Cost polynomial plus the bookkeeping needed to sample and score it.

    ``variables`` lists, per mode, which quadratures carry decision variables
    (``"xp"`` or ``"x"``).  ``classical_terms`` are extra non-polynomial
    penalties that only enter the sampled estimator; ``hamiltonian_extra`` is
    an optional polynomial surrogate for them inside the circuit.
    """

    cost: QP
    kind: str
    variables: tuple[str, ...]
    n_variables: int
    is_complex: bool = True
    penalty: float | None = None
    slack_modes: int = 0
    classical_terms: tuple[Callable[[np.ndarray], np.ndarray], ...] = ()
    hamiltonian_extra: QP | None = None
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.variables) != self.cost.n_modes:
            raise ValueError("variables must list one entry per mode")

    @property
    def n_modes(self) -> int:
        return self.cost.n_modes

    @property
    def hamiltonian(self) -> QP:
        """Circuit Hamiltonian: the cost without its constant term."""
        h = self.cost.without_constant()
        if self.hamiltonian_extra is not None:
            h = h + self.hamiltonian_extra.without_constant()
        return h.real_part()

    @property
    def measures_p(self) -> bool:
        return any("p" in v for v in self.variables)

    def classical_cost(self, samples) -> np.ndarray:
        s = np.asarray(samples, dtype=float)
        out = np.asarray(self.cost.evaluate(s), dtype=float)
        for term in self.classical_terms:
            out = out + term(s)
        return out

    def active_indices(self) -> list[int]:
        """Positions in the interleaved ``(x1, p1, ...)`` vector that are decision variables."""
        idx = []
        for m, v in enumerate(self.variables):
            if "x" in v:
                idx.append(2 * m)
            if "p" in v:
                idx.append(2 * m + 1)
        return idx

    def decode(self, samples) -> np.ndarray:
        """Map quadrature samples to the problem's own variables (complex or real)."""
        s = np.asarray(samples, dtype=float)
        if self.kind == "cv-baseline":
            xs = s[..., 0 : 2 * self.n_variables * 2 : 2]
            return xs[..., 0::2] + 1j * xs[..., 1::2]
        if self.is_complex:
            return s[..., 0 : 2 * self.n_variables : 2] + 1j * s[..., 1 : 2 * self.n_variables : 2]
        return s[..., : self.n_variables]

    def z_polys(self) -> list[QP]:
        """Complex decision variables as polynomials in the quadratures."""
        n = self.n_modes
        if self.kind == "cv-baseline":
            return [QP.x(2 * j, n) + 1j * QP.x(2 * j + 1, n) for j in range(self.n_variables)]
        return [QP.z(j, n) for j in range(self.n_variables)]


def _re(poly: QP) -> QP:
    return (poly + poly.conj()) * 0.5


def _abs2(poly: QP) -> QP:
    return poly * poly.conj()


def _quadratic_cost(problem: ComplexQuadraticProblem, z: list[QP], n_modes: int) -> QP:
    cost = QP.zero(n_modes)
    for j in range(problem.n):
        for k in range(problem.n):
            if problem.A[j, k] != 0:
                cost = cost + problem.A[j, k] * z[j].conj() * z[k]
        if problem.c[j] != 0:
            cost = cost + _re(np.conj(problem.c[j]) * z[j])
    return cost.real_part()


def encode_complex_quadratic(problem: ComplexQuadraticProblem) -> EncodedProblem:
    n = problem.n
    z = [QP.z(j, n) for j in range(n)]
    return EncodedProblem(_quadratic_cost(problem, z, n), "ccv", ("xp",) * n, n)


def encode_cv_baseline(problem: ComplexQuadraticProblem) -> EncodedProblem:
    """Real and imaginary parts on the ``x`` quadratures of separate modes (``2n`` modes)."""
    n = problem.n
    z = [QP.x(2 * j, 2 * n) + 1j * QP.x(2 * j + 1, 2 * n) for j in range(n)]
    return EncodedProblem(_quadratic_cost(problem, z, 2 * n), "cv-baseline", ("x",) * (2 * n), n)


def _with_extra_mode(encoded: EncodedProblem) -> EncodedProblem:
    n = encoded.n_modes + 1
    extra = encoded.hamiltonian_extra.embed(n) if encoded.hamiltonian_extra is not None else None
    old = encoded.n_modes

    def widen(term):
        return lambda s: term(s[..., : 2 * old])

    return replace(
        encoded,
        cost=encoded.cost.embed(n),
        variables=encoded.variables + ("x",),
        hamiltonian_extra=extra,
        classical_terms=tuple(widen(t) for t in encoded.classical_terms),
    )


def _equality_polys(encoded: EncodedProblem, equalities) -> list[QP]:
    out = []
    for eq in equalities:
        if isinstance(eq, QP):
            out.append(eq)
            continue
        C, d = eq
        C = np.atleast_2d(np.asarray(C, dtype=complex))
        d = np.asarray(d, dtype=complex).reshape(-1)
        z = encoded.z_polys()
        if C.shape != (d.size, len(z)):
            raise EncodingError(f"constraint matrix shape {C.shape} does not match {len(z)} variables")
        for i in range(d.size):
            g = QP.constant(encoded.n_modes, -d[i])
            for j in range(len(z)):
                if C[i, j] != 0:
                    g = g + C[i, j] * z[j]
            out.append(g)
    return out


def apply_equality_penalty(encoded: EncodedProblem, equalities, lam: float) -> EncodedProblem:
    """Add ``lam * sum_i |g_i(z)|^2``; equalities are ``(C, d)`` pairs or complex polynomials."""
    if not lam > 0:
        raise ValueError("penalty weight must be > 0")
    penalty = QP.zero(encoded.n_modes)
    for g in _equality_polys(encoded, equalities):
        penalty = penalty + _abs2(g)
    cost = (encoded.cost + lam * penalty).real_part()
    return replace(encoded, cost=cost, penalty=lam)


def apply_slack_reformulation(encoded: EncodedProblem, h: QP, lam: float = 1.0) -> EncodedProblem:
    """Turn ``h <= 0`` into ``h + s^2 = 0`` with ``s`` on the ``x`` quadrature of a new mode."""
    if not lam > 0:
        raise ValueError("penalty weight must be > 0")
    if h.n_modes != encoded.n_modes:
        raise ValueError("inequality polynomial must live on the encoded problem's modes")
    wider = _with_extra_mode(encoded)
    n = wider.n_modes
    s = QP.x(n - 1, n)
    g = h.real_part().embed(n) + s * s
    cost = (wider.cost + lam * g * g).real_part()
    return replace(wider, cost=cost, penalty=lam, slack_modes=encoded.slack_modes + 1)


def swish(u):
    """``R(u) = u * sigmoid(u)``, computed without overflow."""
    u = np.asarray(u, dtype=float)
    return u * 0.5 * (1.0 + np.tanh(0.5 * u))


def swish_taylor_coefficients(order: int) -> np.ndarray:
    """Coefficients ``a_k`` of ``R(u) = sum_k a_k u^k`` up to ``u^order``."""
    # sigmoid(u) = 1/2 + 1/2 tanh(u/2), tanh y = sum 2^{2n}(2^{2n}-1) B_{2n} y^{2n-1} / (2n)!
    sig = np.zeros(order + 1)
    sig[0] = 0.5
    B = bernoulli(order + 2)
    for n in range(1, order // 2 + 2):
        k = 2 * n - 1
        if k > order:
            break
        tanh_coef = 2 ** (2 * n) * (2 ** (2 * n) - 1) * B[2 * n] / math.factorial(2 * n)
        sig[k] = 0.5 * tanh_coef * 0.5**k
    coef = np.zeros(order + 1)
    coef[1:] = sig[:-1]
    return coef


def apply_swish_penalty(encoded: EncodedProblem, h: QP, lam: float, taylor_order: int | None = None) -> EncodedProblem:
    """Add ``R(lam * h(z))`` to the sampled cost; optionally a Taylor surrogate to the circuit."""
    if not lam > 0:
        raise ValueError("penalty weight must be > 0")
    h = h.real_part()

    def term(samples, h=h, lam=lam):
        return swish(lam * np.asarray(h.evaluate(samples), dtype=float))

    extra = encoded.hamiltonian_extra
    if taylor_order:
        coef = swish_taylor_coefficients(taylor_order)
        u = lam * h
        surrogate = QP.zero(encoded.n_modes)
        for k, a in enumerate(coef):
            if a:
                surrogate = surrogate + a * u**k
        extra = surrogate if extra is None else extra + surrogate
    return replace(encoded, classical_terms=encoded.classical_terms + (term,), hamiltonian_extra=extra, penalty=lam)


def encode_real_multivariate(f: Callable[[list[QP]], QP], n: int, pad: bool = False) -> EncodedProblem:
    """Encode ``f(v_1, ..., v_n)`` with ``(v_{2k-1}, v_{2k})`` on ``(x_k, p_k)``.

    ``f`` receives the variable polynomials and returns a polynomial.  Odd
    ``n`` needs ``pad=True``, which adds one unused variable.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if n % 2 and not pad:
        raise EncodingError("odd number of real variables; pass pad=True to add a dummy variable")
    n_modes = (n + 1) // 2
    v = []
    for k in range(n_modes):
        v += [QP.x(k, n_modes), QP.p(k, n_modes)]
    cost = f(v[:n])
    if not isinstance(cost, QP):
        cost = QP.constant(n_modes, cost)
    variables = ["xp"] * n_modes
    if n % 2:
        variables[-1] = "x"
    return EncodedProblem(cost.real_part(), "real", tuple(variables), n, is_complex=False)


def styblinski_tang(n: int = 2) -> EncodedProblem:
    def f(v):
        return 0.5 * sum((vi**4 - 16 * vi**2 + 5 * vi for vi in v), QP.zero(v[0].n_modes))

    enc = encode_real_multivariate(f, n, pad=bool(n % 2))
    return replace(enc, metadata={"name": f"styblinski-tang-{n}d"})


def encode_quartic_complex(hconst: complex, b: complex, c: complex) -> EncodedProblem:
    """``|z - hconst|^4 - |b z|^2 + Re(c z)`` on one mode."""
    z = QP.z(0, 1)
    w = z - hconst
    cost = _abs2(w) ** 2 - abs(b) ** 2 * _abs2(z) + _re(c * z)
    return EncodedProblem(
        cost.real_part(), "ccv", ("xp",), 1, metadata={"hconst": complex(hconst), "b": complex(b), "c": complex(c)}
    )


# -- classical reference optimum -------------------------------------------


@dataclass(frozen=True)
class OracleResult:
    argmin: np.ndarray
    value: float
    converged: bool
    n_starts: int


def classical_oracle(
    encoded: EncodedProblem,
    budget: int = 200_000,
    box: float = 10.0,
    n_refine: int = 8,
    seed: int = 0,
) -> OracleResult:
    """Multi-start local search: a coarse grid (or random seeds in high dimension), then polishing.

    Grid resolution is 41 points per active variable when ``41**d <= budget``;
    otherwise ``budget`` uniform random seeds are drawn in ``[-box, box]^d``.
    The ``n_refine`` best seeds are polished with Nelder-Mead followed by BFGS.
    """
    idx = encoded.active_indices()
    d = len(idx)
    full_dim = 2 * encoded.n_modes

    def lift(u):
        u = np.atleast_2d(u)
        s = np.zeros((u.shape[0], full_dim))
        s[:, idx] = u
        return s

    def f(u):
        return float(encoded.classical_cost(lift(u))[0])

    if 41**d <= budget:
        axes = [np.linspace(-box, box, 41)] * d
        seeds = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, d)
    else:
        seeds = np.random.default_rng(seed).uniform(-box, box, size=(budget, d))
    vals = np.concatenate([encoded.classical_cost(lift(chunk)) for chunk in np.array_split(seeds, max(1, len(seeds) // 50_000))])
    order = np.argsort(vals)[:n_refine]
    best_u, best_v, converged = seeds[order[0]], vals[order[0]], False
    for i in order:
        r = minimize(f, seeds[i], method="Nelder-Mead", options={"xatol": 1e-10, "fatol": 1e-12, "maxiter": 20_000, "maxfev": 40_000})
        r2 = minimize(f, r.x, method="BFGS", options={"gtol": 1e-10})
        x, v = (r2.x, r2.fun) if r2.fun <= r.fun else (r.x, r.fun)
        if v < best_v - 1e-15 or not converged:
            if v <= best_v:
                best_u, best_v = x, v
            converged = converged or bool(r.success or r2.success)
    return OracleResult(lift(best_u)[0], float(best_v), converged, len(seeds))


# -- paper instances --------------------------------------------------------


def quadratic_instance(n: int) -> ComplexQuadraticProblem:
    """``A = I_n``, ``c = -(4 + 4i) 1_n``; optimum ``-8 n`` at ``z = 2 + 2i``."""
    return ComplexQuadraticProblem(np.eye(n), -(4 + 4j) * np.ones(n))


CONSTRAINED_A = np.array([[1.0, 0.5 - 1.0j], [0.5 + 1.0j, 2.0]])
CONSTRAINED_B = np.eye(2) / np.sqrt(10)
CONSTRAINED_C = np.array(
    [1 / (2 * np.sqrt(10)) - np.sqrt(10) / 4 * 1j, 3 / (2 * np.sqrt(10)) + 1j / np.sqrt(10)]
)


def constrained_quadratic(lam: float = 10.0, A=CONSTRAINED_A, B=CONSTRAINED_B, c=CONSTRAINED_C) -> EncodedProblem:
    """``z^H A z + lam |B z - c|^2`` on two modes."""
    base = encode_complex_quadratic(ComplexQuadraticProblem(A, np.zeros(len(c))))
    enc = apply_equality_penalty(base, [(B, c)], lam)
    return replace(enc, metadata={"name": "constrained-quadratic", "lambda": lam})


# Constants for the complex quartic: global minimum about -28.70 near -2.22-2.22i,
# second local minimum near 0.18+0.18i.
QUARTIC_DEFAULTS = {"hconst": -0.75 - 0.75j, "b": math.sqrt(6.6403), "c": -4.0708 + 4.0708j}
