"""Truncated Fock-space operator matrices and commutator-based synthesis.

All matrices live in the span of ``|0>, ..., |D-1>`` per mode.  Quadratures
follow ``x = sqrt(hbar/2) (a + a^dag)`` and ``p = i sqrt(hbar/2) (a^dag - a)``
so that ``[x, p] = i hbar`` away from the truncation edge.
"""

from __future__ import annotations

import warnings
from functools import lru_cache

import numpy as np
import scipy.sparse as sp
from scipy.linalg import expm

from .errors import EncodingError, InvalidCutoffError
from .polynomial import QuadraturePolynomial

DEFAULT_HBAR = 2.0
MAX_DIM = 4096


def _check_cutoff(D: int) -> None:
    if int(D) != D or D < 2:
        raise InvalidCutoffError(f"cutoff must be an integer >= 2, got {D}")


def ladder_operators(D: int, hbar: float = DEFAULT_HBAR) -> tuple[np.ndarray, np.ndarray]:
    """Annihilation and creation operators truncated to ``D`` levels.

    ``hbar`` is accepted for a uniform signature; the ladder operators do not
    depend on it.
    """
    _check_cutoff(D)
    a = np.diag(np.sqrt(np.arange(1, D, dtype=float)), k=1).astype(complex)
    return a, a.conj().T


def number_operator(D: int) -> np.ndarray:
    _check_cutoff(D)
    return np.diag(np.arange(D, dtype=float)).astype(complex)


def quadrature_operators(D: int, hbar: float = DEFAULT_HBAR) -> tuple[np.ndarray, np.ndarray]:
    if hbar <= 0:
        raise ValueError("hbar must be positive")
    a, ad = ladder_operators(D)
    s = np.sqrt(hbar / 2)
    return s * (a + ad), 1j * s * (ad - a)


def commutator(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    return A @ B - B @ A


def interior_block(M: np.ndarray, size: int) -> np.ndarray:
    """Top-left ``size x size`` block, the part unaffected by the truncation edge."""
    if size < 1:
        raise ValueError("interior block is empty; increase the cutoff")
    return M[:size, :size]


@lru_cache(maxsize=512)
def _factor_matrix(xp: int, pp: int, D: int, hbar: float) -> np.ndarray:
    # Products are formed in a padded space so the returned block holds the
    # exact (untruncated) matrix elements of the monomial.
    pad = D + xp + pp
    x, p = quadrature_operators(pad, hbar)
    X = np.linalg.matrix_power(x, xp)
    P = np.linalg.matrix_power(p, pp)
    M = 0.5 * (X @ P + P @ X) if (xp and pp) else X @ P
    out = M[:D, :D].copy()
    out.setflags(write=False)
    return out


def monomial_matrix(xp: int, pp: int, D: int, hbar: float = DEFAULT_HBAR) -> np.ndarray:
    """Matrix of ``x**xp p**pp`` on one mode, symmetrized when both powers are positive."""
    _check_cutoff(D)
    return _factor_matrix(int(xp), int(pp), int(D), float(hbar))


def hamiltonian_matrix(
    poly: QuadraturePolynomial,
    D: int,
    hbar: float = DEFAULT_HBAR,
    max_dim: int = MAX_DIM,
) -> np.ndarray:
    """Hermitian matrix of a real quadrature polynomial on the ``D**n_modes`` space.

    Mode 0 is the most significant tensor factor.
    """
    _check_cutoff(D)
    dim = D**poly.n_modes
    if dim > max_dim:
        raise ValueError(f"Hilbert-space dimension {dim} exceeds budget {max_dim}")
    poly = poly.real_part()
    H = np.zeros((dim, dim), dtype=complex)
    eye = np.eye(D, dtype=complex)
    for key, coef in poly.terms.items():
        term = np.ones((1, 1), dtype=complex)
        for xp, pp in key:
            factor = eye if (xp == 0 and pp == 0) else monomial_matrix(xp, pp, D, hbar)
            term = np.kron(term, factor)
        H += coef * term
    scale = max(1.0, np.abs(H).max(initial=0.0))
    if np.abs(H - H.conj().T).max(initial=0.0) > 1e-12 * scale:
        raise EncodingError("polynomial did not produce a Hermitian matrix")
    return 0.5 * (H + H.conj().T)


def group_commutator_product(A: np.ndarray, B: np.ndarray, dt: float) -> np.ndarray:
    """``e^{iA dt} e^{iB dt} e^{-iA dt} e^{-iB dt}``, which approximates ``exp(-[A, B] dt^2)``."""
    A = np.asarray(A)
    B = np.asarray(B)
    if A.shape != B.shape or A.shape[0] != A.shape[1]:
        raise ValueError(f"dimension mismatch: {A.shape} vs {B.shape}")
    eA = expm(1j * dt * A)
    eB = expm(1j * dt * B)
    return eA @ eB @ eA.conj().T @ eB.conj().T


def power_synthesis_constant(m: int, hbar: float = DEFAULT_HBAR) -> float:
    """Scale turning ``[x^m, [x^3, p^2]]`` into ``x^(m+1)``.

    Follows from ``[x^m, [x^3, p^2]] = -6 m hbar^2 x^(m+1)``.
    """
    return -1.0 / (6.0 * m * hbar**2)


def synthesize_x_power(
    m: int,
    D: int,
    hbar: float = DEFAULT_HBAR,
    x: np.ndarray | None = None,
    p: np.ndarray | None = None,
) -> np.ndarray:
    """Build ``x^(m+1)`` from the nested commutator ``[x^m, [x^3, p^2]]``.

    Matrices are truncated, so only the block with indices below
    ``D - 3 (m + 1)`` reproduces the untruncated operator.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    _check_cutoff(D)
    if D - 3 * (m + 1) < 1:
        warnings.warn("cutoff too small: synthesized power is truncation dominated", stacklevel=2)
    x0, p0 = quadrature_operators(D, hbar)
    x = x0 if x is None else x
    p = p0 if p is None else p
    xm = np.linalg.matrix_power(x, m)
    inner = commutator(np.linalg.matrix_power(x, 3), p @ p)
    return power_synthesis_constant(m, hbar) * commutator(xm, inner)


def symmetric_mixed_power(
    m: int,
    n: int,
    D: int,
    hbar: float = DEFAULT_HBAR,
    x: np.ndarray | None = None,
    p: np.ndarray | None = None,
) -> np.ndarray:
    """Build ``x^m p^n + p^n x^m`` from commutators of pure powers.

    Uses ``2/(i hbar (m+1)(n+1)) [x^(m+1), p^(n+1)]`` minus the correction
    ``1/(n+1) sum_{k=1}^{n-1} [p^(n-k), [x^m, p^k]]``.
    """
    if m < 1 or n < 1:
        raise ValueError("m and n must be >= 1")
    _check_cutoff(D)
    x0, p0 = quadrature_operators(D, hbar)
    x = x0 if x is None else x
    p = p0 if p is None else p
    mp = np.linalg.matrix_power
    lead = (2.0 / (1j * hbar * (m + 1) * (n + 1))) * commutator(mp(x, m + 1), mp(p, n + 1))
    xm = mp(x, m)
    corr = np.zeros_like(lead)
    for k in range(1, n):
        corr += commutator(mp(p, n - k), commutator(xm, mp(p, k)))
    return lead - corr / (n + 1)


def hamiltonian_sparse(poly: QuadraturePolynomial, D: int, hbar: float = DEFAULT_HBAR):
    """Sparse (CSR) counterpart of :func:`hamiltonian_matrix`, without a dimension budget."""
    _check_cutoff(D)
    poly = poly.real_part()
    dim = D**poly.n_modes
    H = sp.csr_matrix((dim, dim), dtype=complex)
    eye = sp.identity(D, dtype=complex, format="csr")
    for key, coef in poly.terms.items():
        term = sp.csr_matrix(np.ones((1, 1), dtype=complex))
        for xp, pp in key:
            if xp == 0 and pp == 0:
                factor = eye
            else:
                f = monomial_matrix(xp, pp, D, hbar).copy()
                f[np.abs(f) < 1e-14 * max(1.0, np.abs(f).max())] = 0
                factor = sp.csr_matrix(f)
            term = sp.kron(term, factor, format="csr")
        H = H + coef * term
    return H
