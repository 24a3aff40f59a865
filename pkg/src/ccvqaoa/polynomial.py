"""Polynomials in per-mode quadrature variables.

A :class:`QuadraturePolynomial` is the intermediate representation shared by the
problem encoder and both simulation backends.  Terms are stored as a mapping from
a monomial key to a coefficient, where a monomial key holds one ``(x_power,
p_power)`` pair per mode.  Arithmetic is commutative (classical) algebra; the
operator ordering of same-mode ``x**m * p**n`` products is fixed only when the
polynomial is turned into a matrix, where such terms are symmetrized.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from numbers import Number
from typing import Iterable, Mapping

import numpy as np

from .errors import EncodingError

Monomial = tuple[tuple[int, int], ...]


def _zero_key(n_modes: int) -> Monomial:
    return ((0, 0),) * n_modes


@dataclass(frozen=True)
class QuadraturePolynomial:
    n_modes: int
    terms: Mapping[Monomial, complex] = field(default_factory=dict)

    def __post_init__(self):
        if self.n_modes < 1:
            raise ValueError("n_modes must be positive")
        clean = {}
        for key, coef in self.terms.items():
            key = tuple(tuple(int(v) for v in f) for f in key)
            if len(key) != self.n_modes:
                raise ValueError(f"monomial {key} does not match n_modes={self.n_modes}")
            if any(a < 0 or b < 0 for a, b in key):
                raise ValueError("negative powers are not allowed")
            if not np.isfinite(coef):
                raise ValueError("coefficients must be finite")
            if coef != 0:
                clean[key] = clean.get(key, 0) + coef
        object.__setattr__(self, "terms", {k: v for k, v in clean.items() if v != 0})

    # -- constructors -------------------------------------------------------

    @classmethod
    def constant(cls, n_modes: int, value: complex) -> "QuadraturePolynomial":
        return cls(n_modes, {_zero_key(n_modes): value})

    @classmethod
    def zero(cls, n_modes: int) -> "QuadraturePolynomial":
        return cls(n_modes, {})

    @classmethod
    def x(cls, mode: int, n_modes: int, power: int = 1) -> "QuadraturePolynomial":
        key = list(_zero_key(n_modes))
        key[mode] = (power, 0)
        return cls(n_modes, {tuple(key): 1.0})

    @classmethod
    def p(cls, mode: int, n_modes: int, power: int = 1) -> "QuadraturePolynomial":
        key = list(_zero_key(n_modes))
        key[mode] = (0, power)
        return cls(n_modes, {tuple(key): 1.0})

    @classmethod
    def z(cls, mode: int, n_modes: int) -> "QuadraturePolynomial":
        """The complex variable ``x + i p`` of one mode."""
        return cls.x(mode, n_modes) + 1j * cls.p(mode, n_modes)

    # -- algebra ------------------------------------------------------------

    def _coerce(self, other) -> "QuadraturePolynomial":
        if isinstance(other, QuadraturePolynomial):
            if other.n_modes != self.n_modes:
                raise ValueError("mode count mismatch")
            return other
        if isinstance(other, Number):
            return QuadraturePolynomial.constant(self.n_modes, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return QuadraturePolynomial(self.n_modes, out)

    __radd__ = __add__

    def __neg__(self):
        return QuadraturePolynomial(self.n_modes, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Number):
            return QuadraturePolynomial(self.n_modes, {k: v * other for k, v in self.terms.items()})
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out: dict[Monomial, complex] = {}
        for k1, v1 in self.terms.items():
            for k2, v2 in other.terms.items():
                key = tuple((a1 + a2, b1 + b2) for (a1, b1), (a2, b2) in zip(k1, k2))
                out[key] = out.get(key, 0) + v1 * v2
        return QuadraturePolynomial(self.n_modes, out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Number):
            return NotImplemented
        return self * (1.0 / other)

    def __pow__(self, k: int):
        if k < 0 or int(k) != k:
            raise ValueError("only non-negative integer powers")
        out = QuadraturePolynomial.constant(self.n_modes, 1.0)
        for _ in range(int(k)):
            out = out * self
        return out

    def conj(self) -> "QuadraturePolynomial":
        return QuadraturePolynomial(self.n_modes, {k: np.conj(v) for k, v in self.terms.items()})

    # -- inspection ---------------------------------------------------------

    @property
    def degree(self) -> int:
        if not self.terms:
            return 0
        return max(sum(a + b for a, b in k) for k in self.terms)

    @property
    def is_real(self) -> bool:
        return all(np.imag(v) == 0 for v in self.terms.values())

    @property
    def constant_term(self) -> float:
        return self.terms.get(_zero_key(self.n_modes), 0.0)

    def mixed_terms(self) -> list[Monomial]:
        """Monomials with both x and p powers on the same mode (symmetrized on quantization)."""
        return [k for k in self.terms if any(a > 0 and b > 0 for a, b in k)]

    def without_constant(self) -> "QuadraturePolynomial":
        zero = _zero_key(self.n_modes)
        return QuadraturePolynomial(self.n_modes, {k: v for k, v in self.terms.items() if k != zero})

    def real_part(self, tol: float = 1e-10) -> "QuadraturePolynomial":
        """Drop imaginary residue below ``tol``; raise :class:`EncodingError` otherwise."""
        out = {}
        for k, v in self.terms.items():
            if abs(np.imag(v)) > tol:
                raise EncodingError(f"monomial {k} has imaginary coefficient {v}")
            out[k] = float(np.real(v))
        return QuadraturePolynomial(self.n_modes, out)

    def embed(self, n_modes: int, offset: int = 0) -> "QuadraturePolynomial":
        """Place this polynomial on modes ``offset .. offset + self.n_modes - 1`` of a larger register."""
        if offset < 0 or offset + self.n_modes > n_modes:
            raise ValueError("embedding out of range")
        out = {}
        for k, v in self.terms.items():
            key = [(0, 0)] * n_modes
            key[offset : offset + self.n_modes] = k
            out[tuple(key)] = v
        return QuadraturePolynomial(n_modes, out)

    def support(self) -> list[int]:
        """Modes that carry at least one nonzero power."""
        used = set()
        for k in self.terms:
            used.update(i for i, (a, b) in enumerate(k) if a or b)
        return sorted(used)

    def uses_p(self) -> bool:
        return any(b > 0 for k in self.terms for _, b in k)

    # -- evaluation ---------------------------------------------------------

    def evaluate(self, samples) -> np.ndarray:
        """Evaluate at scalar quadrature values.

        ``samples`` has trailing dimension ``2 * n_modes`` in interleaved order
        ``(x1, p1, x2, p2, ...)``.  Returns an array of the leading shape.
        """
        s = np.asarray(samples, dtype=float)
        if s.shape[-1] != 2 * self.n_modes:
            raise ValueError(f"expected trailing dim {2 * self.n_modes}, got {s.shape[-1]}")
        out = np.zeros(s.shape[:-1], dtype=complex if not self.is_real else float)
        for k, v in self.terms.items():
            term = np.full(s.shape[:-1], v, dtype=out.dtype)
            for mode, (a, b) in enumerate(k):
                if a:
                    term = term * s[..., 2 * mode] ** a
                if b:
                    term = term * s[..., 2 * mode + 1] ** b
            out = out + term
        return out

    def __call__(self, samples) -> np.ndarray:
        return self.evaluate(samples)

    def __repr__(self) -> str:
        if not self.terms:
            return f"QuadraturePolynomial({self.n_modes}, 0)"
        parts = []
        for k, v in sorted(self.terms.items()):
            factors = []
            for i, (a, b) in enumerate(k):
                if a:
                    factors.append(f"x{i}" + (f"^{a}" if a > 1 else ""))
                if b:
                    factors.append(f"p{i}" + (f"^{b}" if b > 1 else ""))
            parts.append(f"{v:g}" + ("*" + "*".join(factors) if factors else ""))
        return f"QuadraturePolynomial({self.n_modes}, " + " + ".join(parts) + ")"

    # -- serialization ------------------------------------------------------

    def to_list(self) -> list[dict]:
        return [
            {"coefficient": float(np.real(v)), "powers": [list(f) for f in k]}
            for k, v in sorted(self.terms.items())
        ]

    @classmethod
    def from_list(cls, n_modes: int, items: Iterable[Mapping]) -> "QuadraturePolynomial":
        return cls(n_modes, {tuple(tuple(f) for f in it["powers"]): it["coefficient"] for it in items})


def kinetic_mixer(n_modes: int) -> QuadraturePolynomial:
    """Sum of ``p_j**2`` over all modes."""
    out = QuadraturePolynomial.zero(n_modes)
    for j in range(n_modes):
        out = out + QuadraturePolynomial.p(j, n_modes, 2)
    return out
