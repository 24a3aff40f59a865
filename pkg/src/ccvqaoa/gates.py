"""Gate descriptions shared by the Fock and Gaussian backends.

Every gate is ``U = exp(-i G)`` for a generator polynomial ``G`` on its target
modes.  Conventions (``hbar`` enters through the quadrature scale):

* ``displacement(alpha)`` shifts ``<x>`` by ``sqrt(2 hbar) Re(alpha)`` and
  ``<p>`` by ``sqrt(2 hbar) Im(alpha)``.
* ``squeezing(r, phi)`` is ``exp((z* a^2 - z a^dag^2) / 2)`` with ``z = r e^{i phi}``;
  ``r > 0`` narrows ``x``.
* ``rotation(theta)`` is ``exp(i theta n)``.
* ``beamsplitter(theta, phi)`` is ``exp(theta (e^{i phi} a1 a2^dag - e^{-i phi} a1^dag a2))``.
* ``kerr(kappa)`` is ``exp(-i kappa n^2)`` and ``cubic_phase(gamma)`` is ``exp(-i gamma x^3)``.
* ``controlled_phase(s)`` is ``exp(-i s x1 x2)`` and ``controlled_x(s)`` is ``exp(-i s x1 p2)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .polynomial import QuadraturePolynomial as QP

GATE_ARITY = {
    # kind: (n_params, n_modes)
    "displacement": (1, 1),
    "squeezing": (2, 1),
    "rotation": (1, 1),
    "beamsplitter": (2, 2),
    "kerr": (1, 1),
    "cubic_phase": (1, 1),
    "controlled_phase": (1, 2),
    "controlled_x": (1, 2),
}

GAUSSIAN_KINDS = frozenset(GATE_ARITY) - {"kerr", "cubic_phase"}


@dataclass(frozen=True)
class GateSpec:
    kind: str
    params: tuple
    modes: tuple[int, ...]

    def __post_init__(self):
        if self.kind not in GATE_ARITY:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        n_params, n_modes = GATE_ARITY[self.kind]
        params = tuple(self.params) if np.ndim(self.params) else (self.params,)
        modes = tuple(int(m) for m in (self.modes if np.ndim(self.modes) else (self.modes,)))
        # squeezing and beamsplitter accept an omitted phase
        if self.kind in ("squeezing", "beamsplitter") and len(params) == 1:
            params = params + (0.0,)
        if len(params) != n_params:
            raise ValueError(f"{self.kind} takes {n_params} parameter(s), got {len(params)}")
        if len(modes) != n_modes or len(set(modes)) != n_modes:
            raise ValueError(f"{self.kind} acts on {n_modes} distinct mode(s), got {modes}")
        object.__setattr__(self, "params", params)
        object.__setattr__(self, "modes", modes)

    @property
    def is_gaussian(self) -> bool:
        return self.kind in GAUSSIAN_KINDS


def displacement(alpha: complex, mode: int = 0) -> GateSpec:
    return GateSpec("displacement", (complex(alpha),), (mode,))


def squeezing(r: float, mode: int = 0, phi: float = 0.0) -> GateSpec:
    return GateSpec("squeezing", (float(r), float(phi)), (mode,))


def rotation(theta: float, mode: int = 0) -> GateSpec:
    return GateSpec("rotation", (float(theta),), (mode,))


def beamsplitter(theta: float, modes=(0, 1), phi: float = 0.0) -> GateSpec:
    return GateSpec("beamsplitter", (float(theta), float(phi)), tuple(modes))


def kerr(kappa: float, mode: int = 0) -> GateSpec:
    return GateSpec("kerr", (float(kappa),), (mode,))


def cubic_phase(gamma: float, mode: int = 0) -> GateSpec:
    return GateSpec("cubic_phase", (float(gamma),), (mode,))


def controlled_phase(s: float, modes=(0, 1)) -> GateSpec:
    return GateSpec("controlled_phase", (float(s),), tuple(modes))


def controlled_x(s: float, modes=(0, 1)) -> GateSpec:
    return GateSpec("controlled_x", (float(s),), tuple(modes))


def generator(gate: GateSpec, hbar: float) -> QP:
    """Generator polynomial ``G`` on the gate's local modes (constants dropped)."""
    k = gate.kind
    n = GATE_ARITY[k][1]
    x = [QP.x(i, n) for i in range(n)]
    p = [QP.p(i, n) for i in range(n)]
    if k == "displacement":
        alpha = gate.params[0]
        dx = np.sqrt(2 * hbar) * np.real(alpha)
        dp = np.sqrt(2 * hbar) * np.imag(alpha)
        return (dx * p[0] - dp * x[0]) / hbar
    if k == "squeezing":
        r, phi = gate.params
        u, v = r * np.cos(phi), r * np.sin(phi)
        return (-u * x[0] * p[0]) / hbar + v * (x[0] ** 2 - p[0] ** 2) / (2 * hbar)
    if k == "rotation":
        theta = gate.params[0]
        return -theta * (x[0] ** 2 + p[0] ** 2) / (2 * hbar)
    if k == "beamsplitter":
        theta, phi = gate.params
        return (-theta / hbar) * (
            np.sin(phi) * (x[0] * x[1] + p[0] * p[1]) + np.cos(phi) * (p[0] * x[1] - x[0] * p[1])
        )
    if k == "kerr":
        nop = (x[0] ** 2 + p[0] ** 2) / (2 * hbar) - 0.5
        return (gate.params[0] * nop**2).without_constant()
    if k == "cubic_phase":
        return gate.params[0] * x[0] ** 3
    if k == "controlled_phase":
        return gate.params[0] * x[0] * x[1]
    if k == "controlled_x":
        return gate.params[0] * x[0] * p[1]
    raise ValueError(k)
