"""Complex continuous-variable QAOA: simulators, encodings and the variational loop."""

from .encoding import (
    ComplexQuadraticProblem,
    EncodedProblem,
    classical_oracle,
    encode_complex_quadratic,
    encode_cv_baseline,
    encode_quartic_complex,
    styblinski_tang,
)
from .errors import CCVError
from .polynomial import QuadraturePolynomial, kinetic_mixer
from .qaoa import QaoaConfig, RunResult, run

__all__ = [
    "CCVError",
    "ComplexQuadraticProblem",
    "EncodedProblem",
    "QaoaConfig",
    "QuadraturePolynomial",
    "RunResult",
    "classical_oracle",
    "encode_complex_quadratic",
    "encode_cv_baseline",
    "encode_quartic_complex",
    "kinetic_mixer",
    "run",
    "styblinski_tang",
]
