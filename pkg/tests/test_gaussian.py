import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ccvqaoa import gates
from ccvqaoa.errors import NotGaussianError, NumericalStateError
from ccvqaoa.fock import apply_circuit as fock_circuit
from ccvqaoa.fock import expectation, quadrature_moments, vacuum_state
from ccvqaoa.gaussian import (
    GaussianState,
    apply_circuit,
    apply_gate,
    gaussian_expectation,
    gaussian_homodyne_sample_all,
    gaussian_vacuum,
    heterodyne_sample,
    quadratic_evolution,
    quadratic_form,
    symplectic_eigenvalues,
    symplectic_form,
)
from ccvqaoa.operators import hamiltonian_matrix
from ccvqaoa.polynomial import QuadraturePolynomial as QP


def test_vacuum_is_pure_and_physical():
    s = gaussian_vacuum(2)
    assert s.is_physical()
    assert np.allclose(symplectic_eigenvalues(s.cov), 1.0)


def test_unphysical_state_detected():
    assert not GaussianState(1, np.zeros(2), 0.1 * np.eye(2)).is_physical()


def test_asymmetric_covariance_rejected():
    with pytest.raises(NumericalStateError):
        GaussianState(1, np.zeros(2), np.array([[1.0, 0.5], [0.0, 1.0]]))


def test_non_gaussian_gate_rejected():
    with pytest.raises(NotGaussianError):
        apply_gate(gaussian_vacuum(1), gates.kerr(0.1))


def test_quadratic_form_roundtrip():
    h = QP.x(0, 2, 2) + 0.5 * QP.x(0, 2) * QP.p(1, 2) - 2 * QP.p(1, 2) + 3
    M, v, c = quadratic_form(h)
    xi = np.array([0.3, -1.0, 0.7, 2.0])
    assert np.isclose(0.5 * xi @ M @ xi + v @ xi + c, h.evaluate(xi))


def test_quadratic_form_rejects_cubic():
    with pytest.raises(NotGaussianError):
        quadratic_form(QP.x(0, 1, 3))


@settings(max_examples=20)
@given(st.floats(-1, 1), st.floats(-1, 1), st.floats(0.05, 1.5))
def test_evolution_is_symplectic(a, b, t):
    h = QP.x(0, 2, 2) + a * QP.x(0, 2) * QP.x(1, 2) + b * QP.p(1, 2, 2) + QP.p(0, 2, 2)
    s = quadratic_evolution(gaussian_vacuum(2), h, t)
    assert s.is_physical()
    # pure states keep unit symplectic eigenvalues
    assert np.allclose(symplectic_eigenvalues(s.cov), 1.0, atol=1e-9)


def test_linear_hamiltonian_displaces():
    # exp(-i t p) shifts x by hbar t
    s = quadratic_evolution(gaussian_vacuum(1), QP.p(0, 1), 0.5)
    assert np.allclose(s.mean, [1.0, 0.0])


def test_symplectic_form():
    Om = symplectic_form(2)
    assert np.allclose(Om @ Om, -np.eye(4))


def test_heterodyne_adds_vacuum_noise():
    s = apply_gate(gaussian_vacuum(1), gates.squeezing(0.5))
    d = heterodyne_sample(s, 200000, 0)
    assert np.allclose(np.cov(d.T), s.cov + np.eye(2), atol=0.05)


def test_joint_homodyne_shape_and_seed():
    s = gaussian_vacuum(3)
    a = gaussian_homodyne_sample_all(s, "p", 4, 2)
    assert a.shape == (4, 3)
    assert np.array_equal(a, gaussian_homodyne_sample_all(s, "p", 4, 2))


def test_expectation_matches_fock_for_quartic():
    circuit = [gates.squeezing(0.3), gates.displacement(0.4 - 0.2j)]
    g = apply_circuit(gaussian_vacuum(1), circuit)
    f = fock_circuit(vacuum_state(1, 40), circuit, warn=False)
    for poly in (QP.x(0, 1, 4), QP.x(0, 1, 2) * QP.p(0, 1, 2), QP.x(0, 1, 3) * QP.p(0, 1)):
        sym = poly.real_part()
        want = expectation(f, hamiltonian_matrix(sym, 40))
        assert np.isclose(gaussian_expectation(g, sym), want, atol=1e-6)


single = st.one_of(
    st.builds(gates.displacement, st.complex_numbers(max_magnitude=1.5)),
    st.builds(gates.squeezing, st.floats(-0.6, 0.6), st.just(0), st.floats(0, np.pi)),
    st.builds(gates.rotation, st.floats(-np.pi, np.pi)),
)


@settings(max_examples=10)
@given(st.lists(single, min_size=1, max_size=4))
def test_cross_validation_single_mode(circuit):
    g = apply_circuit(gaussian_vacuum(1), circuit)
    f = fock_circuit(vacuum_state(1, 25), circuit, warn=False)
    mean, cov = quadrature_moments(f)
    if f.truncation_loss < 1e-8:
        assert np.allclose(mean, g.mean, atol=1e-3)
        assert np.allclose(cov, g.cov, atol=1e-3)
