import numpy as np
import pytest

from ccvqaoa import gates
from ccvqaoa.errors import GridTooSmallError
from ccvqaoa.fock import FockState, apply_circuit, apply_gate, vacuum_state
from ccvqaoa.gaussian import apply_circuit as g_circuit
from ccvqaoa.gaussian import gaussian_vacuum
from ccvqaoa.wigner import (
    WignerGrid,
    default_axis,
    marginal_check,
    wigner,
    wigner_fock,
    wigner_from_density_matrix,
    wigner_gaussian,
)

HBAR = 2.0


def fock_state(n, D=10):
    amps = np.zeros(D, complex)
    amps[n] = 1
    return FockState(1, D, amps)


STATES = {
    "vacuum": [],
    "squeezed": [gates.squeezing(0.5)],
    "displaced": [gates.displacement(0.8 - 0.4j)],
}


@pytest.mark.parametrize("name", STATES)
def test_fock_grid_invariants(name):
    s = apply_circuit(vacuum_state(1, 30), STATES[name], warn=False)
    g = wigner_fock(s)
    assert abs(g.normalization - 1) < 5e-3
    assert np.abs(g.values).max() <= g.bound + 1e-6
    # truncation leaves ripples of order the top-level population
    assert g.values.min() > -1e-6
    assert marginal_check(g, s)[2]


@pytest.mark.parametrize("name", STATES)
def test_gaussian_grid_invariants(name):
    s = g_circuit(gaussian_vacuum(1), STATES[name])
    g = wigner_gaussian(s)
    assert abs(g.normalization - 1) < 5e-3
    assert marginal_check(g, s)[2]
    assert g.values.min() > -1e-9
    assert g.negativity_volume < 1e-9


def test_vacuum_peak():
    x = np.array([-0.5, 0.0, 0.5])
    W = wigner_from_density_matrix(np.array([[1.0]]), x, x, HBAR)
    assert np.isclose(W[1, 1], 1 / (2 * np.pi))


def test_single_photon_origin():
    x = np.array([0.0, 1.0])
    W = wigner_from_density_matrix(np.diag([0, 1.0]).astype(complex), x, x, HBAR)
    assert abs(W[0, 0] + 1 / (np.pi * HBAR)) < 1e-4


def test_cat_like_state_is_negative():
    g = wigner_fock(fock_state(1))
    assert g.negativity_volume > 0.3


def test_fock_and_gaussian_agree():
    circuit = [gates.squeezing(0.3), gates.displacement(0.5 + 0.2j)]
    axis = default_axis(25)
    a = wigner_fock(apply_circuit(vacuum_state(1, 25), circuit, warn=False), 0, axis, axis)
    b = wigner_gaussian(g_circuit(gaussian_vacuum(1), circuit), 0, axis, axis)
    assert np.abs(a.values - b.values).max() < 1e-4


def test_p_axis_orientation():
    # displacement along p must move the peak along the row axis
    s = apply_gate(vacuum_state(1, 30), gates.displacement(1j))
    g = wigner_fock(s)
    j, i = np.unravel_index(np.argmax(g.values), g.values.shape)
    assert abs(g.p[j] - 2.0) < 0.2 and abs(g.x[i]) < 0.2


def test_reduced_state_of_entangled_pair():
    s = apply_circuit(
        vacuum_state(2, 12),
        [gates.squeezing(0.4, 0), gates.squeezing(-0.4, 1), gates.beamsplitter(np.pi / 4)],
        warn=False,
    )
    g = wigner(s, 1)
    assert abs(g.normalization - 1) < 5e-3
    # mixed reduced state: peak below the pure-state bound
    assert g.values.max() < g.bound * 0.95


def test_small_grid_rejected():
    s = apply_gate(vacuum_state(1, 20), gates.displacement(1.5), warn=False)
    with pytest.raises(GridTooSmallError):
        wigner_fock(s, 0, np.linspace(-1, 1, 41))


def test_coarse_grid_flagged():
    s = apply_gate(vacuum_state(1, 20), gates.squeezing(0.5))
    axis = default_axis(20, points=16)
    assert not marginal_check(wigner_fock(s, 0, axis, axis), s)[2]


def test_csv_roundtrip(tmp_path):
    g = wigner_fock(fock_state(1), 0, np.linspace(-5, 5, 21))
    g.to_csv(tmp_path / "w.csv", "config_hash=abc seed=0")
    first = (tmp_path / "w.csv").read_text().splitlines()[0]
    assert first == "# config_hash=abc seed=0"
    back = WignerGrid.from_csv(tmp_path / "w.csv")
    assert np.allclose(back.values, g.values, rtol=1e-9)
    assert np.allclose(back.x, g.x) and np.allclose(back.p, g.p)
    assert back.cutoff == 10
