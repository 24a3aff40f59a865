"""Acceptance criteria, one test per criterion.

Each test records a single PASS/FAIL line (printed in the terminal summary)
that includes the measured quantity and the wall time.  Stochastic criteria
use fixed seeds and sample the optimized circuit with FINAL_SHOTS draws; the
per-iteration shot counts are the stated ones.
"""

import time

import numpy as np
import pytest
from scipy.linalg import expm

from ccvqaoa import gates
from ccvqaoa.cma import cma_ask, cma_init, cma_tell, minimize
from ccvqaoa.encoding import (
    QUARTIC_DEFAULTS,
    ComplexQuadraticProblem,
    classical_oracle,
    constrained_quadratic,
    encode_complex_quadratic,
    encode_cv_baseline,
    encode_quartic_complex,
    quadratic_instance,
    styblinski_tang,
)
from ccvqaoa.fock import FockState, apply_circuit, expectation, quadrature_moments, vacuum_state
from ccvqaoa.gaussian import apply_circuit as g_circuit
from ccvqaoa.gaussian import gaussian_vacuum
from ccvqaoa.operators import (
    commutator,
    group_commutator_product,
    interior_block,
    monomial_matrix,
    number_operator,
    quadrature_operators,
    synthesize_x_power,
)
from ccvqaoa.qaoa import QaoaConfig, run
from ccvqaoa.wigner import marginal_check, wigner_fock, wigner_gaussian

FINAL_SHOTS = 1000
TEN_SEEDS = range(10)

slow = pytest.mark.slow


def _to_samples(z):
    s = np.empty(z.shape[:-1] + (2 * z.shape[-1],))
    s[..., 0::2] = z.real
    s[..., 1::2] = z.imag
    return s


# -- exact / analytic ---------------------------------------------------------


def test_criterion_01_truncated_commutator(criterion):
    t0 = time.perf_counter()
    hbar = 2.0
    worst = 0.0
    for D in range(2, 51):
        x, p = quadrature_operators(D, hbar)
        diag = np.ones(D)
        diag[-1] = 1 - D
        worst = max(worst, np.abs(commutator(x, p) - 1j * hbar * np.diag(diag)).max())
    dt = time.perf_counter() - t0
    criterion(1, worst < 1e-12 and dt < 1, f"max entry error {worst:.1e} over D=2..50 ({dt:.2f}s)")


def test_criterion_02_squeezed_vacuum_statistics(criterion):
    t0 = time.perf_counter()
    D = 40
    N = number_operator(D)
    worst_mean = worst_var = 0.0
    for r in (0.2, 0.5, 0.8):
        s = apply_circuit(vacuum_state(1, D), [gates.squeezing(r)], warn=False)
        mean = expectation(s, N)
        var = expectation(s, N @ N) - mean**2
        sh2 = np.sinh(r) ** 2
        worst_mean = max(worst_mean, abs(mean - sh2))
        worst_var = max(worst_var, abs(var - 2 * sh2 * (sh2 + 1)))
    dt = time.perf_counter() - t0
    ok = worst_mean < 1e-6 and worst_var < 1e-6 and dt < 5
    criterion(2, ok, f"|<N> err| {worst_mean:.1e}, |Var(N) err| {worst_var:.1e} at D=40 ({dt:.2f}s)")


def test_criterion_03_group_commutator_scaling(criterion):
    t0 = time.perf_counter()
    A, B = monomial_matrix(2, 0, 30), monomial_matrix(0, 2, 30)
    res = []
    for dt_ in (0.1, 0.05, 0.025):
        target = expm(-commutator(A, B) * dt_**2)
        res.append(np.linalg.norm(group_commutator_product(A, B, dt_) - target, 2))
    ratios = [res[0] / res[1], res[1] / res[2]]
    dt = time.perf_counter() - t0
    ok = all(6 <= r <= 10 for r in ratios) and dt < 10
    criterion(3, ok, f"residual ratios {ratios[0]:.2f}, {ratios[1]:.2f} ({dt:.2f}s)")


def test_criterion_04_power_synthesis(criterion):
    t0 = time.perf_counter()
    D = 40
    x, _ = quadrature_operators(D)
    errs = {}
    for m in (2, 3):
        k = D - 3 * (m + 1)
        diff = synthesize_x_power(m, D) - np.linalg.matrix_power(x, m + 1)
        errs[m + 1] = np.abs(interior_block(diff, k)).max()
    dt = time.perf_counter() - t0
    ok = max(errs.values()) < 1e-6 and dt < 5
    criterion(4, ok, f"interior error x^3 {errs[3]:.1e}, x^4 {errs[4]:.1e} ({dt:.2f}s)")


def _random_circuit(rng):
    n_modes = int(rng.integers(1, 3))
    circuit = []
    for _ in range(int(rng.integers(1, 5))):
        kinds = ["displacement", "squeezing", "rotation"] + (["beamsplitter", "cz", "cx"] if n_modes == 2 else [])
        kind = kinds[rng.integers(len(kinds))]
        m = int(rng.integers(n_modes))
        if kind == "displacement":
            circuit.append(gates.displacement(rng.uniform(0, 1.5) * np.exp(1j * rng.uniform(0, 2 * np.pi)), m))
        elif kind == "squeezing":
            circuit.append(gates.squeezing(rng.uniform(-0.6, 0.6), m, rng.uniform(0, 2 * np.pi)))
        elif kind == "rotation":
            circuit.append(gates.rotation(rng.uniform(-np.pi, np.pi), m))
        elif kind == "beamsplitter":
            circuit.append(gates.beamsplitter(rng.uniform(0, np.pi / 2), (0, 1), rng.uniform(0, 2 * np.pi)))
        elif kind == "cz":
            circuit.append(gates.controlled_phase(rng.uniform(-0.25, 0.25), (0, 1)))
        else:
            circuit.append(gates.controlled_x(rng.uniform(-0.25, 0.25), (0, 1)))
    return n_modes, circuit


def test_criterion_05_gaussian_fock_cross_validation(criterion):
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(50):
        n, circuit = _random_circuit(rng)
        g = g_circuit(gaussian_vacuum(n), circuit)
        f = apply_circuit(vacuum_state(n, 25), circuit, warn=False)
        mean, cov = quadrature_moments(f)
        worst = max(worst, np.abs(mean - g.mean).max(), np.abs(cov - g.cov).max())
    dt = time.perf_counter() - t0
    criterion(5, worst < 1e-3 and dt < 60, f"max moment gap {worst:.1e} over 50 circuits at D=25 ({dt:.1f}s)")


def test_criterion_06_wigner_suite(criterion):
    t0 = time.perf_counter()
    states = {
        "vacuum": [],
        "squeezed": [gates.squeezing(0.5)],
        "displaced": [gates.displacement(0.8 - 0.4j)],
    }
    worst_norm = worst_bound = worst_marg = 0.0
    for circuit in states.values():
        fs = apply_circuit(vacuum_state(1, 30), circuit, warn=False)
        gs = g_circuit(gaussian_vacuum(1), circuit)
        for grid, state in ((wigner_fock(fs), fs), (wigner_gaussian(gs, cutoff=30), gs)):
            worst_norm = max(worst_norm, abs(grid.normalization - 1))
            worst_bound = max(worst_bound, np.abs(grid.values).max() - grid.bound)
            xe, pe, _ = marginal_check(grid, state)
            worst_marg = max(worst_marg, xe, pe)
    amps = np.zeros(10, complex)
    amps[1] = 1
    one = wigner_fock(FockState(1, 10, amps), 0, np.array([-1.0, 0.0, 1.0]), check_mass=False)
    w00 = one.values[1, 1]
    photon_err = abs(w00 + 1 / (np.pi * 2.0))
    dt = time.perf_counter() - t0
    ok = worst_norm < 5e-3 and worst_bound <= 1e-6 and worst_marg < 1e-3 and photon_err < 1e-4 and dt < 30
    criterion(
        6,
        ok,
        f"norm err {worst_norm:.1e}, bound excess {worst_bound:.1e}, marginal err {worst_marg:.1e}, "
        f"W_1(0,0) err {photon_err:.1e} ({dt:.1f}s)",
    )


def test_criterion_07_encoding_correctness(criterion):
    t0 = time.perf_counter()
    rng = np.random.default_rng(7)
    eval_err = min_gap = closed_gap = 0.0
    for i in range(100):
        n = 1 + i % 2
        M = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        prob = ComplexQuadraticProblem(M @ M.conj().T + 0.2 * np.eye(n), rng.normal(size=n) + 1j * rng.normal(size=n))
        ccv, base = encode_complex_quadratic(prob), encode_cv_baseline(prob)
        z = rng.normal(size=(100, n)) * 3 + 1j * rng.normal(size=(100, n)) * 3
        eval_err = max(eval_err, np.abs(ccv.cost.evaluate(_to_samples(z)) - prob.objective(z)).max())
        a = classical_oracle(ccv, budget=2000, n_refine=1).value
        b = classical_oracle(base, budget=2000, n_refine=1).value
        min_gap = max(min_gap, abs(a - b))
        closed = -0.25 * np.real(prob.c.conj() @ np.linalg.solve(prob.A, prob.c))
        closed_gap = max(closed_gap, abs(a - closed))
    dt = time.perf_counter() - t0
    ok = eval_err < 1e-9 and min_gap < 1e-6 and closed_gap < 1e-6 and dt < 30
    criterion(
        7,
        ok,
        f"evaluation err {eval_err:.1e}, CCV/baseline minimum gap {min_gap:.1e}, "
        f"gap to closed form {closed_gap:.1e} ({dt:.1f}s)",
    )


def _cma_means(f, x0, seed, gens=20):
    st = cma_init(x0, 0.5)
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(gens):
        X = cma_ask(st, rng)
        st = cma_tell(st, X, [f(x) for x in X])
        out.append((st.mean.copy(), st.sigma, st.cov.copy()))
    return out


def test_criterion_08_cma_sanity(criterion):
    t0 = time.perf_counter()

    def sphere(x):
        return float(np.sum(np.asarray(x) ** 2))

    res = minimize(sphere, 3 * np.ones(4), 1.0, max_generations=200, seed=0, ftarget=1e-6)
    rank_ok = trans_ok = True
    shift = np.array([2.0, -1.0, 0.5, 3.0])
    x0 = np.array([1.0, -2.0, 0.3, 0.7])
    for seed in range(5):
        a = _cma_means(sphere, x0, seed)
        b = _cma_means(lambda x: np.exp(sphere(x)) - 3.0, x0, seed)
        rank_ok &= all(np.array_equal(u[0], v[0]) and u[1] == v[1] and np.array_equal(u[2], v[2]) for u, v in zip(a, b))
        c = _cma_means(lambda x: sphere(np.asarray(x) - shift), x0 + shift, seed)
        trans_ok &= all(np.allclose(w[0] - shift, u[0], rtol=0, atol=1e-9) and np.isclose(w[1], u[1], rtol=1e-12) for u, w in zip(a, c))
    dt = time.perf_counter() - t0
    ok = res.f_best < 1e-6 and res.generations <= 200 and rank_ok and trans_ok and dt < 10
    criterion(
        8,
        ok,
        f"sphere {res.f_best:.1e} after {res.generations} generations, rank-invariant {rank_ok}, "
        f"translation-invariant {trans_ok} ({dt:.1f}s)",
    )


# -- stochastic reproduction ------------------------------------------------------


@slow
def test_criterion_09_quadratic_n1(criterion):
    t0 = time.perf_counter()
    enc = encode_complex_quadratic(quadratic_instance(1))
    best, succ = [], []
    for seed in TEN_SEEDS:
        cfg = QaoaConfig(depth=2, shots=50, squeeze=0.6, max_iters=100, seed=seed, final_shots=FINAL_SHOTS)
        res = run(enc, cfg, f_star=-8.0)
        best.append(res.best_cost)
        succ.append(res.success_probability)
    dt = time.perf_counter() - t0
    mb, ms = float(np.median(best)), float(np.median(succ))
    ok = -8.0 <= mb <= -7.8 and ms >= 0.9 and dt < 120
    criterion(9, ok, f"median best cost {mb:.4f} (band [-8.00, -7.80]), median success {ms:.3f} (need >= 0.9) ({dt:.0f}s)")


@slow
def test_criterion_10_quadratic_n3(criterion):
    t0 = time.perf_counter()
    enc = encode_complex_quadratic(quadratic_instance(3))
    best = []
    for seed in TEN_SEEDS:
        cfg = QaoaConfig(depth=6, shots=50, squeeze=0.6, max_iters=250, seed=seed, final_shots=FINAL_SHOTS)
        best.append(run(enc, cfg, f_star=-24.0).best_cost)
    dt = time.perf_counter() - t0
    mb = float(np.median(best))
    criterion(10, mb <= -23.0 and dt < 600, f"median best cost {mb:.4f} (need <= -23.0) ({dt:.0f}s)")


@slow
def test_criterion_11_cutoff_trend(criterion):
    t0 = time.perf_counter()
    enc = encode_complex_quadratic(quadratic_instance(1))
    med = {}
    for D in (2, 5, 15):
        best = []
        for seed in range(5):
            cfg = QaoaConfig(
                depth=2, shots=50, squeeze=0.6, backend="fock", cutoff=D, max_iters=100, seed=seed, final_shots=FINAL_SHOTS
            )
            best.append(run(enc, cfg, f_star=-8.0).best_cost)
        med[D] = float(np.median(best))
    dt = time.perf_counter() - t0
    ok = abs(med[15] + 8) < abs(med[2] + 8) and all(-8.0 <= v <= -7.5 for v in med.values()) and dt < 1800
    detail = ", ".join(f"D={D}: {v:.4f}" for D, v in med.items())
    criterion(11, ok, f"median best cost {detail} ({dt:.0f}s)")


@slow
def test_criterion_12_encoding_comparison(criterion):
    t0 = time.perf_counter()

    def cfg(seed):
        return QaoaConfig(
            depth=1, shots=15, squeeze=0.2, backend="fock", cutoff=6, max_iters=100, seed=seed, final_shots=FINAL_SHOTS
        )

    p1 = quadratic_instance(1)
    ccv1, base1 = encode_complex_quadratic(p1), encode_cv_baseline(p1)
    c_best = [run(ccv1, cfg(s), f_star=-8.0).best_cost for s in range(5)]
    b_best = [run(base1, cfg(s), f_star=-8.0).best_cost for s in range(5)]
    p2 = quadratic_instance(2)
    ccv2, base2 = encode_complex_quadratic(p2), encode_cv_baseline(p2)
    c_time, b_time = [], []
    for s in range(5):
        c_time.append(run(ccv2, cfg(s), f_star=-16.0).wall_time)
        b_time.append(run(base2, cfg(s), f_star=-16.0).wall_time)
    dt = time.perf_counter() - t0
    mc, mbb = float(np.median(c_best)), float(np.median(b_best))
    tc, tb = float(np.median(c_time)), float(np.median(b_time))
    ok = mc <= -7.6 and mbb <= -7.6 and tc < tb and dt < 1200
    criterion(
        12,
        ok,
        f"n=1 median best CCV {mc:.4f} / baseline {mbb:.4f}; n=2 median wall time CCV {tc:.2f}s vs baseline {tb:.2f}s; "
        f"Fock dims n=2: CCV 6^2={6**2}, baseline 6^4={6**4} ({dt:.0f}s)",
    )


@slow
def test_criterion_13_styblinski_tang(criterion):
    t0 = time.perf_counter()
    enc = styblinski_tang(2)
    oracle = classical_oracle(enc)
    best = []
    for seed in range(3):
        cfg = QaoaConfig(
            depth=2, shots=15, squeeze=0.3, backend="fock", cutoff=14, max_iters=100, seed=seed, final_shots=FINAL_SHOTS
        )
        best.append(run(enc, cfg, f_star=oracle.value).best_cost)
    dt = time.perf_counter() - t0
    b = min(best)
    ok = b <= -74.0 and abs(oracle.value + 78.332) < 1e-3 and dt < 1800
    criterion(13, ok, f"best-of-3 sampled cost {b:.4f} (need <= -74.0), oracle {oracle.value:.4f} ({dt:.0f}s)")


@slow
def test_criterion_14_complex_quartic(criterion):
    t0 = time.perf_counter()
    enc = encode_quartic_complex(**QUARTIC_DEFAULTS)
    f_star = classical_oracle(enc).value
    best, neg = [], []
    for seed in range(3):
        cfg = QaoaConfig(
            depth=2, shots=20, squeeze=1.0, backend="fock", cutoff=10, max_iters=30, kerr=0.05, seed=seed, final_shots=FINAL_SHOTS
        )
        res = run(enc, cfg, f_star=f_star)
        best.append(res.best_cost)
        neg.append(wigner_fock(res.state, 0).negativity_volume)
    dt = time.perf_counter() - t0
    mb = float(np.median(best))
    rel = abs(mb - f_star) / abs(f_star)
    ok = rel <= 0.05 and min(neg) > 0.01 and dt < 1200
    criterion(
        14,
        ok,
        f"oracle {f_star:.4f}, median best {mb:.4f} (rel gap {rel:.2%}), min negativity volume {min(neg):.3f} ({dt:.0f}s)",
    )


@slow
def test_criterion_15_constrained_pipeline(criterion):
    t0 = time.perf_counter()
    lam = 10.0
    enc = constrained_quadratic(lam)
    f_star = classical_oracle(enc).value
    best = []
    for seed in range(3):
        cfg = QaoaConfig(depth=6, shots=50, squeeze=0.2, max_iters=300, seed=seed, final_shots=FINAL_SHOTS)
        best.append(run(enc, cfg, f_star=f_star).best_cost)
    dt = time.perf_counter() - t0
    mb = float(np.median(best))
    rel = abs(mb - f_star) / abs(f_star)
    criterion(15, rel <= 0.05 and dt < 600, f"lambda={lam}: oracle {f_star:.4f}, median best {mb:.4f} (rel gap {rel:.2%}) ({dt:.0f}s)")
