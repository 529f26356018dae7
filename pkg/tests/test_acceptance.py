"""Acceptance suite: one test per release criterion, at its stated tolerance.

Each test prints a PASS line with the measured figure so a plain
``pytest -s tests/test_acceptance.py`` doubles as the acceptance report.
"""

import time

import numpy as np
import pytest

from waveop import (
    EvolutionSpec,
    build_basis,
    build_superoperator,
    exact_trajectory,
    expectation,
    from_coherence,
    gauge_transform,
    init_wave_operator,
    interference_expectation,
    interference_observable,
    is_conserved,
    map_observable,
    propagate_exact,
    propagate_lindblad,
    purity,
    step_integrate,
    to_coherence,
)
from waveop.runner import compare_models
from waveop.twolevel import TwoLevelParams, analytic_wave_operator, initial_state, two_level_spec

from conftest import SX, SY, SZ, random_hermitian, random_matrix, random_state, random_unitary
from test_scenario_cli import read_csv, shipped

BASIS2 = build_basis(2)

# trajectories exercised here are pooled for the positivity criterion
_TRAJECTORIES = []


def _record(traj, wave=True):
    _TRAJECTORIES.append((traj, wave))
    return traj


def test_c01_purity_law_exact_propagator():
    lam, eta = 0.25, np.pi / 2
    p = TwoLevelParams(omega=1.0, lam=lam, eta=eta)
    sop = build_superoperator(two_level_spec(p), BASIS2)
    times = np.linspace(0.0, 20.0 / lam, 2000)
    t0 = time.perf_counter()
    traj = _record(exact_trajectory(sop, init_wave_operator(initial_state(eta)), times))
    purities = np.array([purity(s) for s in traj.states])
    elapsed = time.perf_counter() - t0
    dev = float(np.max(np.abs(purities - (0.5 + 0.5 * np.cos(2 * lam * times) ** 2))))
    assert dev < 1e-9
    assert elapsed < 1.0
    print(f"\nPASS 01 purity-law: max deviation {dev:.3e} < 1e-9, runtime {elapsed:.3f}s < 1s")


def test_c02_coupling_block_reproduction(rng):
    worst = 0.0
    for _ in range(50):
        alpha, beta, lam = rng.normal(size=3)
        sop = build_superoperator(
            two_level_spec(TwoLevelParams(omega=1.0, alpha=alpha, beta=beta, lam=lam)), BASIS2
        )
        oracle = np.array(
            [
                [lam, 1j * beta, -1j * alpha, 0.0],
                [-1j * beta, -lam, 0.0, alpha],
                [1j * alpha, 0.0, -lam, beta],
                [0.0, alpha, beta, lam],
            ],
            dtype=complex,
        )
        worst = max(worst, float(np.max(np.abs(sop.delta_part - oracle))))
    assert worst < 1e-13
    print(f"\nPASS 02 coupling-block: 50 random triples, worst entry error {worst:.3e} < 1e-13")


def test_c03_interference_formula(rng):
    worst = 0.0
    for _ in range(100):
        p = TwoLevelParams(
            omega=float(rng.uniform(0.1, 3.0)),
            lam=float(rng.uniform(-1.5, 1.5)),
            eta=float(rng.uniform(0.0, np.pi)),
            theta=float(rng.uniform(-np.pi, np.pi)),
        )
        t = float(rng.uniform(0.0, 15.0))
        via_trace = expectation(interference_observable(p.theta), analytic_wave_operator(p, t))
        worst = max(worst, abs(via_trace - interference_expectation(p, t)))
    assert worst < 1e-10
    print(f"\nPASS 03 interference-formula: 100 random tuples, worst |trace - closed| {worst:.3e} < 1e-10")


def test_c04_generalized_unitarity(rng):
    worst_herm = 0.0
    worst_drift = 0.0
    for i in range(100):
        n = (2, 3, 4)[i % 3]
        basis = build_basis(n)
        spec = EvolutionSpec(
            hamiltonian=random_hermitian(rng, n, scale=0.5),
            left_term=random_hermitian(rng, n, scale=0.5),
            right_term=random_hermitian(rng, n, scale=0.5),
            couplings=tuple(
                (float(rng.normal()), random_hermitian(rng, n, scale=0.5), random_hermitian(rng, n, scale=0.5))
                for _ in range(int(rng.integers(0, 3)))
            ),
        )
        sop = build_superoperator(spec, basis)
        worst_herm = max(worst_herm, float(np.max(np.abs(sop.matrix - sop.matrix.conj().T))))
        eig = sop.eigensystem()
        period = 2 * np.pi / max(1e-12, float(np.max(np.abs(eig.values))))
        v0 = to_coherence(init_wave_operator(random_state(rng, n)), basis)
        n0 = float(np.vdot(v0, v0).real)
        for frac in (1.0, 37.5, 1000.0):
            vt = propagate_exact(sop, v0, frac * period)
            worst_drift = max(worst_drift, abs(float(np.vdot(vt, vt).real) - n0))
    assert worst_herm < 1e-12
    assert worst_drift < 1e-9
    print(
        f"\nPASS 04 generalized-unitarity: 100 specs, hermiticity {worst_herm:.3e} < 1e-12, "
        f"norm drift over 1e3 periods {worst_drift:.3e} < 1e-9"
    )


def test_c05_positivity(rng):
    # add a stepping run and a comparator run to the pool before scanning it
    spec = two_level_spec(TwoLevelParams(omega=1.0, alpha=0.3, beta=0.4, lam=0.6))
    _record(step_integrate(spec, init_wave_operator(initial_state(0.8)), np.linspace(0, 10, 101)))
    from waveop import dephasing_lindblad_spec

    _record(
        propagate_lindblad(
            dephasing_lindblad_spec(1.0, 0.2),
            init_wave_operator(initial_state(np.pi / 2)),
            np.linspace(0, 10, 101),
        ),
        wave=False,
    )
    assert _TRAJECTORIES, "positivity pool must not be empty"
    worst = 0.0
    for traj, wave in _TRAJECTORIES:
        for state in traj.states:
            rho = state @ state.conj().T if wave else 0.5 * (state + state.conj().T)
            worst = min(worst, float(np.linalg.eigvalsh(rho).min()))
    assert worst >= -1e-12
    print(f"\nPASS 05 positivity: min density eigenvalue over {len(_TRAJECTORIES)} trajectories {worst:.3e} >= -1e-12")


def test_c06_mapped_spin_algebra():
    eps = np.zeros((3, 3, 3))
    eps[0, 1, 2] = eps[1, 2, 0] = eps[2, 0, 1] = 1.0
    eps[0, 2, 1] = eps[2, 1, 0] = eps[1, 0, 2] = -1.0
    s = [map_observable(0.5 * sig, BASIS2).matrix for sig in (SX, SY, SZ)]
    worst = 0.0
    for i in range(3):
        for j in range(3):
            want = sum(1j * eps[i, j, k] * s[k] for k in range(3))
            worst = max(worst, float(np.max(np.abs(s[i] @ s[j] - s[j] @ s[i] - want))))
        np.testing.assert_allclose(np.linalg.eigvalsh(s[i]), [-0.5, -0.5, 0.5, 0.5], atol=1e-12)
    assert worst < 1e-12
    print(f"\nPASS 06 mapped-spin-algebra: commutator residual {worst:.3e} < 1e-12, spectra (+1/2 x2, -1/2 x2)")


def test_c07_spin_z_conservation(rng):
    mapped = map_observable(0.5 * SZ, BASIS2)
    worst_comm = 0.0
    worst_exp = 0.0
    for _ in range(50):
        alpha, beta, lam = rng.normal(size=3)
        p = TwoLevelParams(omega=1.0, alpha=alpha, beta=beta, lam=lam, eta=float(rng.uniform(0, np.pi)))
        sop = build_superoperator(two_level_spec(p), BASIS2)
        chk = is_conserved(mapped, sop, 1e-12)
        assert chk.conserved
        worst_comm = max(worst_comm, chk.residual)
        traj = exact_trajectory(sop, init_wave_operator(initial_state(p.eta)), np.linspace(0, 20, 21))
        vals = [expectation(0.5 * SZ, s) for s in traj.states]
        worst_exp = max(worst_exp, max(abs(v - vals[0]) for v in vals))
    assert worst_comm < 1e-12
    assert worst_exp < 1e-9
    print(
        f"\nPASS 07 conservation: 50 coupling triples, commutator {worst_comm:.3e} < 1e-12, "
        f"expectation drift {worst_exp:.3e} < 1e-9"
    )


def test_c08_gauge_invariance(rng):
    worst = 0.0
    for _ in range(100):
        rho_hat = random_matrix(rng, 2)
        u = random_unitary(rng, 2)
        a = random_hermitian(rng, 2)
        worst = max(worst, abs(expectation(a, gauge_transform(rho_hat, u)) - expectation(a, rho_hat)))
    assert worst < 1e-12
    print(f"\nPASS 08 gauge-invariance: 100 random triples, worst expectation shift {worst:.3e} < 1e-12")


def test_c09_integrator_order(rng):
    ratios = []
    for _ in range(10):
        spec = EvolutionSpec(
            hamiltonian=random_hermitian(rng, 2),
            couplings=((float(rng.normal()), random_hermitian(rng, 2), random_hermitian(rng, 2)),),
        )
        sop = build_superoperator(spec, BASIS2)
        rho_hat0 = init_wave_operator(random_state(rng, 2))
        t_end = 4.0
        exact = from_coherence(propagate_exact(sop, to_coherence(rho_hat0, BASIS2), t_end), BASIS2)
        errs = [
            float(np.max(np.abs(step_integrate(spec, rho_hat0, np.array([0.0, t_end]), dt=dt).states[-1] - exact)))
            for dt in (t_end / 80, t_end / 160)
        ]
        ratios.append(errs[0] / errs[1])
    assert all(12.0 <= r <= 20.0 for r in ratios)
    print(f"\nPASS 09 integrator-order: dt-halving ratios {min(ratios):.1f}..{max(ratios):.1f} all in [12, 20]")


def test_c10_comparator_contrast_slopes(tmp_path):
    report = compare_models(shipped("dephasing-compare"), out_dir=str(tmp_path))
    trace_check = next(c for c in report.checks if c.name == "trace_conservation")
    assert trace_check.residual < 1e-9
    header, data = read_csv(tmp_path / "dephasing-compare_compare.csv")
    t = data[:, header.index("t")]
    lam = 0.05
    mask = (lam * t >= 1e-3) & (lam * t <= 1e-1)

    def fitted_slope(deficit):
        lx = np.log(t[mask])
        ly = np.log(deficit[mask])
        design = np.vstack([lx, np.ones_like(lx)]).T
        slope, _ = np.linalg.lstsq(design, ly, rcond=None)[0]
        return float(slope)

    wave_slope = fitted_slope(1.0 - 2.0 * data[:, header.index("waveop_offdiag_abs")])
    lind_slope = fitted_slope(1.0 - 2.0 * data[:, header.index("lindblad_offdiag_abs")])
    assert abs(wave_slope - 2.0) < 0.1
    assert abs(lind_slope - 1.0) < 0.1
    print(
        f"\nPASS 10 comparator-contrast: log-log deficit slopes wave {wave_slope:.3f} (2.0 +- 0.1), "
        f"comparator {lind_slope:.3f} (1.0 +- 0.1), trace drift {trace_check.residual:.3e} < 1e-9"
    )


def test_c11_density_equation_consistency(rng):
    spec = EvolutionSpec(
        hamiltonian=random_hermitian(rng, 2),
        left_term=random_hermitian(rng, 2),
        couplings=((0.8, random_hermitian(rng, 2), random_hermitian(rng, 2)),),
    )

    def rhs_density(rhat):
        heff = spec.hamiltonian + spec.left_term
        rho = rhat @ rhat.conj().T
        out = heff @ rho - rho @ heff
        for g, k, kp in spec.couplings:
            term = g * (k @ rhat @ kp @ rhat.conj().T)
            out += term - term.conj().T
        return -1j * out

    rho_hat0 = init_wave_operator(random_state(rng, 2))
    errors = []
    deltas = (0.04, 0.02, 0.01)
    for delta in deltas:
        grid = np.arange(0.0, 1.0 + 1e-12, delta)
        traj = step_integrate(spec, rho_hat0, grid, dt=delta / 32)
        rhos = np.array([s @ s.conj().T for s in traj.states])
        fd = (rhos[2:] - rhos[:-2]) / (2 * delta)
        rhs = np.array([rhs_density(traj.states[k]) for k in range(1, len(traj) - 1)])
        errors.append(float(np.max(np.abs(fd - rhs))))
    orders = [np.log2(errors[i] / errors[i + 1]) for i in range(len(errors) - 1)]
    assert all(abs(o - 2.0) < 0.2 for o in orders)
    print(f"\nPASS 11 density-equation: finite-difference orders {', '.join(f'{o:.2f}' for o in orders)} all 2.0 +- 0.2")
