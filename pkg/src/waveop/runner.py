"""Scenario execution: time-series tables, invariant reports, model comparison.

Output tables are CSV with a header row and 17-significant-digit floats, so
identical scenario files (and seed) reproduce byte-identical files.  Files
are written atomically (temp file + rename) per scenario.
"""

from __future__ import annotations

import os
import time
from dataclasses import dataclass, field

import numpy as np

from .basis import build_basis
from .dynamics import (
    EvolutionSpec,
    Trajectory,
    build_superoperator,
    exact_trajectory,
    gauge_transform,
    init_wave_operator,
    propagate_exact,
    propagate_lindblad,
    step_integrate,
)
from .linalg import hermiticity_defect, max_abs
from .observables import (
    degeneracy_complement,
    expectation,
    is_conserved,
    map_observable,
    map_observable_unchecked,
    purity,
    purity_of_density,
)
from .scenario import Scenario, ScenarioError, load_scenario
from .twolevel import SIGMA_X, SIGMA_Y, SIGMA_Z

OUT_DIR_ENV = "WAVEOP_OUT_DIR"


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    residual: float
    tolerance: float


@dataclass
class RunReport:
    scenario: str
    checks: list[CheckResult] = field(default_factory=list)
    outputs: list[str] = field(default_factory=list)
    duration_s: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name: str, residual: float, tolerance: float) -> None:
        if any(c.name == name for c in self.checks):
            raise ValueError(f"duplicate invariant {name!r} in report")
        self.checks.append(
            CheckResult(name=name, passed=residual <= tolerance, residual=float(residual), tolerance=float(tolerance))
        )

    def lines(self) -> list[str]:
        out = []
        for c in self.checks:
            status = "PASS" if c.passed else "FAIL"
            out.append(f"{status} {c.name}: residual {c.residual:.3e} (tolerance {c.tolerance:.3e})")
        return out


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def write_table(path, header: list[str], rows) -> None:
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(x) for x in row) + "\n")
    os.replace(tmp, path)


def resolve_out_dir(out_dir=None) -> str:
    out = out_dir or os.environ.get(OUT_DIR_ENV) or "."
    os.makedirs(out, exist_ok=True)
    return out


def _wave_trajectory(sc: Scenario, integrator=None, dt=None) -> tuple[Trajectory, object]:
    superop = build_superoperator(sc.wave_spec, sc.basis)
    rho_hat0 = init_wave_operator(sc.psi0)
    which = integrator or sc.integrator
    if which == "exact":
        traj = exact_trajectory(superop, rho_hat0, sc.times)
    else:
        traj = step_integrate(sc.wave_spec, rho_hat0, sc.times, dt=dt if dt is not None else sc.dt)
    return traj, superop


def _lindblad_trajectory(sc: Scenario, dt=None) -> Trajectory:
    rho0 = init_wave_operator(sc.psi0)  # pure initial density matrix |psi><psi|
    return propagate_lindblad(sc.lindblad_spec, rho0, sc.times, dt=dt if dt is not None else sc.dt)


def _timeseries_rows(sc: Scenario, traj: Trajectory, wave: bool):
    n = sc.dim
    header = ["t"]
    header += [obs.name for obs in sc.observables]
    header += ["purity", "inner_norm"]
    for i in range(n):
        for j in range(n):
            header += [f"rho_re_{i}_{j}", f"rho_im_{i}_{j}"]
    rows = []
    for k, t in enumerate(traj.times):
        state = traj.states[k]
        if wave:
            rho = state @ state.conj().T
            inorm = float(np.real(np.vdot(state, state)))
            pur = purity(state)
            vals = [expectation(obs.matrix, state) for obs in sc.observables]
        else:
            rho = state
            tr = float(np.real(np.trace(rho)))
            inorm = tr
            pur = purity_of_density(rho)
            vals = [float(np.real(np.trace(obs.matrix @ rho))) / tr for obs in sc.observables]
        row = [float(t), *vals, pur, inorm]
        for i in range(n):
            for j in range(n):
                row += [float(rho[i, j].real), float(rho[i, j].imag)]
        rows.append(row)
    return header, rows


def _basic_wave_checks(report: RunReport, superop, traj: Trajectory, tol: dict) -> None:
    report.add("superop_hermiticity", hermiticity_defect(superop.matrix), tol["superop_hermiticity"])
    norms = np.array([float(np.real(np.vdot(s, s))) for s in traj.states])
    report.add("inner_conservation", float(np.max(np.abs(norms - norms[0]))), tol["inner_conservation"])
    min_eig = min(float(np.linalg.eigvalsh(s @ s.conj().T).min()) for s in traj.states)
    report.add("positivity", max(0.0, -min_eig), tol["positivity"])


def _basic_lindblad_checks(report: RunReport, traj: Trajectory, tol: dict) -> None:
    traces = np.array([float(np.real(np.trace(s))) for s in traj.states])
    report.add("trace_conservation", float(np.max(np.abs(traces - traces[0]))), tol["trace_conservation"])
    herm = max(hermiticity_defect(s) for s in traj.states)
    report.add("hermiticity_preservation", herm, tol["hermiticity_preservation"])
    min_eig = min(float(np.linalg.eigvalsh(0.5 * (s + s.conj().T)).min()) for s in traj.states)
    report.add("lindblad_positivity", max(0.0, -min_eig), tol["positivity"])


def _scaled(tolerances: dict, scale: float) -> dict:
    return {k: v * scale for k, v in tolerances.items()}


def run_scenario(config_path, out_dir=None, seed: int = 0, tolerance_scale: float = 1.0,
                 integrator=None, dt=None) -> RunReport:
    """Run a scenario and write its time-series table(s) plus a report file."""
    t_begin = time.perf_counter()
    sc = load_scenario(config_path)
    out = resolve_out_dir(out_dir)
    tol = _scaled(sc.tolerances, tolerance_scale)
    report = RunReport(scenario=sc.name)

    if sc.model in ("wave_operator", "both"):
        traj, superop = _wave_trajectory(sc, integrator=integrator, dt=dt)
        header, rows = _timeseries_rows(sc, traj, wave=True)
        suffix = "_wave" if sc.model == "both" else ""
        path = os.path.join(out, f"{sc.name}{suffix}.csv")
        write_table(path, header, rows)
        report.outputs.append(path)
        _basic_wave_checks(report, superop, traj, tol)
    if sc.model in ("lindblad", "both"):
        traj = _lindblad_trajectory(sc, dt=dt)
        header, rows = _timeseries_rows(sc, traj, wave=False)
        suffix = "_lindblad" if sc.model == "both" else ""
        path = os.path.join(out, f"{sc.name}{suffix}.csv")
        write_table(path, header, rows)
        report.outputs.append(path)
        _basic_lindblad_checks(report, traj, tol)

    report.duration_s = time.perf_counter() - t_begin
    _write_report(report, out)
    return report


def _write_report(report: RunReport, out: str) -> None:
    import json

    path = os.path.join(out, f"{report.scenario}_report.json")
    payload = {
        "scenario": report.scenario,
        "passed": report.passed,
        "checks": [
            {"name": c.name, "passed": c.passed, "residual": c.residual, "tolerance": c.tolerance}
            for c in report.checks
        ],
        "outputs": report.outputs,
        "duration_s": report.duration_s,
    }
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
    os.replace(tmp, path)
    report.outputs.append(path)


def _random_hermitian(rng, n: int) -> np.ndarray:
    m = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return m + m.conj().T


def _random_unitary(rng, n: int) -> np.ndarray:
    m = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(m)
    return q * (np.diagonal(r) / np.abs(np.diagonal(r)))


def _random_spec(rng, n: int) -> EvolutionSpec:
    n_coup = int(rng.integers(0, 3))
    couplings = tuple(
        (float(rng.normal()), _random_hermitian(rng, n), _random_hermitian(rng, n))
        for _ in range(n_coup)
    )
    return EvolutionSpec(
        hamiltonian=_random_hermitian(rng, n),
        left_term=_random_hermitian(rng, n),
        right_term=_random_hermitian(rng, n),
        couplings=couplings,
    )


def check_invariants(config_path, out_dir=None, seed: int = 0, tolerance_scale: float = 1.0,
                     integrator=None, dt=None) -> RunReport:
    """Run the full invariant battery for a scenario.

    Covers generator hermiticity, conservation of the extended norm (or of
    the comparator trace), positivity, gauge invariance of expectation
    values, preservation of commutators under the observable lift, spectrum
    degeneracy with its splitting complement, and an optional seeded fuzz
    sweep over random specs.
    """
    t_begin = time.perf_counter()
    sc = load_scenario(config_path)
    out = resolve_out_dir(out_dir)
    tol = _scaled(sc.tolerances, tolerance_scale)
    rng = np.random.default_rng(seed)
    report = RunReport(scenario=sc.name)

    wave_traj = None
    if sc.model in ("wave_operator", "both"):
        wave_traj, superop = _wave_trajectory(sc, integrator=integrator, dt=dt)
        _basic_wave_checks(report, superop, wave_traj, tol)

        # gauge invariance: random unitary and observable, sampled states
        worst = 0.0
        sample = wave_traj.states[:: max(1, len(wave_traj) // 5)]
        for state in sample:
            u = _random_unitary(rng, sc.dim)
            a = _random_hermitian(rng, sc.dim)
            worst = max(worst, abs(expectation(a, gauge_transform(state, u)) - expectation(a, state)))
        report.add("gauge_invariance", worst, tol["gauge_invariance"])

        # lift preserves products, hence commutators
        worst = 0.0
        for _ in range(8):
            a = _random_hermitian(rng, sc.dim)
            b = _random_hermitian(rng, sc.dim)
            ma = map_observable(a, sc.basis).matrix
            mb = map_observable(b, sc.basis).matrix
            lifted_comm = map_observable_unchecked(a @ b - b @ a, sc.basis)
            worst = max(worst, max_abs((ma @ mb - mb @ ma) - lifted_comm))
        scale_ab = max(1.0, max_abs(sc.wave_spec.hamiltonian))
        report.add("commutation", worst / scale_ab, tol["commutation"])

        # lifted spectrum: every Hamiltonian eigenvalue N-fold degenerate
        mapped_h = map_observable(sc.wave_spec.hamiltonian, sc.basis)
        lifted = np.sort(np.linalg.eigvalsh(mapped_h.matrix))
        expected = np.sort(np.repeat(np.linalg.eigvalsh(sc.wave_spec.hamiltonian), sc.dim))
        degen_resid = float(np.max(np.abs(lifted - expected))) / scale_ab
        comp = degeneracy_complement(mapped_h)
        comm_resid = max((max_abs(c @ mapped_h.matrix - mapped_h.matrix @ c) for c in comp), default=0.0)
        report.add("degeneracy", max(degen_resid, comm_resid / scale_ab), tol["degeneracy"])

        # conserved lifted observables must have constant expectations
        chk = is_conserved(mapped_h, superop, tol["commutation"])
        if chk.conserved and wave_traj is not None:
            vals = [expectation(sc.wave_spec.hamiltonian, s) for s in wave_traj.states]
            report.add("conserved_expectation", float(np.max(np.abs(np.array(vals) - vals[0]))),
                       tol["inner_conservation"])

    if sc.model in ("lindblad", "both"):
        traj = _lindblad_trajectory(sc, dt=dt)
        _basic_lindblad_checks(report, traj, tol)

    if sc.fuzz:
        worst_herm = 0.0
        worst_drift = 0.0
        for _ in range(sc.fuzz["count"]):
            n = int(rng.choice(sc.fuzz["dims"]))
            spec = _random_spec(rng, n)
            fb = build_basis(n)
            sop = build_superoperator(spec, fb)
            worst_herm = max(worst_herm, hermiticity_defect(sop.matrix))
            eig = sop.eigensystem()
            scale = max(1.0, float(np.max(np.abs(eig.values))))
            v0 = rng.normal(size=n**2) + 1j * rng.normal(size=n**2)
            v0 /= np.linalg.norm(v0)
            for t in (0.1 / scale, 3.0 / scale, 100.0 / scale):
                vt = propagate_exact(sop, v0, t)
                worst_drift = max(worst_drift, abs(float(np.real(np.vdot(vt, vt))) - 1.0))
        report.add("fuzz_superop_hermiticity", worst_herm, tol["superop_hermiticity"] * 10)
        report.add("fuzz_inner_conservation", worst_drift, tol["inner_conservation"])

    report.duration_s = time.perf_counter() - t_begin
    _write_report(report, out)
    return report


def _extract_matched_lambdas(sc: Scenario) -> tuple[float, float]:
    if sc.dim != 2:
        raise ScenarioError("compare: matched dephasing comparison requires dim = 2")
    spec = sc.wave_spec
    if len(spec.couplings) != 1:
        raise ScenarioError("compare: wave side must have exactly one coupling")
    g, k, kp = spec.couplings[0]
    if max_abs(k - SIGMA_Z) > 1e-12:
        raise ScenarioError("compare: wave coupling operator K must be sigma_z")
    if abs(np.trace(SIGMA_X @ kp)) > 1e-12 or abs(np.trace(SIGMA_Y @ kp)) > 1e-12:
        raise ScenarioError("compare: wave coupling K' must be diagonal (pure dephasing)")
    lam_wave = g * 0.5 * float(np.real(np.trace(SIGMA_Z @ kp)))
    lspec = sc.lindblad_spec
    if len(lspec.ops) != 1 or max_abs(lspec.ops[0] - SIGMA_Z) > 1e-12:
        raise ScenarioError("compare: comparator must have the single generator sigma_z")
    lam_ehns = 2.0 * float(lspec.h[0, 0])
    if abs(lam_wave - lam_ehns) > 1e-12 * max(1.0, abs(lam_wave)):
        raise ScenarioError(
            f"compare: dephasing strengths not matched (wave {lam_wave!r}, comparator {lam_ehns!r})"
        )
    return lam_wave, lam_ehns


def compare_models(config_path, out_dir=None, seed: int = 0, tolerance_scale: float = 1.0,
                   integrator=None, dt=None) -> RunReport:
    """Run both models on matched dephasing and emit the joint contrast table."""
    t_begin = time.perf_counter()
    sc = load_scenario(config_path)
    if sc.model != "both":
        raise ScenarioError("compare: scenario.model must be 'both'")
    lam_wave, lam_ehns = _extract_matched_lambdas(sc)
    out = resolve_out_dir(out_dir)
    tol = _scaled(sc.tolerances, tolerance_scale)
    report = RunReport(scenario=sc.name)

    wave_traj, superop = _wave_trajectory(sc, integrator=integrator, dt=dt)
    lind_traj = _lindblad_trajectory(sc, dt=dt)

    header = [
        "t",
        "waveop_offdiag_abs",
        "lindblad_offdiag_abs",
        "waveop_purity",
        "lindblad_purity",
        "wave_contrast_factor",
        "ehns_contrast_factor",
    ]
    rows = []
    for k, t in enumerate(wave_traj.times):
        rh = wave_traj.states[k]
        rho_w = rh @ rh.conj().T
        rho_l = lind_traj.states[k]
        rows.append(
            [
                float(t),
                abs(rho_w[0, 1]),
                abs(rho_l[0, 1]),
                purity(rh),
                purity_of_density(rho_l),
                float(np.cos(2.0 * lam_wave * t)),
                1.0 - 2.0 * lam_ehns * t,
            ]
        )
    path = os.path.join(out, f"{sc.name}_compare.csv")
    write_table(path, header, rows)
    report.outputs.append(path)

    _basic_wave_checks(report, superop, wave_traj, tol)
    _basic_lindblad_checks(report, lind_traj, tol)
    report.duration_s = time.perf_counter() - t_begin
    _write_report(report, out)
    return report


def dump_superoperator(config_path, out_dir=None) -> str:
    """Write the extended-space generator as a long-format CSV (a, b, re, im)."""
    sc = load_scenario(config_path)
    if sc.wave_spec is None:
        raise ScenarioError("dump-superop: scenario has no wave-operator section")
    superop = build_superoperator(sc.wave_spec, sc.basis)
    out = resolve_out_dir(out_dir)
    path = os.path.join(out, f"{sc.name}_superop.csv")
    n2 = sc.dim**2
    rows = []
    for a in range(n2):
        for b in range(n2):
            rows.append([float(a), float(b), superop.matrix[a, b].real, superop.matrix[a, b].imag])
    write_table(path, ["a", "b", "re", "im"], rows)
    return path
