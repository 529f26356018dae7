"""Scenario files: schema-versioned JSON descriptions of simulation runs.

A scenario names a model (``wave_operator``, ``lindblad`` or ``both``),
the operators defining it, an initial state vector, a time grid and the
observables to record.  Operators are written either as real coefficients
over the hermitian basis (hermiticity is then automatic) or as explicit
matrices of (re, im) pairs, which are validated.  Parse errors always name
the offending field.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .basis import HermitianBasis, build_basis
from .dynamics import EvolutionSpec, LindbladSpec
from .linalg import hermiticity_defect, max_abs
from .twolevel import interference_observable

SCHEMA_VERSION = 1

MODELS = ("wave_operator", "lindblad", "both")
INTEGRATORS = ("exact", "stepping")

# default residual budgets for the invariant battery; a scenario may
# override any of them, and --tolerance-scale multiplies the lot
DEFAULT_TOLERANCES = {
    "superop_hermiticity": 1e-12,
    "inner_conservation": 1e-9,
    "trace_conservation": 1e-9,
    "hermiticity_preservation": 1e-10,
    "positivity": 1e-12,
    "gauge_invariance": 1e-12,
    "commutation": 1e-12,
    "degeneracy": 1e-10,
}


class ScenarioError(ValueError):
    """Schema violation in a scenario file; message names the field."""


@dataclass(frozen=True)
class ObservableSpec:
    """One recorded observable: a column name plus the operator to average."""

    name: str
    matrix: np.ndarray


@dataclass
class Scenario:
    name: str
    model: str
    dim: int
    psi0: np.ndarray
    times: np.ndarray
    integrator: str
    dt: float | None
    observables: list[ObservableSpec]
    wave_spec: EvolutionSpec | None
    lindblad_spec: LindbladSpec | None
    tolerances: dict
    fuzz: dict | None
    basis: HermitianBasis = field(repr=False, default=None)


def _require(mapping, key, path, kind=None):
    if key not in mapping:
        raise ScenarioError(f"{path}.{key}: missing required field")
    value = mapping[key]
    if kind is not None and not isinstance(value, kind):
        raise ScenarioError(f"{path}.{key}: expected {kind.__name__}, got {type(value).__name__}")
    return value


def _real_number(value, path) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioError(f"{path}: expected a real number, got {value!r}")
    return float(value)


def _complex_pair(value, path) -> complex:
    if not isinstance(value, list) or len(value) != 2:
        raise ScenarioError(f"{path}: complex scalars are (re, im) pairs, got {value!r}")
    return complex(_real_number(value[0], f"{path}[0]"), _real_number(value[1], f"{path}[1]"))


def parse_operator(node, dim: int, basis: HermitianBasis, path: str, hermitian: bool = True) -> np.ndarray:
    """Build an operator from {"basis_coeffs": [...]} or {"matrix": [[...]]}."""
    if not isinstance(node, dict):
        raise ScenarioError(f"{path}: expected an operator object, got {node!r}")
    if ("basis_coeffs" in node) == ("matrix" in node):
        raise ScenarioError(f"{path}: give exactly one of 'basis_coeffs' or 'matrix'")
    if "basis_coeffs" in node:
        coeffs = node["basis_coeffs"]
        if not isinstance(coeffs, list) or len(coeffs) != dim**2:
            raise ScenarioError(f"{path}.basis_coeffs: expected {dim**2} real coefficients")
        vals = np.array([_real_number(c, f"{path}.basis_coeffs[{i}]") for i, c in enumerate(coeffs)])
        return np.einsum("a,aij->ij", vals, basis.elements)
    rows = node["matrix"]
    if not isinstance(rows, list) or len(rows) != dim:
        raise ScenarioError(f"{path}.matrix: expected {dim} rows")
    out = np.zeros((dim, dim), dtype=complex)
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != dim:
            raise ScenarioError(f"{path}.matrix[{i}]: expected {dim} entries")
        for j, entry in enumerate(row):
            out[i, j] = _complex_pair(entry, f"{path}.matrix[{i}][{j}]")
    if hermitian:
        defect = hermiticity_defect(out)
        if defect > 1e-12 * max(1.0, max_abs(out)):
            raise ScenarioError(f"{path}.matrix: operator is not hermitian (defect {defect:.3e})")
    return out


def _parse_wave(node, dim, basis, path) -> EvolutionSpec:
    ham = parse_operator(_require(node, "hamiltonian", path), dim, basis, f"{path}.hamiltonian")
    left = node.get("left")
    right = node.get("right")
    left_m = parse_operator(left, dim, basis, f"{path}.left") if left is not None else None
    right_m = parse_operator(right, dim, basis, f"{path}.right") if right is not None else None
    couplings = []
    for idx, c in enumerate(node.get("couplings", [])):
        cpath = f"{path}.couplings[{idx}]"
        if not isinstance(c, dict):
            raise ScenarioError(f"{cpath}: expected an object")
        g = _real_number(_require(c, "g", cpath), f"{cpath}.g")
        k = parse_operator(_require(c, "k", cpath), dim, basis, f"{cpath}.k")
        kp = parse_operator(_require(c, "k_prime", cpath), dim, basis, f"{cpath}.k_prime")
        couplings.append((g, k, kp))
    try:
        return EvolutionSpec(hamiltonian=ham, left_term=left_m, right_term=right_m, couplings=tuple(couplings))
    except ValueError as exc:
        raise ScenarioError(f"{path}: {exc}") from exc


def _parse_lindblad(node, dim, basis, path) -> LindbladSpec:
    ham = parse_operator(_require(node, "hamiltonian", path), dim, basis, f"{path}.hamiltonian")
    ops_node = _require(node, "ops", path, list)
    ops = [
        parse_operator(q, dim, basis, f"{path}.ops[{i}]") for i, q in enumerate(ops_node)
    ]
    h_node = _require(node, "h", path)
    if isinstance(h_node, (int, float)) and not isinstance(h_node, bool):
        h = np.array([[float(h_node)]])
    elif isinstance(h_node, list):
        h = np.array(
            [
                [_real_number(x, f"{path}.h[{i}][{j}]") for j, x in enumerate(row)]
                for i, row in enumerate(h_node)
            ]
        )
    else:
        raise ScenarioError(f"{path}.h: expected a real matrix or scalar")
    try:
        return LindbladSpec(hamiltonian=ham, ops=tuple(ops), h=h)
    except ValueError as exc:
        raise ScenarioError(f"{path}: {exc}") from exc


def _parse_observables(node, dim, basis, wave_spec, lindblad_spec, path) -> list[ObservableSpec]:
    out: list[ObservableSpec] = []
    seen = set()
    for idx, entry in enumerate(node or []):
        epath = f"{path}[{idx}]"
        if isinstance(entry, str):
            if entry in ("purity", "inner_norm"):
                continue  # always-emitted columns
            if entry == "energy":
                spec = wave_spec if wave_spec is not None else lindblad_spec
                out.append(ObservableSpec(name="energy", matrix=spec.hamiltonian))
                continue
            raise ScenarioError(f"{epath}: unknown observable {entry!r}")
        if isinstance(entry, dict) and "interference" in entry:
            if dim != 2:
                raise ScenarioError(f"{epath}: interference observable requires dim = 2")
            inode = entry["interference"]
            theta = _real_number(_require(inode, "theta", f"{epath}.interference"), f"{epath}.interference.theta")
            out.append(ObservableSpec(name="interference", matrix=interference_observable(theta)))
            continue
        if isinstance(entry, dict) and "custom" in entry:
            cnode = entry["custom"]
            name = _require(cnode, "name", f"{epath}.custom", str)
            if not name.replace("_", "").replace("-", "").isalnum():
                raise ScenarioError(f"{epath}.custom.name: must be alphanumeric with _ or -")
            op = parse_operator(
                _require(cnode, "operator", f"{epath}.custom"), dim, basis, f"{epath}.custom.operator"
            )
            out.append(ObservableSpec(name=name, matrix=op))
            continue
        raise ScenarioError(f"{epath}: unrecognized observable entry {entry!r}")
    for obs in out:
        if obs.name in seen:
            raise ScenarioError(f"{path}: duplicate observable column {obs.name!r}")
        seen.add(obs.name)
    return out


def load_scenario(path) -> Scenario:
    """Parse and validate a scenario file."""
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{path}: not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ScenarioError("scenario: top level must be an object")

    version = _require(raw, "schema_version", "scenario", int)
    if version != SCHEMA_VERSION:
        raise ScenarioError(f"scenario.schema_version: unsupported version {version}, expected {SCHEMA_VERSION}")
    name = _require(raw, "name", "scenario", str)
    model = _require(raw, "model", "scenario", str)
    if model not in MODELS:
        raise ScenarioError(f"scenario.model: must be one of {MODELS}, got {model!r}")
    dim = _require(raw, "dim", "scenario", int)
    if dim < 1:
        raise ScenarioError("scenario.dim: must be a positive integer")
    basis = build_basis(dim)

    state_node = _require(raw, "initial_state", "scenario", list)
    if len(state_node) != dim:
        raise ScenarioError(f"scenario.initial_state: expected {dim} amplitude pairs")
    psi0 = np.array(
        [_complex_pair(x, f"scenario.initial_state[{i}]") for i, x in enumerate(state_node)]
    )
    norm = float(np.linalg.norm(psi0))
    if abs(norm - 1.0) > 1e-9:
        raise ScenarioError(f"scenario.initial_state: must have unit norm, got {norm!r}")
    psi0 = psi0 / norm

    grid_node = _require(raw, "time_grid", "scenario", dict)
    start = _real_number(_require(grid_node, "start", "scenario.time_grid"), "scenario.time_grid.start")
    stop = _real_number(_require(grid_node, "stop", "scenario.time_grid"), "scenario.time_grid.stop")
    samples = _require(grid_node, "samples", "scenario.time_grid", int)
    if samples < 2:
        raise ScenarioError("scenario.time_grid.samples: must be at least 2")
    if not stop > start:
        raise ScenarioError("scenario.time_grid: stop must exceed start")
    times = np.linspace(start, stop, samples)

    integrator = raw.get("integrator", "exact")
    if integrator not in INTEGRATORS:
        raise ScenarioError(f"scenario.integrator: must be one of {INTEGRATORS}, got {integrator!r}")
    dt = raw.get("dt")
    if dt is not None:
        dt = _real_number(dt, "scenario.dt")
        if dt <= 0:
            raise ScenarioError("scenario.dt: must be positive")

    wave_spec = None
    lindblad_spec = None
    if model in ("wave_operator", "both"):
        wave_spec = _parse_wave(_require(raw, "wave", "scenario", dict), dim, basis, "scenario.wave")
    if model in ("lindblad", "both"):
        lindblad_spec = _parse_lindblad(
            _require(raw, "lindblad", "scenario", dict), dim, basis, "scenario.lindblad"
        )

    observables = _parse_observables(
        raw.get("observables"), dim, basis, wave_spec, lindblad_spec, "scenario.observables"
    )

    tolerances = dict(DEFAULT_TOLERANCES)
    for key, val in (raw.get("tolerances") or {}).items():
        if key not in DEFAULT_TOLERANCES:
            raise ScenarioError(f"scenario.tolerances.{key}: unknown tolerance")
        tolerances[key] = _real_number(val, f"scenario.tolerances.{key}")

    fuzz = raw.get("fuzz")
    if fuzz is not None:
        count = _require(fuzz, "count", "scenario.fuzz", int)
        dims = fuzz.get("dims", [dim])
        if count < 1:
            raise ScenarioError("scenario.fuzz.count: must be positive")
        if not isinstance(dims, list) or not all(isinstance(d, int) and d >= 1 for d in dims):
            raise ScenarioError("scenario.fuzz.dims: must be a list of positive integers")
        fuzz = {"count": count, "dims": dims}

    if not math.isfinite(start) or not math.isfinite(stop):
        raise ScenarioError("scenario.time_grid: bounds must be finite")

    return Scenario(
        name=name,
        model=model,
        dim=dim,
        psi0=psi0,
        times=times,
        integrator=integrator,
        dt=dt,
        observables=observables,
        wave_spec=wave_spec,
        lindblad_spec=lindblad_spec,
        tolerances=tolerances,
        fuzz=fuzz,
        basis=basis,
    )
