import json
from importlib import resources

import numpy as np
import pytest

from waveop import build_superoperator
from waveop.cli import list_scenarios, main
from waveop.runner import compare_models, run_scenario
from waveop.scenario import ScenarioError, load_scenario


def shipped(name):
    return str(resources.files("waveop").joinpath("scenarios", f"{name}.json"))


def read_csv(path):
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
    data = np.loadtxt(path, delimiter=",", skiprows=1)
    return header, data


def base_scenario():
    return {
        "schema_version": 1,
        "name": "unit-test",
        "model": "wave_operator",
        "dim": 2,
        "initial_state": [[0.7071067811865476, 0.0], [0.7071067811865476, 0.0]],
        "time_grid": {"start": 0.0, "stop": 4.0, "samples": 41},
        "integrator": "exact",
        "observables": ["energy"],
        "wave": {
            "hamiltonian": {"basis_coeffs": [0.0, 0.0, 0.0, 0.5]},
            "couplings": [
                {
                    "g": 1.0,
                    "k": {"basis_coeffs": [0.0, 0.0, 0.0, 1.0]},
                    "k_prime": {"basis_coeffs": [0.0, 0.0, 0.0, 0.2]},
                }
            ],
        },
    }


def write_scenario(tmp_path, doc, name="scenario.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


class TestScenarioParsing:
    @pytest.mark.parametrize(
        "name",
        ["purity-oscillation", "closed-system", "neutron-default", "dephasing-compare", "fuzz-random-specs"],
    )
    def test_shipped_scenarios_load(self, name):
        sc = load_scenario(shipped(name))
        assert sc.name == name

    def test_non_hermitian_coupling_rejected_with_field_name(self, tmp_path):
        doc = base_scenario()
        doc["wave"]["couplings"][0]["k"] = {
            "matrix": [[[0.0, 0.0], [1.0, 0.0]], [[0.0, 0.0], [0.0, 0.0]]]
        }
        with pytest.raises(ScenarioError, match=r"couplings\[0\]\.k.*not hermitian"):
            load_scenario(write_scenario(tmp_path, doc))

    def test_missing_field_named(self, tmp_path):
        doc = base_scenario()
        del doc["time_grid"]["samples"]
        with pytest.raises(ScenarioError, match="time_grid.samples"):
            load_scenario(write_scenario(tmp_path, doc))

    def test_bad_schema_version(self, tmp_path):
        doc = base_scenario()
        doc["schema_version"] = 99
        with pytest.raises(ScenarioError, match="schema_version"):
            load_scenario(write_scenario(tmp_path, doc))

    def test_non_normalized_state_rejected(self, tmp_path):
        doc = base_scenario()
        doc["initial_state"] = [[1.0, 0.0], [1.0, 0.0]]
        with pytest.raises(ScenarioError, match="initial_state"):
            load_scenario(write_scenario(tmp_path, doc))

    def test_matrix_operator_roundtrip(self, tmp_path):
        doc = base_scenario()
        doc["wave"]["hamiltonian"] = {
            "matrix": [[[0.5, 0.0], [0.0, -0.25]], [[0.0, 0.25], [-0.5, 0.0]]]
        }
        sc = load_scenario(write_scenario(tmp_path, doc))
        np.testing.assert_allclose(
            sc.wave_spec.hamiltonian, np.array([[0.5, -0.25j], [0.25j, -0.5]])
        )

    def test_unknown_observable_rejected(self, tmp_path):
        doc = base_scenario()
        doc["observables"] = ["entropy"]
        with pytest.raises(ScenarioError, match="observables"):
            load_scenario(write_scenario(tmp_path, doc))


class TestRunScenario:
    def test_purity_oscillation_table(self, tmp_path):
        report = run_scenario(shipped("purity-oscillation"), out_dir=str(tmp_path))
        assert report.passed
        header, data = read_csv(tmp_path / "purity-oscillation.csv")
        t = data[:, header.index("t")]
        pur = data[:, header.index("purity")]
        lam = 0.25
        assert np.max(np.abs(pur - (0.5 + 0.5 * np.cos(2 * lam * t) ** 2))) < 1e-9

    def test_closed_system_purity_constant_one(self, tmp_path):
        run_scenario(shipped("closed-system"), out_dir=str(tmp_path))
        header, data = read_csv(tmp_path / "closed-system.csv")
        pur = data[:, header.index("purity")]
        assert np.max(np.abs(pur - 1.0)) < 1e-12

    def test_neutron_interference_matches_closed_form(self, tmp_path):
        run_scenario(shipped("neutron-default"), out_dir=str(tmp_path))
        header, data = read_csv(tmp_path / "neutron-default.csv")
        t = data[:, header.index("t")]
        got = data[:, header.index("interference")]
        omega, lam = 1000.0, 10.0
        want = 0.5 * (1 + 0.5 * (np.cos((omega + 2 * lam) * t) + np.cos((omega - 2 * lam) * t)))
        assert np.max(np.abs(got - want)) < 1e-10

    def test_byte_deterministic(self, tmp_path):
        a = tmp_path / "a"
        b = tmp_path / "b"
        run_scenario(shipped("purity-oscillation"), out_dir=str(a), seed=3)
        run_scenario(shipped("purity-oscillation"), out_dir=str(b), seed=3)
        assert (a / "purity-oscillation.csv").read_bytes() == (b / "purity-oscillation.csv").read_bytes()

    def test_stepping_integrator_override(self, tmp_path):
        report = run_scenario(
            shipped("closed-system"), out_dir=str(tmp_path), integrator="stepping", dt=1e-3
        )
        assert report.passed

    def test_report_file_contents(self, tmp_path):
        report = run_scenario(shipped("closed-system"), out_dir=str(tmp_path))
        payload = json.loads((tmp_path / "closed-system_report.json").read_text())
        assert payload["passed"] is True
        names = [c["name"] for c in payload["checks"]]
        assert len(names) == len(set(names))
        assert set(names) == {"superop_hermiticity", "inner_conservation", "positivity"}
        assert report.outputs[-1].endswith("closed-system_report.json")


class TestCheckCommand:
    def test_fuzz_scenario_passes(self, tmp_path):
        code = main(["check", shipped("fuzz-random-specs"), "--out", str(tmp_path), "--seed", "11"])
        assert code == 0

    def test_exit_one_on_violated_tolerance(self, tmp_path):
        doc = base_scenario()
        doc["tolerances"] = {"inner_conservation": 1e-30}
        path = write_scenario(tmp_path, doc)
        assert main(["check", path, "--out", str(tmp_path)]) == 1

    def test_tolerance_scale_flag_loosens(self, tmp_path):
        doc = base_scenario()
        doc["tolerances"] = {"inner_conservation": 1e-30}
        path = write_scenario(tmp_path, doc)
        assert main(["check", path, "--out", str(tmp_path), "--tolerance-scale", "1e20"]) == 0

    def test_parse_error_exit_code(self, tmp_path, capsys):
        doc = base_scenario()
        doc["model"] = "nonsense"
        path = write_scenario(tmp_path, doc)
        assert main(["check", path, "--out", str(tmp_path)]) == 2
        assert "model" in capsys.readouterr().err


class TestCompareModels:
    def test_dephasing_comparison_table(self, tmp_path):
        report = compare_models(shipped("dephasing-compare"), out_dir=str(tmp_path))
        assert report.passed
        header, data = read_csv(tmp_path / "dephasing-compare_compare.csv")
        t = data[:, header.index("t")]
        lam = 0.05
        wave = data[:, header.index("waveop_offdiag_abs")]
        lind = data[:, header.index("lindblad_offdiag_abs")]
        np.testing.assert_allclose(wave, np.abs(np.cos(2 * lam * t)) / 2, atol=1e-10)
        assert np.all(np.diff(lind) < 1e-12)  # monotone comparator decay
        np.testing.assert_allclose(
            data[:, header.index("wave_contrast_factor")], np.cos(2 * lam * t), atol=1e-12
        )
        np.testing.assert_allclose(
            data[:, header.index("ehns_contrast_factor")], 1 - 2 * lam * t, atol=1e-12
        )

    def test_zero_coupling_sides_identical(self, tmp_path):
        doc = base_scenario()
        doc["model"] = "both"
        doc["name"] = "matched-zero"
        doc["observables"] = []
        doc["wave"]["couplings"][0]["k_prime"] = {"basis_coeffs": [0.0, 0.0, 0.0, 0.0]}
        doc["lindblad"] = {
            "hamiltonian": {"basis_coeffs": [0.0, 0.0, 0.0, 0.5]},
            "ops": [{"basis_coeffs": [0.0, 0.0, 0.0, 1.0]}],
            "h": [[0.0]],
        }
        path = write_scenario(tmp_path, doc)
        compare_models(path, out_dir=str(tmp_path))
        header, data = read_csv(tmp_path / "matched-zero_compare.csv")
        for col in ("offdiag_abs", "purity"):
            wave = data[:, header.index(f"waveop_{col}")]
            lind = data[:, header.index(f"lindblad_{col}")]
            assert np.max(np.abs(wave - lind)) < 1e-10

    def test_mismatched_strengths_rejected(self, tmp_path):
        doc = base_scenario()
        doc["model"] = "both"
        doc["lindblad"] = {
            "hamiltonian": {"basis_coeffs": [0.0, 0.0, 0.0, 0.5]},
            "ops": [{"basis_coeffs": [0.0, 0.0, 0.0, 1.0]}],
            "h": [[0.3]],
        }
        path = write_scenario(tmp_path, doc)
        with pytest.raises(ScenarioError, match="not matched"):
            compare_models(path, out_dir=str(tmp_path))

    def test_requires_both_model(self, tmp_path):
        with pytest.raises(ScenarioError, match="both"):
            compare_models(shipped("purity-oscillation"), out_dir=str(tmp_path))


class TestDumpAndList:
    def test_dump_superop_matches_builder(self, tmp_path):
        assert main(["dump-superop", shipped("purity-oscillation"), "--out", str(tmp_path)]) == 0
        header, data = read_csv(tmp_path / "purity-oscillation_superop.csv")
        sc = load_scenario(shipped("purity-oscillation"))
        sop = build_superoperator(sc.wave_spec, sc.basis)
        rebuilt = np.zeros((4, 4), dtype=complex)
        for a, b, re, im in data:
            rebuilt[int(a), int(b)] = re + 1j * im
        np.testing.assert_allclose(rebuilt, sop.matrix, atol=1e-15)

    def test_list_scenarios(self, capsys):
        assert main(["list-scenarios"]) == 0
        out = capsys.readouterr().out
        for name in list_scenarios():
            assert name[:-5] in out

    def test_out_dir_env_var(self, tmp_path, monkeypatch):
        monkeypatch.setenv("WAVEOP_OUT_DIR", str(tmp_path / "envout"))
        run_scenario(shipped("closed-system"))
        assert (tmp_path / "envout" / "closed-system.csv").exists()
