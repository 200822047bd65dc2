import json
import os
import subprocess

import pytest

import spinfactor as sf

CLI = os.environ.get("SPINFACTOR_CLI")
CONFIGS = os.environ.get("SPINFACTOR_CONFIG_DIR", "")


def test_energy_examples():
    pair = sf.IsingModel(2, [0.0, 0.0], [(0, 1, -1.0)])
    assert sf.energy(pair, [1, 1]) == -1.0
    assert sf.delta_energy(pair, [1, 1], 0) == 2.0
    assert sf.energy(sf.IsingModel(1, [1.0]), [-1]) == -1.0


def test_contract_violation_is_value_error():
    with pytest.raises(ValueError):
        sf.IsingModel(2, [0.0])


def test_model_json_round_trip():
    m = sf.IsingModel(3, [0.5, 0.0, -0.25], [(0, 2, -1.0)], ["a", "b", "c"])
    assert sf.IsingModel.from_json(m.to_json()) == m
    shifted = m.with_offsets({0: -0.5})
    assert shifted.h[0] == 0.0


def test_mu_synthesis():
    res = sf.synthesize(sf.mu_relation())
    assert res.gap > 0
    report = sf.verify_degenerate_ground(sf.mu_relation(), res.model)
    assert report["passed"]
    assert sf.ground_states(res.model)["count"] == 16


def test_cq_triple_ground():
    rep = sf.ground_states(sf.cq_triple(0.25, 0.5))
    assert rep["configs"] == ["111"]


def test_factorize_p6():
    res = sf.synthesize(sf.mu_relation())
    model, layout = sf.build_factorizer(res, 5.0 / 12.0)
    assert len(model) == 32
    clamped = sf.apply_problem(model, layout, 6, 1.0, 7.0 / 6.0)
    sched = sf.Schedule(sweeps=5000, t_start=1.0, t_end=0.05)
    out = sf.sample(clamped, sched, 20, 2024)
    pairs = {(r["M"], r["N"]) for r in (sf.readout_factors(c, layout, 6) for c in out["configs"]) if r["success"]}
    assert pairs <= {(2, 3), (3, 2)}
    assert pairs


def test_sample_matches_anneal_once():
    m = sf.IsingModel(3, [0.1, -0.2, 0.3], [(0, 1, -1.0), (1, 2, 0.5)])
    sched = sf.Schedule(sweeps=50)
    out = sf.sample(m, sched, 1, 7)
    spins, energy = sf.anneal_once(m, sched, sf.derive_seed(7, 0))
    assert out["configs"][0] == spins
    assert out["energies"][0] == energy


def test_run_command(tmp_path):
    cfg = sf.default_config("oracle")
    code, summary = sf.run_command(cfg, str(tmp_path))
    assert code == 0
    assert summary["count"] == 16
    assert (tmp_path / "oracle.json").exists()


def test_run_command_rejects_unknown_key(tmp_path):
    with pytest.raises(ValueError):
        sf.run_command({"command": "synth", "bogus": 1}, str(tmp_path))


@pytest.mark.skipif(not CLI, reason="CLI path not provided")
class TestCli:
    def run(self, *args):
        return subprocess.run([CLI, *args], capture_output=True, text=True)

    def test_print_defaults(self):
        out = self.run("synth", "--print-defaults")
        assert out.returncode == 0
        assert json.loads(out.stdout)["command"] == "synth"

    def test_synth_ok(self, tmp_path):
        out = self.run("synth", "--config", os.path.join(CONFIGS, "synth.json"), "--out", str(tmp_path))
        assert out.returncode == 0
        assert json.loads(out.stdout)["ground_state_count"] == 16

    def test_config_error(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"command": "synth", "bogus": 1}))
        out = self.run("synth", "--config", str(bad), "--out", str(tmp_path / "o"))
        assert out.returncode == 2

    def test_missing_config(self, tmp_path):
        assert self.run("synth", "--config", str(tmp_path / "none.json")).returncode == 2

    def test_verification_failure(self, tmp_path):
        cfg = tmp_path / "infeasible.json"
        cfg.write_text(json.dumps({"command": "synth", "model": {"gap_target": 10.0, "coeff_bound": 1.0}}))
        out = self.run("synth", "--config", str(cfg), "--out", str(tmp_path / "o"))
        assert out.returncode == 1

    def test_seed_override_changes_output(self, tmp_path):
        cfg = os.path.join(CONFIGS, "cq-sweep.json")
        a = json.loads(self.run("cq-sweep", "--config", cfg, "--out", str(tmp_path / "a"), "--seed", "1").stdout)
        b = json.loads(self.run("cq-sweep", "--config", cfg, "--out", str(tmp_path / "b"), "--seed", "1").stdout)
        assert a == b
        assert a["master_seed"] == 1
