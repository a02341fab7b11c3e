import csv
import json
import math

import numpy as np
import pytest

from spinchain.cli import main


def run_cli(*args):
    return main([str(a) for a in args])


def read_csv(path):
    with open(path) as fh:
        return list(csv.reader(fh))


def test_rabi_resonant(capsys):
    assert run_cli("rabi", "--g", 1, "--detuning", 0) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[1] == "0,1"


def test_rabi_detuned(capsys):
    assert run_cli("rabi", "--g", 1, "--detuning", 1) == 0
    assert capsys.readouterr().out.splitlines()[1] == "1,0.5"


def test_rabi_fluctuation_pair(capsys):
    assert run_cli("rabi", "--g", 1, "--Ediff", 10, "--eps", 10) == 0
    row = capsys.readouterr().out.splitlines()[1].split(",")
    assert float(row[1]) == 1.0
    assert float(row[2]) == pytest.approx(1.0 / 401.0, rel=1e-8)


def test_rabi_eps_sweep_shows_assist_then_suppress(capsys):
    assert run_cli("rabi", "--g", 1, "--Ediff", 5, "--eps-sweep", 0, 10, 11) == 0
    lines = capsys.readouterr().out.splitlines()[1:]
    minus = [float(l.split(",")[1]) for l in lines]
    # the -eps branch peaks when fluctuations cancel the static mismatch
    assert np.argmax(minus) == 5
    assert minus[5] == 1.0


def test_rabi_requires_arguments(capsys):
    assert run_cli("rabi", "--g", 1) == 1
    assert "error" in capsys.readouterr().err


def test_evolve_two_site_rabi_flop(tmp_path):
    t_half = math.pi / 2
    assert run_cli(
        "evolve", "--n-sites", 2, "--delta", 0, "--gamma", 0,
        "--t-final", repr(t_half), "--n-samples", 2,
        "--initial-site", 0, "--out-dir", tmp_path, "--prefix", "flop",
    ) == 0
    rows = read_csv(tmp_path / "flop_delta0_gamma0_hop0.csv")
    assert rows[0] == ["t", "site_0", "site_1"]
    last = [float(x) for x in rows[-1]]
    assert last[0] == pytest.approx(t_half, rel=1e-8)
    assert last[1] == pytest.approx(0.0, abs=1e-6)
    assert last[2] == pytest.approx(1.0, abs=1e-6)


def test_evolve_outputs_are_deterministic(tmp_path):
    args = ["evolve", "--n-sites", 21, "--delta", 0.5, "--gamma", 1.0,
            "--t-final", 2.0, "--n-samples", 11, "--seed", 9]
    a, b = tmp_path / "a", tmp_path / "b"
    assert run_cli(*args, "--out-dir", a) == 0
    assert run_cli(*args, "--out-dir", b) == 0
    name = "evolve_delta0.5_gamma1_hop0.csv"
    assert (a / name).read_bytes() == (b / name).read_bytes()


def test_rerun_from_manifest_is_byte_identical(tmp_path):
    first = tmp_path / "first"
    again = tmp_path / "again"
    assert run_cli("evolve", "--n-sites", 15, "--delta", 1.0, "--gamma", 0.5,
                   "--t-final", 2.0, "--n-samples", 11, "--seed", 4,
                   "--out-dir", first) == 0
    assert run_cli("rerun", first / "evolve_manifest.json", "--out-dir", again) == 0
    name = "evolve_delta1_gamma0.5_hop0.csv"
    assert (first / name).read_bytes() == (again / name).read_bytes()


def test_rerun_covers_sweep_and_trajectory(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    run_cli("sweep", "--deltas", "0,1", "--gammas", "0.5", "--n-sites", 15,
            "--n-disorder", 2, "--t-final", 2.0, "--fit-window", 0.5, 2.0,
            "--n-samples", 21, "--out-dir", a)
    assert run_cli("rerun", a / "sweep_manifest.json", "--out-dir", b) in (0, 1)
    assert (a / "sweep_fits.csv").read_bytes() == (b / "sweep_fits.csv").read_bytes()

    c, d = tmp_path / "c", tmp_path / "d"
    assert run_cli("trajectory", "--n-sites", 15, "--delta", 0.5, "--gamma", 1.0,
                   "--t-final", 2.0, "--n-samples", 11, "--seed", 5,
                   "--out-dir", c) == 0
    assert run_cli("rerun", c / "trajectory_manifest.json", "--out-dir", d) == 0
    name = "trajectory_delta0.5_gamma1_hop0_traj00_events.csv"
    assert (c / name).read_bytes() == (d / name).read_bytes()


def test_frames_rows_sum_to_one(tmp_path):
    assert run_cli("evolve", "--n-sites", 31, "--delta", 1.0, "--big-gamma", 1.0,
                   "--t-final", 3.0, "--n-samples", 16, "--out-dir", tmp_path) == 0
    rows = read_csv(tmp_path / "evolve_delta1_gamma0_hop1.csv")[1:]
    for row in rows:
        assert abs(sum(float(x) for x in row[1:]) - 1.0) < 1e-6


def test_trajectory_without_noise_has_header_only_events(tmp_path):
    assert run_cli("trajectory", "--n-sites", 15, "--delta", 0, "--gamma", 0,
                   "--t-final", 2.0, "--n-samples", 11, "--out-dir", tmp_path) == 0
    rows = read_csv(tmp_path / "trajectory_delta0_gamma0_hop0_traj00_events.csv")
    assert rows == [["t", "kind", "site_or_pair"]]


def test_trajectory_hop_events_use_pair_syntax(tmp_path):
    assert run_cli("trajectory", "--n-sites", 15, "--delta", 0, "--big-gamma", 2.0,
                   "--t-final", 4.0, "--n-samples", 11, "--seed", 3,
                   "--out-dir", tmp_path) == 0
    rows = read_csv(tmp_path / "trajectory_delta0_gamma0_hop2_traj00_events.csv")[1:]
    assert rows, "expected at least one hop event"
    for t, kind, pair in rows:
        assert kind == "hop"
        src, dst = pair.split("->")
        assert abs(int(src) - int(dst)) == 1


def test_fig3a_preset_writes_four_frames_files(tmp_path):
    assert run_cli("evolve", "--preset", "fig3a", "--out-dir", tmp_path) == 0
    manifest = json.loads((tmp_path / "fig3a_manifest.json").read_text())
    assert len(manifest["runs"]) == 4
    deltas = [run["delta"] for run in manifest["runs"]]
    assert deltas == [0.0, 0.5, 1.0, 10.0]
    for run in manifest["runs"]:
        assert (tmp_path / run["frames"]).exists()
        assert run["gamma"] == 0.0 and run["big_gamma"] == 0.0


def test_fig4b_preset_event_count_matches_poisson_rate(tmp_path):
    assert run_cli("trajectory", "--preset", "fig4b", "--seed", 1,
                   "--out-dir", tmp_path) == 0
    manifest = json.loads((tmp_path / "fig4b_manifest.json").read_text())
    run = next(r for r in manifest["runs"] if r["delta"] == 0.0 and r["gamma"] == 10.0)
    expected = 2 * 10.0 * 81 * 20.0
    n_events = len(read_csv(tmp_path / run["events"])) - 1
    assert abs(n_events - expected) <= 3 * math.sqrt(expected)
    assert n_events == run["n_events"]


def test_fig6_preset_contains_exclusion_events(tmp_path):
    assert run_cli("trajectory", "--preset", "fig6", "--out-dir", tmp_path) == 0
    manifest = json.loads((tmp_path / "fig6_manifest.json").read_text())
    assert len(manifest["runs"]) == 10
    kinds = set()
    for run in manifest["runs"]:
        for row in read_csv(tmp_path / run["events"])[1:]:
            kinds.add(row[1])
    assert "exclude" in kinds


def test_sweep_synthetic_identity(tmp_path):
    assert run_cli("sweep", "--synthetic", "2.5,1.7", "--out-dir", tmp_path,
                   "--prefix", "syn") == 0
    rows = read_csv(tmp_path / "syn_fits.csv")
    assert rows[0] == ["delta", "gamma", "big_gamma", "c", "alpha",
                       "rms_log_residual", "valid"]
    _, _, _, c, alpha, resid, valid = rows[1]
    assert float(c) == pytest.approx(2.5, abs=1e-10)
    assert float(alpha) == pytest.approx(1.7, abs=1e-10)
    assert valid == "1"


def test_sweep_paper_grid_rows_present(tmp_path):
    # full fig5 grid structure at a toy scale
    assert run_cli("sweep", "--preset", "fig5", "--n-sites", 15, "--n-disorder", 1,
                   "--t-final", 2.0, "--fit-window", 0.5, 2.0, "--n-samples", 41,
                   "--out-dir", tmp_path) in (0, 1)
    rows = read_csv(tmp_path / "fig5_fits.csv")[1:]
    assert len(rows) == 30
    keys = {(float(r[0]), float(r[1]), float(r[2])) for r in rows}
    for d in (0.0, 0.5, 1.0, 2.0, 10.0):
        for rate in (0.1, 1.0, 10.0):
            assert (d, rate, 0.0) in keys
            assert (d, 0.0, rate) in keys
    manifest = json.loads((tmp_path / "fig5_manifest.json").read_text())
    for run in manifest["runs"]:
        assert (tmp_path / run["msd"]).exists()


def test_sweep_invalid_fit_window_gives_nonzero_exit(tmp_path):
    code = run_cli("sweep", "--deltas", "0", "--gammas", "1", "--n-sites", 15,
                   "--n-disorder", 1, "--t-final", 2.0, "--fit-window", 50, 60,
                   "--n-samples", 21, "--out-dir", tmp_path)
    assert code == 1
    rows = read_csv(tmp_path / "sweep_fits.csv")[1:]
    assert rows[0][-1] == "0"
    assert rows[0][3] == "nan"


def test_boundary_guard_warning_on_stderr(tmp_path, capsys):
    # ballistic wave on a tiny chain reaches the walls: guard must trip
    assert run_cli("evolve", "--n-sites", 15, "--delta", 0, "--t-final", 20.0,
                   "--n-samples", 11, "--out-dir", tmp_path) == 0
    assert "boundary mass" in capsys.readouterr().err
    manifest = json.loads((tmp_path / "evolve_manifest.json").read_text())
    assert manifest["warnings"]
    assert manifest["runs"][0]["boundary_warning"] is True


def test_config_file_with_flag_override(tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"n_sites": 15, "delta": 1.0, "gamma": 0.5,
                               "t_final": 2.0, "n_samples": 11}))
    out = tmp_path / "out"
    assert run_cli("evolve", "--config", cfg, "--delta", 2.0,
                   "--out-dir", out) == 0
    manifest = json.loads((out / "evolve_manifest.json").read_text())
    assert manifest["config"]["delta"] == 2.0  # flag wins
    assert manifest["config"]["gamma"] == 0.5  # file value kept
    assert (out / "evolve_delta2_gamma0.5_hop0.csv").exists()


def test_unknown_config_key_rejected(tmp_path, capsys):
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps({"n_sights": 12}))
    assert run_cli("evolve", "--config", cfg) == 1
    assert "unknown config keys" in capsys.readouterr().err


def test_unknown_preset_rejected(capsys):
    assert run_cli("evolve", "--preset", "fig9") == 1
    assert "unknown preset" in capsys.readouterr().err


def test_preset_command_mismatch_rejected(capsys):
    assert run_cli("evolve", "--preset", "fig5") == 1
    assert "belongs to" in capsys.readouterr().err
