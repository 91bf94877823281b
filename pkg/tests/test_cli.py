import csv
import json
import subprocess
import sys

import pytest

from nlspectra.cli import main


def _rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def _write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return str(p)


@pytest.mark.parametrize("eps, text", [("0", "E = -0.5"), ("1", "E = -0.125")])
def test_delta_well_reports(capsys, eps, text):
    assert main(["delta-well", "--Omega", "1", "--epsilon", eps, "--norm", "1"]) == 0
    assert capsys.readouterr().out.strip() == text


def test_delta_well_without_localization(capsys):
    assert main(["delta-well", "--Omega", "1", "--epsilon", "2.5"]) == 3
    assert "no localization: ε > 2Ω" in capsys.readouterr().out


def test_delta_well_norm_scales_the_coupling(capsys):
    # eps = 0.5 at N = 2 behaves like eps = 1 at N = 1
    assert main(["delta-well", "--Omega", "1", "--epsilon", "0.5", "--norm", "2"]) == 0
    assert capsys.readouterr().out.strip() == "E = -0.125"


def test_macrostate_profile_and_scan(tmp_path):
    code = main(["macrostate", "--kind", "soliton", "--E", "-0.5", "--epsilon", "-1", "--scan=1e-3,-1e-3",
                 "--out", str(tmp_path), "--quiet"])
    assert code == 0
    prof = _rows(tmp_path / "macrostate_soliton_profile.csv")
    peak = max(prof, key=lambda r: float(r["psi"]))
    assert float(peak["psi"]) == pytest.approx(1.0, abs=1e-12) and float(peak["x"]) == 0.0
    verdicts = _rows(tmp_path / "macrostate_soliton_verdicts.csv")
    assert {r["verdict"] for r in verdicts} == {"InnerCirculation", "OuterCirculation"}
    man = json.loads((tmp_path / "macrostate_soliton_manifest.json").read_text())
    assert man["seed_independent"] is True and "wall_time_s" in man
    assert set(man["outputs"]) == {"macrostate_soliton_profile.csv", "macrostate_soliton_verdicts.csv"}


def test_macrostate_domain_violation(tmp_path):
    assert main(["macrostate", "--kind", "gausson", "--E", "-1", "--epsilon", "1", "--out", str(tmp_path)]) == 2


def _zero_field_config(tmp_path):
    return _write(tmp_path, "zero.json", {"initial": {"kind": "zero"}, "evolution": {"t_end": 0.01}})


def test_evolve_zero_field(tmp_path):
    cfg = _zero_field_config(tmp_path)
    assert main(["evolve", "fig8c", "--config", cfg, "--out", str(tmp_path), "--quiet"]) == 0
    diag = _rows(tmp_path / "fig8c_diagnostics.csv")
    assert diag and all(float(v) == 0.0 for r in diag for k, v in r.items() if k != "t")
    snaps = _rows(tmp_path / "fig8c_snapshots.csv")
    assert all(float(r["rho"]) == 0.0 for r in snaps)
    man = json.loads((tmp_path / "fig8c_manifest.json").read_text())
    assert man["command"] == "evolve" and man["outputs"] == ["fig8c_snapshots.csv", "fig8c_diagnostics.csv"]


def test_outputs_are_byte_identical(tmp_path):
    cfg = _write(tmp_path, "short.json", {"evolution": {"t_end": 0.02, "record_every": 20, "snapshot_every": 50}})
    for d in ("a", "b"):
        assert main(["evolve", "fig9a", "--config", cfg, "--out", str(tmp_path / d), "--quiet"]) == 0
    for f in ("fig9a_snapshots.csv", "fig9a_diagnostics.csv"):
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()


def test_evolve_reports_fixed_point_failure(tmp_path):
    cfg = _write(tmp_path, "bad.json", {"evolution": {"t_end": 1.0, "dt": 0.5, "max_fp_iters": 5}})
    assert main(["evolve", "fig8c", "--config", cfg, "--out", str(tmp_path), "--quiet"]) == 4


@pytest.mark.parametrize("override", [{"evolution": {"dt": -1.0}}, {"potential": {"kind": "spline"}},
                                      {"initial": {"kind": "soliton", "E": 1.0, "epsilon": -1.0}}, {"schema": 7}])
def test_bad_evolve_config(tmp_path, override):
    cfg = _write(tmp_path, "bad.json", override)
    assert main(["evolve", "fig8c", "--config", cfg, "--out", str(tmp_path), "--quiet"]) == 2


def test_bad_invocations(tmp_path):
    assert main(["evolve", "nope"]) == 2
    assert main(["spectrum"]) == 2
    assert main(["frobnicate"]) == 2
    (tmp_path / "broken.json").write_text("{")
    assert main(["spectrum", "--config", str(tmp_path / "broken.json")]) == 2


def test_spectrum_linear_branches_are_flat(tmp_path):
    cfg = _write(tmp_path, "lin.json", {"q_a": [0.05, 0.3], "n_max": 1, "shooting": {"n_scan": 401}})
    assert main(["spectrum", "square-well", "--config", cfg, "--out", str(tmp_path), "--quiet"]) == 0
    rows = _rows(tmp_path / "square-well_branches.csv")
    for n in ("0", "1"):
        es = [float(r["E"]) for r in rows if r["n"] == n]
        assert len(es) == 2 and abs(es[0] - es[1]) < 1e-8


def test_spectrum_empty_result(tmp_path):
    cfg = _write(tmp_path, "none.json", {"q_a": [0.1], "E_range": [-0.5, -0.1], "n_max": 0,
                                         "shooting": {"n_scan": 101}})
    assert main(["spectrum", "square-well", "--config", cfg, "--out", str(tmp_path), "--quiet"]) == 3


def test_list_scenarios(capsys):
    assert main(["list-scenarios"]) == 0
    out = capsys.readouterr().out
    for name in ("fig7a", "fig7b", "fig8a", "fig8b", "fig8c", "fig9a", "fig9b", "fig9c", "fig10a", "fig10b",
                 "fig3a", "fig3b", "square-well"):
        assert name in out


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "nlspectra.cli", "delta-well", "--Omega", "1", "--epsilon", "1"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.strip() == "E = -0.125"
