import json
import warnings
from pathlib import Path

import pytest

from fibretrap import constants as C
from fibretrap.cli import main
from fibretrap.config import default_config_path, load_config, parse_config
from fibretrap.errors import ConfigError

from synthetic import write_dataset

ROOT = Path(__file__).resolve().parents[1]
PAPER_CFG = (ROOT / "paper.cfg").read_text()


def test_shipped_configs_identical():
    assert default_config_path().read_text() == PAPER_CFG


def test_defaults():
    rc = load_config()
    assert rc.fibre.radius_nm == 200.0 and rc.lasers["travelling"].wavenumber == 14319.0
    assert rc.table["standing"] == (6804.32, 1096.07)
    assert rc.states[0].hund_case == "b"
    assert len(rc.hash) == 16


@pytest.mark.parametrize("edit,match", [
    (("[laser.standing]", "[laser.other]"), "laser.standing"),
    (("amplitude_au = 8e-7", "amplitude_au = 8e-7\npower_au = 1e-6"), "not both"),
    (("amplitude_au = 8e-7", ""), "amplitude_au"),
    (("wavenumber_cm = 9244", "wavenumber_cm = 19244"), "larger wavenumber"),
    (("n1 = 1.4469", "n1 = 0.9"), "fibre"),
    (("source = table", "source = computed"), "manifest"),
    (("source = table", "source = magic"), "source"),
    (("radius_nm = 200", "radius_nm = wide"), "radius_nm"),
    (("[polarisability.standing]", "[polarisability.nope]"), "polarisability.standing"),
    (("isotope = 87", "isotope = 86"), "isotope"),
    (("planes = xz, xy, r, theta, z", "planes = xq"), "plane"),
    (("states = b:L=0,S=1,N=0,v=0,J=1,M=0", "states = b:L=0"), "state spec"),
])
def test_config_errors(edit, match):
    with pytest.raises(ConfigError, match=match):
        parse_config(PAPER_CFG.replace(*edit))


def test_parse_error_reports_line():
    with pytest.raises(ConfigError, match="line"):
        parse_config(PAPER_CFG + "\nnot a key value line\n")


def test_cartesian_override():
    text = PAPER_CFG + "\n[cartesian.travelling a:L=0,S=1,Sigma=1,v=0,J=1,M=0]\nxx = -2804.28\nzz = -3394.20\n"
    rc = parse_config(text)
    from fibretrap.config import state_tensors
    from fibretrap.polarisability import parse_state
    t1, _ = state_tensors(rc, parse_state("a:L=0,S=1,Sigma=1,v=0,J=1,M=0"))
    assert t1.cartesian_diag == (-2804.28, -2804.28, -3394.20)
    assert t1.alignment[2] == pytest.approx(0.2, abs=1e-5)


@pytest.mark.parametrize("x,to,back", [
    (123.4, C.nm_to_bohr, C.bohr_to_nm),
    (14319.0, C.cm_to_hartree, C.hartree_to_cm),
    (-4.0, C.mK_to_hartree, C.hartree_to_mK),
    (26.0, C.uK_to_hartree, C.hartree_to_uK),
])
def test_unit_round_trips(x, to, back):
    assert back(to(x)) == pytest.approx(x, rel=1e-12)


def _run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_cli_mode(tmp_path, capsys):
    code, out, _ = _run(["mode", "--out", str(tmp_path)], capsys)
    assert code == 0
    doc = json.loads((tmp_path / "mode.json").read_text())
    assert list(doc)[:2] == ["header", "fibre"]
    assert doc["header"]["config_hash"] == load_config().hash
    assert doc["travelling"]["beta_a"] == pytest.approx(2.03575, rel=1e-5)
    assert doc["standing"]["power_au"] == pytest.approx(4.30252e-6, rel=1e-4)
    assert doc["standing"]["standing_period_nm"] == pytest.approx(531.45, abs=0.05)


def test_cli_mode_override_conflict(tmp_path, capsys):
    code, _, err = _run(["mode", "--out", str(tmp_path), "--amplitude", "1e-6", "--power", "1e-6"], capsys)
    assert code == 2 and "mutually exclusive" in err
    code, _, _ = _run(["mode", "--out", str(tmp_path), "--laser", "standing", "--power", "1e-6"], capsys)
    assert code == 0
    doc = json.loads((tmp_path / "mode.json").read_text())
    assert doc["standing"]["power_au"] == pytest.approx(1e-6, rel=1e-12)


def test_cli_missing_laser_block(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text(PAPER_CFG.replace("[laser.travelling]", "[laser.unused]"))
    code, _, err = _run(["mode", "--config", str(cfg), "--out", str(tmp_path)], capsys)
    assert code == 2 and "laser.travelling" in err


def test_cli_polar_table(tmp_path, capsys):
    code, _, _ = _run(["polar", "--out", str(tmp_path), "--state", "a:L=0,S=1,Sigma=1,v=0,J=1,M=0",
                       "--state", "b:L=0,S=1,N=0,v=0,J=1,M=1"], capsys)
    assert code == 0
    a = json.loads((tmp_path / "polar_a_L_0_S_1_Sigma_1_v_0_J_1_M_0.json").read_text())
    assert a["tensors"][0]["alpha_ZZ"] == pytest.approx(-3394.20, abs=0.01)
    b = json.loads((tmp_path / "polar_b_L_0_S_1_N_0_v_0_J_1_M_1.json").read_text())
    assert b["tensors"][1]["alignment"] == pytest.approx({"a_X": 1 / 3, "a_Y": 1 / 3, "a_Z": 1 / 3})
    code, _, err = _run(["polar", "--out", str(tmp_path), "--scan", "9000", "9500", "10"], capsys)
    assert code == 2 and "computed" in err


def test_cli_bad_state_and_distance(tmp_path, capsys):
    assert _run(["polar", "--out", str(tmp_path), "--state", "q:L=0"], capsys)[0] == 2
    assert _run(["cp", "--out", str(tmp_path), "--distance", "-5"], capsys)[0] == 2
    assert _run(["nonsense"], capsys)[0] == 2
    assert _run(["mode", "--config", str(tmp_path / "missing.cfg")], capsys)[0] == 2


def test_cli_cp(tmp_path, capsys):
    code, out, _ = _run(["cp", "--out", str(tmp_path)], capsys)
    assert code == 0
    line = json.loads(out.strip().splitlines()[-1])
    assert list(line) == ["distance_nm", "shift_uK"]
    code, out2, _ = _run(["cp", "--out", str(tmp_path), "--distance", "400"], capsys)
    assert json.loads(out2)["shift_uK"] == pytest.approx(line["shift_uK"] / 8, rel=1e-12)


def test_cli_trap_deterministic(tmp_path, capsys):
    cfg = tmp_path / "small.cfg"
    cfg.write_text(PAPER_CFG.replace("grid_points = 121", "grid_points = 25"))
    for out in ("o1", "o2"):
        for cmd in (["trap", "grid"], ["trap", "analyze"]):
            assert main(cmd + ["--config", str(cfg), "--out", str(tmp_path / out)]) == 0
    capsys.readouterr()
    files = sorted(p.name for p in (tmp_path / "o1").iterdir())
    assert len(files) == 6
    for name in files:
        assert (tmp_path / "o1" / name).read_bytes() == (tmp_path / "o2" / name).read_bytes()
    xz = (tmp_path / "o1" / "trap_xz_b_L_0_S_1_N_0_v_0_J_1_M_0.csv").read_text().splitlines()
    assert xz[1].startswith("# config_hash: ") and xz[2].startswith("# units: ")
    z = sorted({float(l.split(",")[1]) for l in xz if not l.startswith("#")})
    assert (z[-1] - z[0]) * 200.0 == pytest.approx(531.45, abs=0.05)
    an = json.loads((tmp_path / "o1" / "trap_analysis_b_L_0_S_1_N_0_v_0_J_1_M_0.json").read_text())
    assert an["R_min"]["a"] == pytest.approx(1.694, abs=5e-3)
    assert an["U_min_mK"] == pytest.approx(-4.0, rel=0.1)


def _computed_config(tmp_path):
    manifest = write_dataset(tmp_path / "data", count=20)
    text = (PAPER_CFG.replace("source = table", "source = computed")
            .replace("# manifest = data/manifest.txt   (required when source = computed)", "manifest = data/manifest.txt"))
    cfg = tmp_path / "computed.cfg"
    cfg.write_text(text)
    assert manifest.exists()
    return cfg


def test_cli_polar_computed_scan(tmp_path, capsys):
    cfg = _computed_config(tmp_path)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        code = main(["polar", "--config", str(cfg), "--out", str(tmp_path / "o"), "--scan", "1000", "3000", "100"])
    capsys.readouterr()
    assert code == 0
    rows = [l for l in (tmp_path / "o" / "polar_scan_b_L_0_S_1_N_0_v_0_J_1_M_0.csv").read_text().splitlines()
            if not l.startswith("#")]
    alpha = [float(r.split(",")[1]) for r in rows]
    assert len(alpha) == 21 and all(a > 0 for a in alpha)
    assert all(b > a for a, b in zip(alpha, alpha[1:]))
    doc = json.loads((tmp_path / "o" / "polar_b_L_0_S_1_N_0_v_0_J_1_M_0.json").read_text())
    assert len(doc["tensors"][0]["nearest_resonances"]) == 10


def test_cli_trap_no_minimum_exit_code(tmp_path, capsys):
    cfg = tmp_path / "weak.cfg"
    cfg.write_text(PAPER_CFG.replace("amplitude_au = 8e-7", "amplitude_au = 1e-12"))
    code, _, err = _run(["trap", "analyze", "--config", str(cfg), "--out", str(tmp_path)], capsys)
    assert code == 3 and "NoMinimum" in err
    assert (tmp_path / "trap_noMinimum_b_L_0_S_1_N_0_v_0_J_1_M_0.csv").exists()
