import subprocess
import sys

import pytest

from rkbeam.cli import main
from rkbeam.kernelfield import MicArray
from rkbeam.directivity import Directivity
from rkbeam.simharness import ScenarioConfig, run_reconstruction, save_array, write_result


def _rows(path):
    return path.read_text().splitlines()[1:]


def test_reconstruct_default_sweep(tmp_path, capsys):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("eval_grid_n = 5\nn_mics = 8\n")
    assert main(["reconstruct", "--seed", "1", "--config", str(cfg), "--out", str(tmp_path)]) == 0
    assert len(_rows(tmp_path / "reconstruction.csv")) == 40
    out = capsys.readouterr().out
    assert out.count("mne_proposed_db=") == 40


def test_missing_config_exit_2(tmp_path, capsys):
    missing = tmp_path / "does_not_exist.cfg"
    assert main(["reconstruct", "--config", str(missing), "--out", str(tmp_path)]) == 2
    assert "does_not_exist.cfg" in capsys.readouterr().err


def test_bad_config_exit_2(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("nu_max = two\n")
    assert main(["beamform", "--config", str(cfg), "--out", str(tmp_path)]) == 2


def test_duplicated_mics_exit_3(tmp_path, capsys):
    z = Directivity(2, 1, [2.0, 0.3, -0.1j])
    arr = MicArray([[0.0, 0.0], [0.05, 0.01], [0.05, 0.01]], (Directivity.omni(2, 1), z, z))
    save_array(arr, tmp_path / "dup.txt")
    cfg = tmp_path / "dup.cfg"
    cfg.write_text(f"array_file = {tmp_path / 'dup.txt'}\neval_grid_n = 5\n")
    rc = main(["reconstruct", "--config", str(cfg), "--lambda", "0", "--snr", "inf",
               "--freq-list", "500", "--out", str(tmp_path)])
    assert rc == 3
    assert "singular" in capsys.readouterr().err


def test_selftest_output(capsys):
    assert main(["selftest"]) == 0
    out = capsys.readouterr().out
    for name in ("appendix_a", "appendix_b", "appendix_c", "hobson_corollary", "addition_theorem"):
        line = next(l for l in out.splitlines() if l.startswith(name))
        assert "PASS" in line and "max_error=" in line


def test_config_round_trip_via_meta(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    args = ["extract", "--seed", "3", "--freq-list", "400,1200", "--snr", "25", "--n-mics", "12"]
    assert main(args + ["--out", str(a)]) == 0
    assert main(["extract", "--config", str(a / "extraction.meta"), "--out", str(b)]) == 0
    assert (a / "extraction.csv").read_bytes() == (b / "extraction.csv").read_bytes()


def test_cli_matches_library(tmp_path):
    assert main(["reconstruct", "--seed", "2", "--freq-list", "700", "--lambda", "0.01",
                 "--out", str(tmp_path / "cli")]) == 0
    cfg = ScenarioConfig(seed=2, frequencies=(700.0,), lam=0.01)
    write_result(run_reconstruction(cfg), tmp_path / "lib")
    assert (tmp_path / "cli" / "reconstruction.csv").read_bytes() == (tmp_path / "lib" / "reconstruction.csv").read_bytes()


def test_pattern_subcommand(tmp_path, capsys):
    assert main(["pattern", "--freq", "1000", "--out", str(tmp_path)]) == 0
    rows = _rows(tmp_path / "pattern.csv")
    assert len(rows) == 360
    assert "peak_angle_deg" in capsys.readouterr().out


def test_beamform_writes_patterns(tmp_path):
    assert main(["beamform", "--freq-list", "1000", "--out", str(tmp_path)]) == 0
    assert len(_rows(tmp_path / "beamforming_patterns.csv")) == 360


def test_bad_flag_values():
    with pytest.raises(SystemExit):
        main(["reconstruct", "--snr", "loud"])
    with pytest.raises(SystemExit):
        main(["reconstruct", "--freq-list", "1,x"])


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "rkbeam", "--help"], capture_output=True, text=True)
    assert out.returncode == 0
    assert "selftest" in out.stdout
