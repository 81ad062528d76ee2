import csv
import warnings

import pytest

from noisemod import baselines, cli
from noisemod.model import NumericWarning
from noisemod.sweeps import BER_COLUMNS, CAPACITY_COLUMNS, CROSSOVER_COLUMNS, ENERGY_COLUMNS


def read(path):
    with open(path, encoding="utf-8") as fh:
        return list(csv.reader(fh))


def test_parse_range():
    assert cli.parse_range("-5:20:0.5") == (-5.0, 20.0, 0.5)
    assert cli.parse_range("3") == (3.0, 3.0, 1.0)
    with pytest.raises(cli.ConfigurationError):
        cli.parse_range("1:2")


def test_emit_csv_one_row(tmp_path):
    p = cli.emit_csv([{"x": 1.0, "y": 1 / 3}], tmp_path / "a.csv")
    lines = p.read_text(encoding="utf-8").splitlines()
    assert lines == ["x,y", "1,0.333333333"]


def test_emit_csv_sorts_and_formats(tmp_path):
    rows = [{"a": 2.0, "b": float("nan")}, {"a": -1.5, "b": 123456789.123}]
    p = cli.emit_csv(rows, tmp_path / "b.csv", ("a", "b"))
    assert read(p) == [["a", "b"], ["-1.5", "123456789"], ["2", "nan"]]


def test_emit_csv_empty(tmp_path):
    with pytest.raises(ValueError):
        cli.emit_csv([], tmp_path / "none.csv")
    assert not (tmp_path / "none.csv").exists()


def test_ber_awgn_with_mc(tmp_path, capsys):
    argv = ["--out", str(tmp_path), "ber-awgn", "--n", "10", "--snr", "-5:5:2.5",
            "--mc-trials", "2000", "--seed", "7", "--baselines"]
    assert cli.main(argv) == 0
    rows = read(tmp_path / "ber_awgn_n10.csv")
    assert tuple(rows[0]) == BER_COLUMNS
    assert len(rows) == 6
    assert [float(r[0]) for r in rows[1:]] == [-5.0, -2.5, 0.0, 2.5, 5.0]
    for r in rows[1:]:
        assert float(r[5]) <= float(r[3]) <= float(r[6]) or float(r[3]) < 0.02
    assert read(tmp_path / "ber_baselines.csv")[0] == ["snr_db", "ber_bpsk", "ber_ncfsk"]
    assert "AWGN, N=10" in capsys.readouterr().out


def test_rerun_is_byte_identical(tmp_path):
    argv = ["ber-fading", "--n", "10", "--snr", "0:6:3", "--channel", "div2-maxstat",
            "--mc-trials", "3000", "--seed", "11"]
    assert cli.main(["--out", str(tmp_path / "a")] + argv) == 0
    assert cli.main(["--out", str(tmp_path / "b"), "--strict"] + argv + ["--workers", "4", "--batch-size", "500"]) == 0
    a = (tmp_path / "a" / "ber_div2-maxstat_n10.csv").read_bytes()
    b = (tmp_path / "b" / "ber_div2-maxstat_n10.csv").read_bytes()
    assert a == b


def test_fading_without_mc_has_nan_columns(tmp_path):
    assert cli.main(["--out", str(tmp_path), "ber-fading", "--n", "50", "--snr", "10"]) == 0
    (row,) = read(tmp_path / "ber_rayleigh_n50.csv")[1:]
    assert row[4:7] == ["nan", "nan", "nan"] and row[7] == "0"
    assert (tmp_path / "ber_div2-ideal_n50.csv").exists()


def test_capacity_and_energy_schemas(tmp_path):
    assert cli.main(["--out", str(tmp_path), "capacity", "--n", "50", "--snr", "0:10:5"]) == 0
    assert tuple(read(tmp_path / "capacity_n50.csv")[0]) == CAPACITY_COLUMNS
    assert cli.main(["--out", str(tmp_path), "energy", "--freqs", "2.4e9",
                     "--calibrate", "2.4e9=41.7", "--distances", "1:50:1"]) == 0
    rows = read(tmp_path / "energy_2.4e+09Hz.csv")
    assert tuple(rows[0]) == ENERGY_COLUMNS and len(rows) == 51


def test_crossover_table(tmp_path, capsys):
    code = cli.main(["--out", str(tmp_path), "crossover", "--freqs", "2.4e9,5.725e9,24e9",
                     "--calibrate", "2.4e9=41.7"])
    assert code == 0
    rows = read(tmp_path / "crossover.csv")
    assert tuple(rows[0]) == CROSSOVER_COLUMNS
    dist = [float(r[1]) for r in rows[1:]]
    assert dist == pytest.approx([41.7, 17.4812227, 4.17], rel=1e-6)
    assert "41.7" in capsys.readouterr().out


def test_validate_exit_codes(tmp_path, capsys):
    assert cli.main(["validate"]) == 0
    assert cli.main(["validate", "--n", "0"]) == 2
    assert "n_samples" in capsys.readouterr().err
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("# sweep\nn = 0\nsnr = -5:20:1\n", encoding="utf-8")
    assert cli.main(["--config", str(cfg), "validate"]) == 2


def test_config_file_and_flag_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("n = 20\nsnr = 0:2:1\nout = " + str(tmp_path / "o") + "\n", encoding="utf-8")
    assert cli.main(["--config", str(cfg), "ber-awgn", "--n", "30"]) == 0
    assert (tmp_path / "o" / "ber_awgn_n30.csv").exists()
    assert not (tmp_path / "o" / "ber_awgn_n20.csv").exists()


def test_config_errors(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("colour = blue\n", encoding="utf-8")
    assert cli.main(["--config", str(cfg), "validate"]) == 2
    assert cli.main(["ber-fading", "--channel", "nakagami"]) == 2
    assert cli.main(["validate", "--snr", "5:0:1"]) == 2
    assert cli.main(["ber-awgn", "--mc-trials", "100", "--mc-target-errors", "5"]) == 2
    assert cli.main(["no-such-command"]) == 2


def test_numeric_warning_escalates_only_when_strict(tmp_path, monkeypatch):
    def noisy(scenario):
        warnings.warn("integral did not settle", NumericWarning)
        return 0.5

    monkeypatch.setattr(baselines, "noisemod_mutual_info", noisy)
    argv = ["capacity", "--n", "10", "--snr", "0"]
    assert cli.main(["--out", str(tmp_path)] + argv) == 0
    assert cli.main(["--out", str(tmp_path), "--strict"] + argv) == 3


def test_unwritable_output(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert cli.main(["--out", str(blocker / "sub"), "crossover"]) == 1
