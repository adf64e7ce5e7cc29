import csv
import json
import math

import numpy as np
import pytest

from atomfield.cli import (
    EXIT_ACCEPTANCE,
    EXIT_CONFIG,
    EXIT_IO,
    EXIT_OK,
    EXIT_REGIME,
    main,
    regime_report,
)
from atomfield.config import loads

REGIME = """
seed = 3
[params]
omega0 = 1.0
omega = 1e-3
gchi = 100.0
m = 1.0
"""
TIME = "[time]\nt_max = 0.2\nn_samples = 21\n"


def write(tmp_path, text, name="run.toml"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def read_csv(path):
    with open(path) as fh:
        rows = list(csv.reader(fh))
    return rows[0], np.array(rows[1:], dtype=float)


class TestValidate:
    def test_regime_pass(self, tmp_path, capsys):
        r = regime_report(loads(REGIME))
        assert (r.r1, r.r2, r.status) == (pytest.approx(1e3), pytest.approx(1e4), "PASS")
        assert main(["validate", "--config", write(tmp_path, REGIME)]) == EXIT_OK
        assert capsys.readouterr().out.startswith("PASS")

    def test_equal_frequencies_fail(self, tmp_path):
        cfg = REGIME.replace("omega = 1e-3", "omega = 1.0")
        assert regime_report(loads(cfg)).status == "FAIL"
        path = write(tmp_path, cfg)
        assert main(["validate", "--config", path]) == EXIT_OK
        assert main(["validate", "--config", path, "--require-regime"]) == EXIT_REGIME

    def test_zero_coupling(self):
        r = regime_report(loads(REGIME.replace("gchi = 100.0", "g = 0.0")))
        assert r.status == "FAIL" and "zero coupling" in r.message

    def test_warn_band(self):
        r = regime_report(loads(REGIME.replace("gchi = 100.0", "gchi = 5.0")))
        assert r.status == "WARN"

    def test_threshold_configurable(self):
        r = regime_report(loads(REGIME + "[regime]\nthreshold = 5000.0\n"))
        assert r.status == "WARN"

    def test_metadata_written(self, tmp_path):
        out = tmp_path / "o"
        main(["validate", "--config", write(tmp_path, REGIME), "--out", str(out)])
        meta = json.loads((out / "validate.json").read_text())
        assert meta["regime"]["status"] == "PASS" and meta["config"]["seed"] == 3


class TestEvolve:
    def test_pointer_state(self, tmp_path):
        cfg = REGIME + TIME + "[qubit]\nalpha = [0.7071067811865476, 0.0]\nbeta = [0.7071067811865476, 0.0]\n"
        out = tmp_path / "o"
        assert main(["evolve", "--config", write(tmp_path, cfg), "--out", str(out)]) == EXIT_OK
        header, data = read_csv(out / "evolve.csv")
        assert header == ["t", "rho_aa", "re_rho_ab", "im_rho_ab", "r_x", "r_y", "r_z",
                          "decay_factor"]
        mag = np.hypot(data[:, 2], data[:, 3])
        assert np.max(np.abs(mag - 0.5)) < 1e-15
        meta = json.loads((out / "metadata.json").read_text())
        assert meta["tau_dec"] == pytest.approx(math.sqrt(5e-4 / 1e-3) / (100 / math.sqrt(2e-3)))

    def test_basis_state(self, tmp_path):
        out = tmp_path / "o"
        main(["evolve", "--config", write(tmp_path, REGIME + TIME), "--out", str(out)])
        _, data = read_csv(out / "evolve.csv")
        assert np.array_equal(data[:, 6], data[:, 7])

    def test_seventeen_digits(self, tmp_path):
        out = tmp_path / "o"
        main(["evolve", "--config", write(tmp_path, REGIME + TIME), "--out", str(out)])
        line = (out / "evolve.csv").read_text().splitlines()[2]
        mantissa = line.split(",")[1].split("e")[0].lstrip("-").replace(".", "")
        assert len(mantissa) == 17

    def test_empty_time_block(self, tmp_path, capsys):
        assert main(["evolve", "--config", write(tmp_path, REGIME + "[time]\n")]) == EXIT_CONFIG
        assert "time" in capsys.readouterr().err

    def test_missing_time_block(self, tmp_path):
        assert main(["evolve", "--config", write(tmp_path, REGIME)]) == EXIT_CONFIG

    def test_io_error(self, tmp_path):
        blocker = tmp_path / "file"
        blocker.write_text("x")
        assert main(["evolve", "--config", write(tmp_path, REGIME + TIME),
                     "--out", str(blocker / "sub")]) == EXIT_IO

    def test_json_only(self, tmp_path):
        out = tmp_path / "o"
        cfg = REGIME + TIME + "[output]\nformats = ['json']\n"
        main(["evolve", "--config", write(tmp_path, cfg), "--out", str(out)])
        assert not (out / "evolve.csv").exists()
        assert len(json.loads((out / "evolve.json").read_text())["t"]) == 21

    def test_require_regime_blocks(self, tmp_path):
        cfg = REGIME.replace("omega = 1e-3", "omega = 1.0") + TIME
        assert main(["evolve", "--config", write(tmp_path, cfg), "--out", str(tmp_path / "o"),
                     "--require-regime"]) == EXIT_REGIME


class TestPointerScan:
    @pytest.mark.parametrize("ansatz", ["atom-field", "trivial", "jcm"])
    def test_self_test(self, tmp_path, ansatz):
        cfg = REGIME + f"[scan]\nansatz = '{ansatz}'\nresolution = 16\n"
        if ansatz == "jcm":
            cfg = cfg.replace("gchi = 100.0", "g = 1.0") + "times = [0.02, 0.05, 0.1]\n"
        out = tmp_path / "o"
        assert main(["pointer-scan", "--config", write(tmp_path, cfg), "--out", str(out),
                     "--self-test"]) == EXIT_OK
        header = (out / "pointer_scan.csv").read_text().splitlines()[0]
        assert header == "theta,phi,defect"
        minima = json.loads((out / "pointer_minima.json").read_text())
        if ansatz == "atom-field":
            assert len(minima["candidates"]) == 2

    def test_self_test_detects_missing_minima(self, tmp_path):
        # odd resolution leaves the pointer states off the grid
        cfg = REGIME + "[scan]\nresolution = 9\n"
        assert main(["pointer-scan", "--config", write(tmp_path, cfg),
                     "--out", str(tmp_path / "o"), "--self-test"]) == EXIT_ACCEPTANCE


class TestDecohere:
    def test_pointer_basis_series(self, tmp_path):
        cfg = (REGIME + "[time]\nt_max = 6.0\nn_samples = 601\n"
               "[qubit]\nalpha_p = [1.0, 0.0]\nbeta_p = [0.0, 0.0]\n")
        out = tmp_path / "o"
        assert main(["decohere", "--config", write(tmp_path, cfg), "--out", str(out)]) == EXIT_OK
        header, data = read_csv(out / "decohere.csv")
        t, im = data[:, 0], data[:, header.index("im_rho12")]
        assert np.max(np.abs(im + 0.5 * np.sin(t))) < 1e-15
        revivals = json.loads((out / "decohere.json").read_text())["revivals"]
        assert revivals[0]["time"] == pytest.approx(math.pi / 2, abs=0.01)


class TestCompare:
    def test_free_fidelity_one(self, tmp_path):
        cfg = (REGIME.replace("gchi = 100.0", "g = 0.0")
               + "[fock]\ncutoff = 8\n[time]\nt_max = 5.0\nn_samples = 11\n")
        out = tmp_path / "o"
        rc = main(["compare", "--config", write(tmp_path, cfg), "--out", str(out)])
        summary = json.loads((out / "compare_summary.json").read_text())
        assert abs(summary["min_fidelity"] - 1.0) < 1e-10
        assert summary["acceptance"] and rc == EXIT_OK

    def test_anti_regime_flagged(self, tmp_path):
        cfg = ("[params]\nomega0 = 1.0\nomega = 1.0\ngchi = 1.0\nm = 1.0\n"
               "[qubit]\ntheta = 1.1\nphi = 0.7\n"
               "[fock]\nstart = 16\nmax_cutoff = 1024\n"
               "[time]\nt_max = 5.0\nn_samples = 51\n")
        out = tmp_path / "o"
        rc = main(["compare", "--config", write(tmp_path, cfg), "--out", str(out)])
        summary = json.loads((out / "compare_summary.json").read_text())
        assert rc == EXIT_REGIME
        assert summary["verdict"] == "regime violated" and summary["min_fidelity"] < 0.9
        header, data = read_csv(out / "compare.csv")
        assert header[:2] == ["t", "fidelity"] and data.shape == (51, 6)


def test_determinism(tmp_path):
    path = write(tmp_path, REGIME + TIME + "[qubit]\ntheta = 1.1\nphi = 0.7\n")
    outs = []
    for k in range(2):
        out = tmp_path / f"o{k}"
        main(["evolve", "--config", path, "--out", str(out)])
        outs.append([(out / n).read_bytes() for n in ("evolve.csv", "evolve.json", "metadata.json")])
    assert outs[0] == outs[1]
