import csv
import io
import json
import shutil
import subprocess

import pytest

from jplab.cli import DEFAULTS, load_config, main, threads
from jplab.errors import ConfigError


def run(argv, capsys=None):
    buf = io.StringIO()
    code = main(argv, stdout=buf)
    err = capsys.readouterr().err if capsys is not None else ""
    return code, buf.getvalue(), err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


@pytest.fixture
def config(tmp_path):
    def write(payload):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps(payload))
        return str(path)

    return write


class TestTk:
    def test_order_one(self, capsys):
        assert run(["tk", "1"], capsys)[:2] == (0, "0\n")

    def test_order_two(self, capsys):
        code, out, err = run(["tk", "2"], capsys)
        assert (code, out) == (0, "-1 AB\n") and "matches golden" in err

    def test_order_six_warns(self, capsys):
        code, out, err = run(["tk", "6"], capsys)
        assert code == 0 and out.strip() and "no golden entry" in err

    def test_unsupported_order(self, capsys):
        assert run(["tk", "9"], capsys)[0] == 64

    def test_writes_file(self, tmp_path, capsys):
        run(["tk", "3", "--out", str(tmp_path)], capsys)
        assert (tmp_path / "tk_3.txt").read_text().split("\n")[:3] == ["-1 AAB", "-1 ABB", "1/2 ABAB"]


class TestExitCodes:
    def test_unknown_command(self):
        with pytest.raises(SystemExit) as err:
            main(["nope"])
        assert err.value.code == 64

    def test_bad_json(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        assert run(["verify-halfline", "--config", str(path)], capsys)[0] == 64

    def test_missing_file(self, tmp_path, capsys):
        assert run(["spectra", "--config", str(tmp_path / "none.json")], capsys)[0] == 64

    @pytest.mark.parametrize(
        "payload",
        [{"bogus": 1}, {"tolerance": -1}, {"trials": -3}, {"trials": 1.5}, [1, 2]],
    )
    def test_invalid_values(self, config, capsys, payload):
        code, _, err = run(["verify-product", "--config", config(payload)], capsys)
        assert code == 64 and "config error" in err

    def test_bad_potential(self, config, capsys):
        cfg = config({"potential": {"name": "no_such_preset"}})
        assert run(["verify-disk", "--config", cfg], capsys)[0] == 64

    @pytest.mark.parametrize("seed", ["-1", str(2**64)])
    def test_seed_range(self, capsys, seed):
        assert run(["verify-product", "--trials", "1", "--seed", seed], capsys)[0] == 64

    def test_threshold_failure(self, config, capsys):
        cfg = config({"trials": 5, "tolerance": 1e-300})
        assert run(["verify-product", "--config", cfg, "--seed", "3"], capsys)[0] == 2


class TestProduct:
    def test_zero_trials(self, capsys):
        code, out, _ = run(["verify-product", "--trials", "0"], capsys)
        assert code == 0 and out == "trial,k,dim,residual\n"

    def test_passes(self, capsys):
        code, out, _ = run(["verify-product", "--trials", "60", "--seed", "7"], capsys)
        table = rows(out)
        assert code == 0 and len(table) == 60
        assert max(float(r["residual"]) for r in table) <= 1e-9

    def test_deterministic(self, tmp_path, capsys):
        a, b = tmp_path / "a", tmp_path / "b"
        run(["verify-product", "--trials", "40", "--seed", "11", "--out", str(a)], capsys)
        run(["verify-product", "--trials", "40", "--seed", "11", "--out", str(b)], capsys)
        first = (a / "verify_product.csv").read_bytes()
        assert first == (b / "verify_product.csv").read_bytes()
        _, other, _ = run(["verify-product", "--trials", "40", "--seed", "12"], capsys)
        assert other.encode() != first

    def test_thread_cap_does_not_change_output(self, monkeypatch, capsys):
        _, many, _ = run(["verify-product", "--trials", "30", "--seed", "5"], capsys)
        monkeypatch.setenv("JPLAB_THREADS", "1")
        assert threads() == 1
        assert run(["verify-product", "--trials", "30", "--seed", "5"], capsys)[1] == many

    def test_bad_thread_cap(self, monkeypatch, capsys):
        monkeypatch.setenv("JPLAB_THREADS", "zero")
        with pytest.raises(ConfigError):
            threads()
        assert run(["tk", "2"], capsys)[0] == 64


class TestHalfline:
    def test_free_grid(self, config, capsys):
        cfg = config({"potential": {"name": "zero", "params": {"cutoff": 2.0}}, "z": [[-1, 1], [2, 0.5], [0, 3]]})
        code, out, _ = run(["verify-halfline", "--config", cfg], capsys)
        table = rows(out)
        assert code == 0 and len(table) == 3
        for r in table:
            assert max(float(r[c]) for c in ("det_d_residual", "det_n_residual", "chain_residual")) <= 1e-10

    def test_well_subset(self, config, capsys):
        code, out, _ = run(["verify-halfline", "--config", config({"z": [[-2, 0.5], [4, 1]]})], capsys)
        assert code == 0 and all(r["status"] == "pass" for r in rows(out))


class TestDisk:
    SMALL = {"M_max": 12, "n_radial": 80, "lemma_modes": 2}

    def test_columns_and_append(self, config, tmp_path, capsys):
        cfg = config(self.SMALL)
        out = tmp_path / "o"
        assert run(["verify-disk", "--config", cfg, "--out", str(out)], capsys)[0] == 0
        run(["verify-disk", "--config", cfg, "--out", str(out)], capsys)
        text = (out / "verify_disk.csv").read_text()
        header = "tag,z_re,z_im,lhs_re,lhs_im,rhs_re,rhs_im,t2_re,t2_im,residual,M_max,n_radial"
        assert text.splitlines()[0] == header and text.count("tag,") == 1
        table = rows(text)
        assert len(table) == 2 * (2 + 3)
        assert [r["tag"] for r in table[:3]] == ["benchmark:theorem42", "benchmark:remark44", "benchmark:lemma35_m0"]

    def test_zero_potential(self, config, capsys):
        cfg = config({**self.SMALL, "potential": {"name": "zero"}})
        code, out, _ = run(["verify-disk", "--config", cfg], capsys)
        assert code == 0 and max(float(r["residual"]) for r in rows(out)) < 1e-10

    def test_truncation_warning(self, config, capsys):
        code, _, err = run(["verify-disk", "--config", config({**self.SMALL, "M_max": 1})], capsys)
        assert "warning: TruncationWarning" in err and code in (0, 2)

    def test_higher_order_rejected(self, config, capsys):
        assert run(["verify-disk", "--config", config({"k": 3})], capsys)[0] == 64


class TestSpectra:
    def test_free_dirichlet(self, config, capsys):
        cfg = config({"potential": {"name": "zero"}, "bc": "D", "window": [0, 20], "M_max": 4})
        code, out, _ = run(["spectra", "--config", cfg], capsys)
        assert code == 0
        assert any(r["m"] == "0" and abs(float(r["lambda"]) - 5.7832) < 1e-4 for r in rows(out))

    def test_stock_well(self, capsys):
        code, out, _ = run(["spectra"], capsys)
        table = rows(out)
        assert code == 0 and {r["bc"] for r in table} == {"D", "N"}
        assert all(float(r["delta"]) <= 1e-6 for r in table)


class TestXiScan:
    def test_zero_potential(self, config, capsys):
        cfg = config({"potential": {"name": "zero"}, "lambdas": [-2.0, 3.0, 10.0], "n_radial": 40})
        code, out, _ = run(["xi-scan", "--config", cfg], capsys)
        table = rows(out)
        assert code == 0 and len(table) == 3
        assert all(float(r["xi_d"]) == pytest.approx(0, abs=1e-12) for r in table)

    def test_on_spectrum_flagged(self, config, capsys):
        cfg = config({"potential": {"name": "zero"}, "lambdas": [5.783185962946784, 4.0], "n_radial": 40})
        code, out, _ = run(["xi-scan", "--config", cfg], capsys)
        assert code == 0 and [r["status"] for r in rows(out)] == ["on_spectrum", "pass"]

    def test_stock_well_subset(self, config, capsys):
        cfg = config({"lambdas": [-3.0, 4.0, 11.0]})
        code, out, _ = run(["xi-scan", "--config", cfg], capsys)
        assert code == 0 and all(r["status"] == "pass" for r in rows(out))


def test_config_defaults_roundtrip():
    for command in DEFAULTS:
        cfg = load_config(command)
        assert cfg.seed == 0 and cfg.out is None


@pytest.mark.skipif(shutil.which("jplab") is None, reason="console script not installed")
def test_console_script():
    out = subprocess.run(["jplab", "tk", "2"], capture_output=True, text=True)
    assert out.returncode == 0 and out.stdout == "-1 AB\n"
