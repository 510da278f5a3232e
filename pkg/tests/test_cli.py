import csv
import io
import json
import math

import pytest

from jchm_dicke import __version__
from jchm_dicke import cli


def run(tmp_path, *args, name="out.csv"):
    out = tmp_path / name
    code = cli.main([*args, "--out", str(out)])
    return code, out


def read_rows(path):
    return list(csv.reader(io.StringIO(path.read_text(encoding="utf-8"))))


def assert_row_rule(rows):
    """Every row has all numeric fields or an error, never both."""
    header, body = rows[0], rows[1:]
    assert header[-1] == "error"
    for r in body:
        assert len(r) == len(header)
        fields, err = r[:-1], r[-1]
        if err:
            assert all(f == "" for f in fields)
        else:
            assert all(f != "" for f in fields)


class TestOutput:
    @pytest.mark.parametrize("command", ["onsite", "dicke-boundary", "ed-check", "fluct"])
    def test_deterministic(self, tmp_path, command):
        c1, o1 = run(tmp_path, command, name="a.csv")
        c2, o2 = run(tmp_path, command, name="b.csv")
        assert c1 == c2 == cli.EXIT_OK
        assert o1.read_bytes() == o2.read_bytes()

    def test_lf_line_endings_and_round_trip_floats(self, tmp_path):
        code, out = run(tmp_path, "onsite", "--set", "delta=0.3")
        assert code == 0
        raw = out.read_bytes()
        assert b"\r" not in raw and raw.endswith(b"\n")
        rows = read_rows(out)
        assert rows[0] == ["n", "sigma", "delta_over_g", "energy_over_g", "mixing_angle",
                           "chi_n_over_g", "error"]
        assert_row_rule(rows)
        for r in rows[1:]:
            for f in r[2:-1]:
                assert repr(float(f)) == f

    def test_onsite_values(self, tmp_path):
        _, out = run(tmp_path, "onsite", "--set", "delta=0.5", "--set", "mu_rel=0.3",
                     "--set", "n_max=2")
        rows = {(int(r[0]), int(r[1])): float(r[3]) for r in read_rows(out)[1:]}
        assert rows[(2, 1)] == pytest.approx(-0.6 + 0.25 + math.sqrt(2.0625), abs=1e-12)
        assert rows[(0, -1)] == 0.0

    def test_boundary_columns(self, tmp_path):
        code, out = run(tmp_path, "boundary", "--set", "n=1", "--set", "delta=0.0",
                        "--set", "J_count=3")
        assert code == 0
        rows = read_rows(out)
        assert rows[0][:-1] == ["n", "delta", "J_over_g", "mu_minus_omega_c_over_g", "branch"]
        at_zero = sorted(float(r[3]) for r in rows[1:] if float(r[2]) == 0.0)
        assert at_zero == pytest.approx([-1.0, -(math.sqrt(2) - 1)], abs=1e-12)

    def test_energies_normalized_by_g(self, tmp_path):
        _, a = run(tmp_path, "onsite", "--set", "delta=1.0", "--set", "g=2", name="a.csv")
        _, b = run(tmp_path, "onsite", "--set", "delta=0.5", name="b.csv")
        assert a.read_bytes() == b.read_bytes()

    def test_sidecar(self, tmp_path):
        code, out = run(tmp_path, "spectrum", "--set", "k_count=5")
        assert code == 0
        side = json.loads((tmp_path / "out.csv.json").read_text())
        assert side["command"] == "spectrum"
        assert side["version"] == __version__
        assert side["energy_unit"] == "g"
        assert side["config"]["k_count"] == 5
        assert side["config"]["J_factor"] == [0.5, 1.0, 1.5]
        assert side["tolerances"]["goldstone"] == 1e-8

    def test_gnuplot_script(self, tmp_path):
        code = cli.main(["dicke-boundary", "--out", str(tmp_path / "d.csv"), "--gnuplot"])
        assert code == 0
        gp = (tmp_path / "d.csv.gp").read_text()
        assert "'d.csv' using 1:3" in gp
        assert gp.startswith("set datafile separator ','")

    def test_tc_columns(self, tmp_path):
        code, out = run(tmp_path, "tc", "--set", "mu_d=[-3.0,-1.0]", "--set", "J_list=[10]")
        assert code == 0
        rows = read_rows(out)
        assert rows[0] == ["delta_d_over_g", "mu_d_over_g", "Tc_jchm_J10_over_g",
                           "Tc_dicke_over_g", "error"]
        assert float(rows[2][3]) == 0.0  # inside the lobe
        assert float(rows[1][3]) > 0.0
        assert_row_rule(rows)


class TestConfig:
    def test_precedence(self, tmp_path):
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps({"delta": 0.2, "n_max": 2}))
        cli.main(["onsite", "--config", str(cfg), "--set", "n_max=1", "--out",
                  str(tmp_path / "o.csv")])
        side = json.loads((tmp_path / "o.csv.json").read_text())
        assert side["config"]["delta"] == 0.2
        assert side["config"]["n_max"] == 1

    def test_range_expansion(self):
        cmd = cli.COMMANDS["dicke-boundary"]
        cfg = cli.resolve_config(cmd, {"delta_d": {"start": -3, "stop": -1, "count": 3}}, [])
        assert [p["delta_d"] for p in cli.sweep_points(cmd, cfg)] == [-3.0, -2.0, -1.0]

    def test_sweep_order(self):
        cmd = cli.COMMANDS["fluct"]
        cfg = cli.resolve_config(cmd, None, ["mu_rel=[-0.7,-0.6]", "J=[0.0,0.01]"])
        pts = [(p["mu_rel"], p["J"]) for p in cli.sweep_points(cmd, cfg)]
        assert pts == [(-0.7, 0.0), (-0.7, 0.01), (-0.6, 0.0), (-0.6, 0.01)]

    @pytest.mark.parametrize("args", [
        ["--set", "bogus=1"],
        ["--set", "novalue"],
        ["--set", "g=-1"],
        ["--set", "n_max=[1,2]"],
        ["--set", 'delta={"start": 0, "stop": 1, "count": 0}'],
        ["--set", "delta=[]"],
        ["--workers", "0"],
    ])
    def test_config_errors(self, tmp_path, capsys, args):
        code, out = run(tmp_path, "onsite", *args)
        assert code == cli.EXIT_CONFIG
        err = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
        assert err["error"] == "config"
        assert not out.exists()

    def test_bad_json_file(self, tmp_path):
        cfg = tmp_path / "c.json"
        cfg.write_text("{not json")
        assert run(tmp_path, "onsite", "--config", str(cfg))[0] == cli.EXIT_CONFIG

    def test_unknown_command(self, tmp_path):
        assert run(tmp_path, "nonsense")[0] == cli.EXIT_CONFIG

    def test_missing_config_file_is_io_error(self, tmp_path):
        assert run(tmp_path, "onsite", "--config", str(tmp_path / "nope.json"))[0] == \
            cli.EXIT_IO

    def test_unwritable_output(self, tmp_path, capsys):
        code = cli.main(["onsite", "--out", str(tmp_path / "missing" / "o.csv")])
        assert code == cli.EXIT_IO
        assert json.loads(capsys.readouterr().err.strip())["error"] == "io"


class TestRowErrors:
    def test_failing_row_does_not_stop_sweep(self, tmp_path):
        code, out = run(tmp_path, "ed-check", "--set", "J=[0.01,-1.0,0.05]")
        assert code == cli.EXIT_OK
        rows = read_rows(out)
        assert_row_rule(rows)
        errors = [r[-1] for r in rows[1:]]
        assert errors[0] == "" and errors[2] == ""
        assert errors[1].startswith("ValueError") and '"J": -1.0' in errors[1]

    def test_all_rows_failing_is_fatal(self, tmp_path, capsys):
        code, out = run(tmp_path, "ed-check", "--set", "n_sites=9")
        assert code == cli.EXIT_SOLVER
        assert json.loads(capsys.readouterr().err.strip())["error"] == "solver"
        rows = read_rows(out)
        assert_row_rule(rows)
        assert all(r[-1] for r in rows[1:])


class TestWorkers:
    def test_pool_preserves_order(self, tmp_path):
        args = ["fluct", "--set", "J=[0.0,0.01,0.02,0.03,0.05]", "--set", "n_k=16"]
        c1 = cli.main(args + ["--out", str(tmp_path / "a.csv")])
        c2 = cli.main(args + ["--out", str(tmp_path / "b.csv"), "--workers", "3"])
        assert c1 == c2 == 0
        assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
