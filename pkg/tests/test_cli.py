"""Command-line frontend and JSON config handling."""

import json
import math
import subprocess
import sys

import pytest

from kondoqet import cli
from kondoqet.config import ConfigError, RunConfig, config_from_dict, dump_config, load_config, parse_config
from kondoqet.sweep import CSV_COLUMNS


def run(argv, capsys):
    code = cli.main(argv)
    out, err = capsys.readouterr()
    return code, out, err


class TestConfig:
    def test_empty_document_gives_defaults(self):
        cfg = parse_config("")
        assert cfg.model.N == 8 and cfg.model.n_A == 4 and cfg.model.n_B == 7 and cfg.model.J == 0.5
        assert cfg.sweep.axis1.name == "Delta" and cfg.sweep.axis2.name == "B"
        assert parse_config("{}") == cfg

    def test_out_of_range_site_named(self):
        with pytest.raises(ConfigError, match="n_B"):
            parse_config('{"N": 3, "n_B": 7}')

    def test_unknown_key(self):
        with pytest.raises(ConfigError, match="bogus"):
            parse_config('{"bogus": 1}')
        with pytest.raises(ConfigError, match="width"):
            parse_config('{"axis1": {"name": "B", "lo": 0, "hi": 1, "steps": 3, "width": 2}}')

    def test_parse_error_position(self):
        with pytest.raises(ConfigError, match=r"line 2, column \d+"):
            parse_config('{"N": 8,\n "J": }')

    @pytest.mark.parametrize(
        "doc,key",
        [
            ({"J": "big"}, "J"),
            ({"N": 8.5}, "N"),
            ({"include_impurity_bulk_bond": 1}, "include_impurity_bulk_bond"),
            ({"axis1": {"name": "B", "lo": 1, "hi": 0, "steps": 3}}, "axis1"),
            ({"cut": 9}, "cut"),
            ({"outputs": "s_lr"}, "outputs"),
        ],
    )
    def test_validation_names_key(self, doc, key):
        with pytest.raises(ConfigError, match=key):
            config_from_dict(doc)

    def test_non_finite_rejected(self):
        with pytest.raises(ConfigError):
            parse_config('{"B": Infinity}')

    def test_round_trip(self, tmp_path):
        doc = {
            "N": 6,
            "Delta": -0.5,
            "n_A": 3,
            "n_B": 6,
            "axis1": {"name": "Jk", "lo": 0.0, "hi": 1.0, "steps": 5},
            "axis2": None,
            "outputs": ["s_lr"],
            "cut": 2,
            "minimal_grid": {"lo": 0.5, "hi": 2.0, "steps": 3},
        }
        cfg = config_from_dict(doc)
        path = tmp_path / "c.json"
        path.write_text(dump_config(cfg))
        again = load_config(path)
        assert again == cfg
        assert isinstance(again, RunConfig)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="nope.json"):
            load_config(tmp_path / "nope.json")


class TestCommands:
    def test_ground_pair(self, capsys):
        code, out, _ = run(["ground", "--n", "2", "--j", "1", "--delta", "1", "--jk", "0", "--b", "0", "--impurity-bulk-bond"], capsys)
        assert code == 0
        rec = json.loads(out)
        assert rec["e0"] == pytest.approx(-0.75, abs=1e-12)
        assert rec["gap"] == pytest.approx(1.0, abs=1e-12)

    def test_ground_pair_without_bulk_bond(self, capsys):
        # the impurity only talks to the host through J_K, so with J_K=0 the pair is free
        code, out, _ = run(["ground", "--n", "2", "--j", "1", "--delta", "1", "--jk", "0", "--b", "0"], capsys)
        assert code == 0
        assert json.loads(out)["e0"] == 0.0

    def test_qet_default_point(self, capsys):
        argv = ["qet", "--n", "8", "--delta", "1.0", "--b", "0.4", "--jk", "0.2", "--na", "4", "--nb", "7", "--coupled-site", "2"]
        code, out, _ = run(argv, capsys)
        assert code == 0
        assert out.count("\n") == 1
        rec = json.loads(out)
        assert rec["e_teleported"] > 0
        assert rec["bound_margin"] >= -1e-10
        assert rec["delta_S_cut"] == 5

    def test_spectrum(self, capsys):
        code, out, _ = run(["spectrum", "--n", "6", "--cut", "3"], capsys)
        rec = json.loads(out)
        assert code == 0 and rec["cut"] == 3
        assert len(rec["coefficients"]) == 8
        assert sum(c * c for c in rec["coefficients"]) == pytest.approx(1.0, abs=1e-12)

    def test_sweep_csv_and_svg(self, capsys, tmp_path):
        prefix = tmp_path / "map"
        argv = [
            "sweep", "--n", "6", "--na", "3", "--nb", "5",
            "--axis1", "Delta:-1:1:2", "--axis2", "B:0.1:0.5:3",
            "--emit", "csv,svg", "--outputs", "s_lr,e_teleported", "--svg-prefix", str(prefix),
        ]
        code, out, _ = run(argv, capsys)
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == ",".join(CSV_COLUMNS) and len(lines) == 7
        for obs in ("s_lr", "e_teleported"):
            svg = (tmp_path / f"map_{obs}.svg").read_text()
            assert svg.startswith("<svg") and svg.count('width="12"') == 6

    def test_out_file(self, capsys, tmp_path):
        target = tmp_path / "g.json"
        code, out, _ = run(["ground", "--n", "4", "--out", str(target)], capsys)
        assert code == 0 and out == ""
        assert "e0" in json.loads(target.read_text())

    def test_config_then_flags(self, capsys, tmp_path):
        path = tmp_path / "c.json"
        path.write_text(json.dumps({"N": 4, "B": 5.0, "n_A": 2, "n_B": 4}))
        _, out, _ = run(["ground", "--config", str(path)], capsys)
        assert json.loads(out)["m"] == pytest.approx(-1.0)
        _, out, _ = run(["ground", "--config", str(path), "--b", "0"], capsys)
        assert json.loads(out)["m"] == pytest.approx(0.0, abs=1e-12)

    def test_rydberg(self, capsys):
        code, out, _ = run(["rydberg", "--axis1", "B:0:1:3"], capsys)
        lines = out.splitlines()
        assert code == 0 and len(lines) == 7
        d_col = CSV_COLUMNS.index("d")
        assert [line.split(",")[d_col] for line in lines[1:]] == ["1", "1", "1", "2", "2", "2"]

    def test_minimal(self, capsys):
        code, out, _ = run(["minimal", "--lo", "0.5", "--hi", "2", "--steps", "2"], capsys)
        lines = out.splitlines()
        assert code == 0 and lines[0].startswith("h,k,lambda") and len(lines) == 5
        assert all(float(line.split(",")[-1]) >= -1e-10 for line in lines[1:])

    def test_deterministic_output(self, capsys):
        argv = ["qet", "--n", "6", "--na", "3", "--nb", "5"]
        assert run(argv, capsys)[1] == run(argv, capsys)[1]


class TestErrors:
    def test_missing_config(self, capsys):
        code, _, err = run(["sweep", "--config", "missing.json"], capsys)
        assert code == 2
        assert "missing.json" in err

    def test_bad_geometry(self, capsys):
        code, _, err = run(["qet", "--na", "6", "--nb", "7"], capsys)
        assert code == 2 and "n_A - n_B" in err

    def test_bad_flag(self, capsys):
        with pytest.raises(SystemExit) as info:
            cli.main(["ground", "--nope"])
        assert info.value.code == 2

    def test_bad_axis_syntax(self, capsys):
        with pytest.raises(SystemExit) as info:
            cli.main(["sweep", "--axis1", "Delta:-1:1"])
        assert info.value.code == 2

    def test_svg_needs_prefix(self, capsys):
        code, _, err = run(["sweep", "--axis1", "Delta:-1:1:2", "--axis2", "B:0:1:2", "--emit", "svg"], capsys)
        assert code == 2 and "svg-prefix" in err

    def test_unwritable_output(self, capsys, tmp_path):
        code, _, err = run(["ground", "--n", "4", "--out", str(tmp_path / "no" / "dir.json")], capsys)
        assert code == 1 and "cannot write" in err

    def test_compute_error_exit_one(self, capsys):
        code, _, err = run(["minimal", "--lo", "0.5", "--hi", "0.5", "--steps", "1"], capsys)
        assert code == 0
        code, _, err = run(["ground", "--n", "13"], capsys)
        assert code == 2 and "N=13" in err


@pytest.mark.parametrize("command", ["ground", "qet", "spectrum", "sweep", "rydberg", "minimal"])
def test_help_lists_units(command, capsys):
    with pytest.raises(SystemExit):
        cli.main([command, "--help"])
    out = capsys.readouterr().out
    assert "--out" in out
    if command != "minimal":
        assert "[energy]" in out and "--jk" in out


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "kondoqet", "ground", "--n", "4"], capture_output=True, text=True, check=False
    )
    assert proc.returncode == 0
    assert math.isfinite(json.loads(proc.stdout)["e0"])
