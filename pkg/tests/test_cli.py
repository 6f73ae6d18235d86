"""End-to-end runs of the command-line front end."""

import random

import pytest

from stpsweep import parse_blif, write_blif
from stpsweep.cli import main
from helpers import random_network, sweep_fixture
from test_simulator import PATTERN_BLOCK, two_target_example

AND_BLIF = ".model a\n.inputs x y\n.outputs o\n.names x y o\n11 1\n.end\n"
OR_BLIF = ".model b\n.inputs x y\n.outputs o\n.names x y o\n11 1\n01 1\n10 1\n.end\n"


@pytest.fixture
def example_files(tmp_path):
    net, _ = two_target_example()
    net_path = tmp_path / "example.blif"
    net_path.write_text(write_blif(net))
    pat_path = tmp_path / "patterns.txt"
    pat_path.write_text(PATTERN_BLOCK)
    return net_path, pat_path


class TestSim:
    def test_targets_mode_support_exhaustive(self, example_files, capsys):
        net_path, pat_path = example_files
        rc = main([
            "sim", str(net_path), "--pattern-file", str(pat_path),
            "--targets", "7,8", "--mode", "targets",
        ])
        assert rc == 0
        out = capsys.readouterr().out.strip().splitlines()
        assert out[0].split("\t") == ["7", "1110"]
        assert out[1].split("\t") == ["8", "11110001"]

    def test_mode_all_inverter_chain(self, tmp_path, capsys):
        text = (".model chain\n.inputs a\n.outputs y2\n"
                ".names a y1\n0 1\n.names y1 y2\n0 1\n.end\n")
        p = tmp_path / "chain.blif"
        p.write_text(text)
        rc = main(["sim", str(p), "--patterns", "8", "--seed", "5"])
        assert rc == 0
        lines = dict(
            ln.split("\t") for ln in capsys.readouterr().out.strip().splitlines()
        )
        flip = str.maketrans("01", "10")
        assert lines["y1"] == lines["a"].translate(flip)
        assert lines["y2"] == lines["a"]

    def test_same_seed_same_output(self, example_files, capsys):
        net_path, _ = example_files
        main(["sim", str(net_path), "--patterns", "32", "--seed", "9"])
        first = capsys.readouterr().out
        main(["sim", str(net_path), "--patterns", "32", "--seed", "9"])
        assert capsys.readouterr().out == first

    def test_parse_error_exit_code(self, tmp_path, capsys):
        p = tmp_path / "bad.blif"
        p.write_text(".model x\n.names a y\nzz 1\n.end\n")
        assert main(["sim", str(p)]) == 3

    def test_missing_file(self, capsys):
        assert main(["sim", "/nonexistent/net.blif"]) == 3


class TestSweepCmd:
    def test_fixture_reduces_and_verifies(self, tmp_path, capsys):
        net = sweep_fixture(42)
        src = tmp_path / "in.blif"
        dst = tmp_path / "out.blif"
        src.write_text(write_blif(net))
        rc = main(["sweep", str(src), str(dst), "--base-patterns", "64", "--seed", "3"])
        assert rc == 0
        out = capsys.readouterr().out.splitlines()
        header_idx = out.index("gate,result,sat_calls,total_sat_calls,sim_time_s,total_time_s")
        row = out[header_idx + 1].split(",")
        gate, result = int(row[0]), int(row[1])
        assert result < gate
        assert main(["cec", str(src), str(dst)]) == 0
        assert capsys.readouterr().out.strip().splitlines()[-1] == "equivalent"

    def test_irredundant_net(self, tmp_path, capsys):
        src = tmp_path / "in.blif"
        dst = tmp_path / "out.blif"
        src.write_text(AND_BLIF)
        rc = main(["sweep", str(src), str(dst)])
        assert rc == 0
        out = capsys.readouterr().out.splitlines()
        row = out[out.index("gate,result,sat_calls,total_sat_calls,sim_time_s,total_time_s") + 1]
        gate, result = row.split(",")[:2]
        assert gate == result == "1"


class TestCecCmd:
    def test_equivalent(self, tmp_path, capsys):
        a = tmp_path / "a.blif"
        a.write_text(AND_BLIF)
        assert main(["cec", str(a), str(a)]) == 0
        assert "equivalent" in capsys.readouterr().out

    def test_inequivalent_with_ce(self, tmp_path, capsys):
        a = tmp_path / "a.blif"
        b = tmp_path / "b.blif"
        a.write_text(AND_BLIF)
        b.write_text(OR_BLIF)
        assert main(["cec", str(a), str(b)]) == 1
        out = capsys.readouterr().out
        assert "inequivalent" in out and "counterexample" in out

    def test_interface_mismatch(self, tmp_path, capsys):
        a = tmp_path / "a.blif"
        b = tmp_path / "b.blif"
        a.write_text(AND_BLIF)
        b.write_text(".model c\n.inputs x\n.outputs o\n.names x o\n1 1\n.end\n")
        assert main(["cec", str(a), str(b)]) == 3


class TestProveCmd:
    def test_implication_identity(self, capsys):
        assert main(["prove", "a->b", "~a|b"]) == 0
        assert capsys.readouterr().out.strip() == "proved"

    def test_refuted_with_assignment(self, capsys):
        assert main(["prove", "a&b", "a|b"]) == 1
        out = capsys.readouterr().out
        assert "refuted" in out
        assert "a=1 b=0" in out or "a=0 b=1" in out

    def test_reflexive(self, capsys):
        assert main(["prove", "a", "a"]) == 0

    def test_parse_error(self, capsys):
        assert main(["prove", "a&", "a"]) == 3


class TestStatsCmd:
    def test_reports_counts(self, tmp_path, capsys):
        net, _ = two_target_example()
        p = tmp_path / "n.blif"
        p.write_text(write_blif(net))
        assert main(["stats", str(p)]) == 0
        out = dict(
            ln.split("=") for ln in capsys.readouterr().out.strip().splitlines()
        )
        assert out["pis"] == "5"
        assert out["pos"] == "2"
        assert out["luts"] == "6"
        assert out["levels"] == "3"


class TestUsage:
    def test_no_command(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main([])
        assert exc.value.code == 2

    def test_unknown_flag(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["sim", "x.blif", "--bogus"])
        assert exc.value.code == 2
