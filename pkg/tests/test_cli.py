import csv
import io
import subprocess
import sys

import numpy as np
import pytest

from apcsf import cli
from apcsf.curves import regular_polygon
from apcsf.geometry import write_polygon


def run(*argv):
    return cli.main(list(argv))


def test_evolve_writes_one_row_per_step(tmp_path, capsys):
    out = tmp_path / "d.csv"
    assert run("evolve", "--n", "16", "--tau", "0.01", "--t-end", "0.1", "--out-csv", str(out)) == 0
    rows = list(csv.DictReader(out.open()))
    assert len(rows) == 11
    assert list(rows[0]) == ["step", "t", "perimeter", "area", "min_edge", "min_fan_area", "max_speed"]
    L = np.array([float(r["perimeter"]) for r in rows])
    assert np.all(np.diff(L) <= 1e-10 * L[0])


def test_evolve_stdout_and_semi(capsys):
    assert run("evolve", "--scheme", "semi", "--n", "8", "--t-end", "0.01") == 0
    text = capsys.readouterr().out
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0][0] == "step" and float(rows[-1][1]) == pytest.approx(0.01)


def test_evolve_is_byte_identical(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for p in (a, b):
        run("evolve", "--n", "32", "--record-every", "5", "--out-csv", str(p))
    assert a.read_bytes() == b.read_bytes()


def test_evolve_adjusts_end_time(tmp_path, caplog):
    out = tmp_path / "d.csv"
    assert run("evolve", "--n", "16", "--tau", "0.03", "--t-end", "0.1", "--out-csv", str(out)) == 0
    rows = list(csv.DictReader(out.open()))
    assert len(rows) == 4 and float(rows[-1]["t"]) == pytest.approx(0.09)
    assert "adjusted" in caplog.text


def test_evolve_svg_frames(tmp_path):
    d = tmp_path / "frames"
    assert run("evolve", "--n", "12", "--tau", "0.01", "--t-end", "0.05", "--out-csv", str(tmp_path / "x.csv"),
               "--out-svg", str(d)) == 0
    names = sorted(p.name for p in d.iterdir())
    assert names == [f"{k:05d}.svg" for k in range(6)]
    assert (d / "00000.svg").read_text().startswith("<svg")


def test_evolve_from_polygon_file(tmp_path):
    poly = tmp_path / "sq.txt"
    write_polygon(poly, regular_polygon(8))
    out = tmp_path / "d.csv"
    assert run("evolve", "--curve", f"file:{poly}", "--n", "8", "--tau", "0.01", "--t-end", "0.02",
               "--out-csv", str(out)) == 0
    assert len(out.read_text().splitlines()) == 4  # header + steps 0..2


@pytest.mark.parametrize("argv", [
    ["evolve", "--n", "2"],
    ["evolve", "--tau", "-1"],
    ["evolve", "--tau", "fast"],
    ["evolve", "--t-end", "0"],
    ["evolve", "--curve", "spiral:1"],
    ["evolve", "--period", "-3"],
    ["evolve", "--record-every", "0"],
    ["converge", "--n-list", "16,24"],
    ["converge", "--n-list", "16,x"],
    ["area-loss", "--n-list", "16,32", "--tau", "0.03"],
])
def test_config_errors_exit_2(argv, capsys):
    assert run(*argv) == cli.EXIT_CONFIG
    assert "configuration error" in capsys.readouterr().err


def test_missing_curve_file_is_io_error(capsys):
    assert run("evolve", "--curve", "file:/nonexistent/p.txt") == cli.EXIT_IO


def test_unwritable_output_is_io_error(tmp_path):
    blocker = tmp_path / "f"
    blocker.write_text("")
    assert run("evolve", "--n", "8", "--t-end", "0.01", "--out-csv", str(blocker / "x.csv")) == cli.EXIT_IO


def test_degenerate_polygon_exit_3(tmp_path):
    poly = tmp_path / "bad.txt"
    poly.write_text("0 0\n1 0\n1 0\n0 1\n")
    assert run("evolve", "--curve", f"file:{poly}", "--n", "4") == cli.EXIT_DEGENERATE


def test_singular_solve_exit_4(capsys):
    assert run("evolve", "--n", "32", "--cond-cap", "1.5") == cli.EXIT_SOLVER


def test_converge_report(tmp_path, capsys):
    rep = tmp_path / "conv.csv"
    assert run("converge", "--n-list", "8,16", "--t-end", "0.05", "--report", str(rep)) == 0
    lines = rep.read_text().splitlines()
    assert lines[0] == "N,E1,order1,E2,order2,E3,order3" and len(lines) == 3
    assert "Ord1" in capsys.readouterr().out


def test_area_loss_report(tmp_path):
    rep = tmp_path / "area.csv"
    assert run("area-loss", "--n-list", "16,32", "--report", str(rep)) == 0
    assert rep.read_text().splitlines()[-1].startswith("slope,")


def test_check_suites(capsys):
    assert run("check", "--suite", "trig-lemma", "--suite", "solver-oracle") == 0
    out = capsys.readouterr().out
    assert out.count("PASS") == 2


def test_check_all_suites_pass(capsys):
    assert run("check") == 0
    assert "FAIL" not in capsys.readouterr().out


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "apcsf", "check", "--suite", "regular-polygon"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and "PASS" in r.stdout
