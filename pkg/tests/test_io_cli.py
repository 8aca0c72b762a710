import os
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from anisocga import io
from anisocga.cli import main, parse_alphas
from anisocga.grid import GridShape, TorusGrid
from anisocga.niching import init_two_best

TOY = "3\n0 2 1\n2 0 3\n1 3 0\n\n0 1 4\n1 0 2\n4 2 0\n"


def header(path):
    return path.read_text().splitlines()[0]


def test_headers_are_exact(tmp_path):
    assert header(io.write_growth_csv(tmp_path / "g.csv", [1, 3, 4])) == "generation,n_best,delta"
    assert header(io.write_summary_csv(tmp_path / "s.csv", [])) == "label,avg,std,min,max,replicates"
    assert header(io.write_trace_csv(tmp_path / "t.csv", [5.0])) == "generation,global_best_cost"
    assert header(io.write_sweep_csv(tmp_path / "w.csv", [])) == "alpha,mean_best,std_best,min_best,runs"
    assert io.NICHING_HEADER == ("generation", "count_a", "count_b", "count_empty", "mixing_index")


def test_growth_rows(tmp_path):
    rows = io.read_rows(io.write_growth_csv(tmp_path / "g.csv", [1, 3, 4]))
    assert rows[1:] == [["0", "1", "0"], ["1", "3", "2"], ["2", "4", "1"]]


def test_number_format_is_plain():
    assert io.fmt(1234567.0) == "1234567"
    assert io.fmt(0.1) == "0.1"
    assert io.fmt(np.int64(7)) == "7"
    assert "," not in io.fmt(1e12)


def test_pgm_round_trip(tmp_path):
    img = np.arange(12, dtype=np.uint8).reshape(3, 4) * 20
    assert np.array_equal(io.read_pgm(io.write_pgm(tmp_path / "a.pgm", img)), img)


def test_pgm_reader_skips_comments(tmp_path):
    path = tmp_path / "c.pgm"
    path.write_bytes(b"P5\n# made by hand\n2 1\n255\n\x00\xff")
    assert io.read_pgm(path).tolist() == [[0, 255]]


def test_palettes():
    grid = init_two_best(GridShape(8, 2))
    img = io.niching_image(grid)
    assert sorted(set(img.ravel().tolist())) == [64, 160, 255]
    t = TorusGrid(GridShape(2, 1), np.array([[0, 1]]))
    assert io.takeover_image(t).tolist() == [[0, 255]]


@pytest.mark.parametrize(
    "text, expected",
    [("0:0.3:0.1", [0.0, 0.1, 0.2]), ("0.0:1.0:0.25", [0.0, 0.25, 0.5, 0.75]), ("0.5,0.86", [0.5, 0.86])],
)
def test_alpha_parsing(text, expected):
    assert parse_alphas(text) == pytest.approx(expected)


def test_alpha_range_excludes_end():
    alphas = parse_alphas("0.0:1.0:0.02")
    assert len(alphas) == 50 and max(alphas) < 1.0


def test_takeover_command_outputs(tmp_path, capsys):
    rc = main(["takeover", "--shape", "16x16", "--replicates", "3", "--seed", "4",
               "--snapshots", "0,5", "--out", str(tmp_path)])
    assert rc == 0
    names = sorted(p.name for p in tmp_path.iterdir())
    assert "takeover_16x16_a0.csv" in names and "snap_g5.pgm" in names
    assert sum(n.startswith("growth_16x16_a0_r") for n in names) == 3
    assert "avg" in capsys.readouterr().out


def test_niching_command_writes_snapshots(tmp_path):
    rc = main(["niching", "--shape", "16x16", "--alpha", "0.9", "--generations", "30",
               "--snapshots", "10,20,30", "--out", str(tmp_path)])
    assert rc == 0
    assert len(list(tmp_path.glob("niche_a0.9_g*.pgm"))) == 3
    assert len(io.read_rows(tmp_path / "niching_a0.9.csv")) == 32


def test_qap_commands(tmp_path):
    inst = tmp_path / "toy3.dat"
    inst.write_text(TOY)
    assert main(["qap", "--instance", str(inst), "--grid", "4x4", "--generations", "5", "--trace",
                 "--out", str(tmp_path)]) == 0
    assert len(io.read_rows(tmp_path / "trace_toy3_a0.86.csv")) == 7
    assert main(["qap-sweep", "--instance", str(inst), "--grid", "4x4", "--generations", "5",
                 "--alphas", "0,0.5", "--runs", "2", "--out", str(tmp_path)]) == 0
    assert len(io.read_rows(tmp_path / "sweep_toy3.csv")) == 3


def test_same_seed_gives_identical_files(tmp_path):
    args = ["takeover-sweep", "--shapes", "8x32,16x16", "--replicates", "5", "--seed", "9"]
    main(args + ["--out", str(tmp_path / "a")])
    main(args + ["--out", str(tmp_path / "b")])
    assert (tmp_path / "a/takeover_shapes.csv").read_bytes() == (tmp_path / "b/takeover_shapes.csv").read_bytes()


def test_output_dir_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("ANISOCGA_OUT", str(tmp_path / "env"))
    assert main(["takeover", "--shape", "4x4", "--replicates", "1"]) == 0
    assert (tmp_path / "env/takeover_4x4_a0.csv").exists()


def test_missing_instance_exits_nonzero(tmp_path, capsys):
    assert main(["qap", "--instance", str(tmp_path / "nope.dat"), "--out", str(tmp_path)]) == 1
    assert "error" in capsys.readouterr().err


def test_malformed_instance_exits_nonzero(tmp_path):
    bad = tmp_path / "bad.dat"
    bad.write_text("3 0 1 0 1")
    assert main(["qap", "--instance", str(bad), "--out", str(tmp_path)]) == 1


def test_unwritable_output_exits_nonzero(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    assert main(["takeover", "--shape", "4x4", "--replicates", "1", "--out", str(blocker / "sub")]) == 1


@pytest.mark.parametrize("argv", [["takeover", "--shape", "4by4"], ["takeover", "--k", "x"], ["bogus"], []])
def test_bad_flags_exit_with_usage_error(argv):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 2


def test_invalid_values_exit_nonzero(tmp_path):
    assert main(["takeover", "--shape", "4x4", "--k", "9", "--out", str(tmp_path)]) == 1
    assert main(["takeover", "--shape", "4x4", "--alpha", "2", "--out", str(tmp_path)]) == 1


def _run_cli(args, out, threads):
    env = dict(os.environ, NUMBA_NUM_THREADS="8")
    cmd = [sys.executable, "-m", "anisocga", *args, "--threads", str(threads), "--out", str(out)]
    subprocess.run(cmd, check=True, env=env, capture_output=True)
    return {p.name: p.read_bytes() for p in sorted(Path(out).iterdir())}


@pytest.mark.slow
def test_thread_count_does_not_change_output(tmp_path):
    inst = tmp_path / "toy3.dat"
    inst.write_text(TOY)
    for args in (
        ["takeover", "--shape", "16x16", "--replicates", "8", "--seed", "3", "--aggregate"],
        ["niching", "--shape", "16x16", "--alpha", "0.5", "--generations", "20", "--replicates", "4"],
        ["qap-sweep", "--instance", str(inst), "--grid", "4x4", "--generations", "10", "--alphas", "0,0.5",
         "--runs", "4"],
    ):
        one = _run_cli(args, tmp_path / f"{args[0]}1", 1)
        eight = _run_cli(args, tmp_path / f"{args[0]}8", 8)
        assert one == eight and one
