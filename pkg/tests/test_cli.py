"""Command-line behaviour: flags, config files, exit codes, artifacts."""
import csv
import json
import shutil
import subprocess

import pytest

from pommer.cli import main, parse_levels
from pommer.scenario import scenario_from_jsonl


def test_parse_levels_ranges_and_lists():
    assert parse_levels("0..3") == [0, 1, 2, 3]
    assert parse_levels("0,3,5") == [0, 3, 5]
    assert parse_levels("7") == [7]
    assert parse_levels(" 0 , 2 ") == [0, 2]
    with pytest.raises(Exception):
        parse_levels("3..1")


def test_match_replay_verify_round_trip(tmp_path, capsys):
    replay = tmp_path / "match.jsonl"
    rc = main([
        "match", "--seed", "1", "--team-a", "baseline", "--team-b", "baseline",
        "--max-steps", "60", "--out", str(replay),
    ])
    assert rc == 0
    assert "seed 1" in capsys.readouterr().out

    assert main(["replay", "--in", str(replay), "--verify"]) == 0
    assert "ok" in capsys.readouterr().out


def test_replay_verify_flags_tampering(tmp_path, capsys):
    replay = tmp_path / "match.jsonl"
    main([
        "match", "--seed", "1", "--team-a", "baseline", "--team-b", "baseline",
        "--max-steps", "60", "--out", str(replay),
    ])
    lines = replay.read_text().splitlines()
    victim = json.loads(lines[12])
    victim["alive"] = [not v for v in victim["alive"]]
    lines[12] = json.dumps(victim)
    replay.write_text("\n".join(lines) + "\n")

    assert main(["replay", "--in", str(replay), "--verify"]) == 1
    assert "MISMATCH" in capsys.readouterr().out


def test_series_writes_single_row_csv(tmp_path, capsys):
    out = tmp_path / "series.csv"
    rc = main([
        "series", "--n", "2", "--team-a", "baseline", "--team-b", "stop",
        "--swap-sides", "--out", str(out),
    ])
    assert rc == 0
    rows = list(csv.reader(open(out)))
    assert rows[0][0] == "level" and len(rows) == 2
    assert rows[1][0] == "-1"
    wins, losses, ties = (int(v) for v in rows[1][1:4])
    assert wins + losses + ties == 2


def test_sweep_writes_one_row_per_level(tmp_path, capsys):
    out = tmp_path / "sweep.csv"
    rc = main([
        "sweep", "--levels", "0..1", "--n", "2", "--opponent", "stop",
        "--template", "baseline", "--out", str(out),
    ])
    assert rc == 0
    rows = list(csv.reader(open(out)))
    assert [row[0] for row in rows] == ["level", "0", "1"]
    assert "level 0:" in capsys.readouterr().out


def test_bench_times_both_kernel_paths(capsys):
    assert main(["bench", "--n", "2"]) == 0
    out = capsys.readouterr().out
    for kernel in ("roll_scenario", "surviving_pairs", "reach_with_arrival"):
        assert kernel in out


def test_config_file_sets_defaults_and_flags_override(tmp_path, capsys):
    cfg = tmp_path / "match.cfg"
    cfg.write_text(
        "# defaults for smoke matches\n"
        "seed=7\n"
        "team_a=stop\n"
        "team-b=stop\n"
        "max_steps=3\n"
    )
    assert main(["match", "--config", str(cfg)]) == 0
    assert "seed 7" in capsys.readouterr().out
    assert main(["match", "--config", str(cfg), "--seed", "9"]) == 0
    assert "seed 9" in capsys.readouterr().out


def test_config_file_boolean_values(tmp_path, capsys):
    cfg = tmp_path / "series.cfg"
    cfg.write_text(
        "n=2\nteam_a=stop\nteam_b=stop\nmax_steps=3\n"
        "swap_sides=true\nstrict_deadline=false\n"
    )
    assert main(["series", "--config", str(cfg)]) == 0
    assert "wins" in capsys.readouterr().out


def test_match_can_dump_the_first_scenario(tmp_path):
    dump = tmp_path / "scenario.jsonl"
    rc = main([
        "match", "--seed", "0", "--team-a", "solo", "--team-b", "stop",
        "--max-steps", "3", "--dump-scenario", str(dump),
    ])
    assert rc == 0
    sc = scenario_from_jsonl(dump)
    assert sc.horizon == 12
    assert sc.walls.shape == (13, 11, 11)


def test_installed_entry_point_runs():
    exe = shutil.which("pommer")
    assert exe, "console script not installed"
    proc = subprocess.run(
        [exe, "match", "--team-a", "stop", "--team-b", "stop", "--max-steps", "3"],
        capture_output=True, text=True, timeout=120,
    )
    assert proc.returncode == 0
    assert "TIE" in proc.stdout
