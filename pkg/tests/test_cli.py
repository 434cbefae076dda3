import json

import numpy as np
import pytest

from ae_sim.cli import main

from conftest import tiny_script

import cv2


@pytest.fixture()
def script_file(tmp_path):
    p = tmp_path / "script.json"
    p.write_text(json.dumps(tiny_script().to_dict()))
    return p


def test_synth_run_compare(tmp_path, script_file, capsys):
    ds = tmp_path / "ds"
    assert main(["synth", "--script", str(script_file), "--out", str(ds), "--levels", "6"]) == 0
    out = json.loads(capsys.readouterr().out.strip())
    assert out["n_levels"] == 6 and out["frames"] == 18
    assert (ds / "manifest.json").is_file()

    run_dir = tmp_path / "run"
    assert main(["run", "--scene", str(ds), "--algo", "global", "--start-index", "5",
                 "--out", str(run_dir), "--frames"]) == 0
    info = json.loads(capsys.readouterr().out.strip())
    trace = json.loads((run_dir / "trace.json").read_text())
    assert info["config_hash"] == trace["config_hash"]
    assert len(trace["steps"]) == 3
    assert (run_dir / "trace.csv").is_file()
    assert (run_dir / "frames" / "playback.json").is_file()

    cmp_dir = tmp_path / "cmp"
    assert main(["compare-scales", "--scene", str(ds), "--algo", "global",
                 "--scales", "1,2", "--out", str(cmp_dir)]) == 0
    summary = json.loads(capsys.readouterr().out.strip())
    assert "1" in summary["mean_abs_ev_diff"] and "2" in summary["mean_abs_ev_diff"]


def test_synth_bundled_id(tmp_path, capsys):
    # bundled scene id resolves without a file (downscaled for speed)
    rc = main(["synth", "--script", "scene1", "--out", str(tmp_path / "s1"),
               "--width", "42", "--height", "28", "--levels", "3"])
    assert rc == 0
    out = json.loads(capsys.readouterr().out.strip())
    assert out["scene_id"] == "scene1" and out["n_levels"] == 3


def test_saliency_command(tmp_path, capsys):
    img = np.full((24, 24, 3), 30, dtype=np.uint8)
    img[8:16, 8:16] = 220
    src = tmp_path / "in.png"
    cv2.imwrite(str(src), img)
    dst = tmp_path / "out.png"
    assert main(["saliency", "--in", str(src), "--out", str(dst)]) == 0
    info = json.loads(capsys.readouterr().out.strip())
    assert info["salient_fraction"] > 0
    assert cv2.imread(str(dst), cv2.IMREAD_UNCHANGED) is not None


def test_error_is_machine_readable(tmp_path, capsys):
    rc = main(["run", "--scene", str(tmp_path / "missing"), "--algo", "global",
               "--out", str(tmp_path / "o")])
    assert rc == 1
    err = json.loads(capsys.readouterr().err.strip())
    assert err["code"] == "dataset-error"


def test_unknown_bundled_script(tmp_path, capsys):
    rc = main(["synth", "--script", "sceneX", "--out", str(tmp_path / "x")])
    assert rc == 1
    err = json.loads(capsys.readouterr().err.strip())
    assert err["code"] == "invalid-argument"
