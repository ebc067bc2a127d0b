import csv

import numpy as np
import pytest

from lrjs import matio
from lrjs.cli import main
from lrjs.config import read_kv


def _gen_synth(out, seed=1):
    assert main(["generate", "--kind", "synthetic", "--m", "128", "--n", "64", "--rank", "3",
                 "--ksparse", "8", "--seed", str(seed), "--out", str(out)]) == 0
    return out / "frame.lrjs", out / "frame.cfg"


def test_generate_synthetic_two_files_and_determinism(tmp_path):
    f1, cfg = _gen_synth(tmp_path / "a")
    f2, _ = _gen_synth(tmp_path / "b")
    assert sorted(p.name for p in (tmp_path / "a").glob("*.lrjs")) == ["frame.lrjs", "truth_d.lrjs"]
    assert f1.read_bytes() == f2.read_bytes()
    assert (tmp_path / "a/truth_d.lrjs").read_bytes() == (tmp_path / "b/truth_d.lrjs").read_bytes()
    kv = read_kv(cfg)
    assert kv["k"] == "24" and float(kv["fs"]) == 37.5e6
    assert matio.read_matrix(f1).shape == (128, 64)


def test_generate_phantom_from_spec(tmp_path):
    spec = tmp_path / "phantom.cfg"
    spec.write_text("# small phantom\nx_min = -2\nx_max = 2\nz_min = 5\nz_max = 12\n"
                    "background_density = 5\ncysts = 0, 8.5, 2, 0\nn_elements = 16\n"
                    "element_pitch = 0.1\nbandwidth = 0.45\ncycles = 6\nm = 512\nseed = 4\n")
    out = tmp_path / "ph"
    assert main(["generate", "--kind", "phantom", "--spec", str(spec), "--out", str(out)]) == 0
    assert [p.name for p in out.glob("*.lrjs")] == ["frame.lrjs"]
    x = matio.read_matrix(out / "frame.lrjs")
    assert x.shape == (512, 16) and np.any(x)
    assert "regions" in read_kv(out / "frame.cfg")


def test_recover_exit_codes(tmp_path):
    frame, cfg = _gen_synth(tmp_path / "g")
    x = matio.read_matrix(frame)
    out = tmp_path / "r1"
    assert main(["recover", "--config", str(cfg), "--frame", str(frame), "--sr", "1.0",
                 "--out", str(out)]) == 0
    xhat = matio.read_matrix(out / "xhat.lrjs")
    assert np.linalg.norm(xhat - x) / np.linalg.norm(x) <= 1e-3
    with open(out / "trace.csv") as fh:
        assert next(csv.reader(fh)) == ["iter", "objective", "residual", "rel_change", "rank_estimate"]
    assert matio.read_matrix(out / "dhat.lrjs").shape == (24, 64)

    assert main(["recover", "--config", str(cfg), "--frame", str(frame), "--sr", "0.1",
                 "--out", str(tmp_path / "r2")]) == 0
    assert main(["recover", "--config", str(cfg), "--frame", str(frame), "--sr", "0.1",
                 "--max-iters", "5", "--out", str(tmp_path / "r3")]) == 2
    assert read_kv(tmp_path / "r3/summary.cfg")["terminated_by"] == "max_iters"


def test_recover_bad_magic(tmp_path, capsys):
    bad = tmp_path / "bad.lrjs"
    bad.write_bytes(b"NOPE" + bytes(40))
    assert main(["recover", "--frame", str(bad), "--sr", "0.5", "--out", str(tmp_path / "o")]) == 1
    assert "magic" in capsys.readouterr().err.lower()


def test_recover_with_pattern_file(tmp_path):
    frame, cfg = _gen_synth(tmp_path / "g")
    assert main(["sample", "--config", str(cfg), "--frame", str(frame), "--sr", "0.3",
                 "--seed", "2", "--out", str(tmp_path / "s")]) == 0
    mask = matio.read_matrix(tmp_path / "s/pattern.lrjs")
    meas = matio.read_matrix(tmp_path / "s/measurements.lrjs")
    assert mask.sum() == meas.shape[1] == round(0.3 * 128) * 64
    assert main(["recover", "--config", str(cfg), "--frame", str(frame), "--pattern",
                 str(tmp_path / "s/pattern.lrjs"), "--out", str(tmp_path / "r")]) == 0


def test_evaluate_self_and_missing_regions(tmp_path):
    rng = np.random.default_rng(0)
    x = rng.standard_normal((64, 16))
    x[20:40, 4:12] *= 0.05
    matio.write_matrix(tmp_path / "x.lrjs", x)
    out = tmp_path / "ev"
    assert main(["evaluate", "--reference", str(tmp_path / "x.lrjs"), "--reconstruction",
                 str(tmp_path / "x.lrjs"), "--regions", "20,4,20,8;44,4,20,8", "--out", str(out)]) == 0
    with open(out / "metrics.csv") as fh:
        row = next(csv.DictReader(fh))
    assert float(row["relative_error"]) == 0.0 and float(row["delta_cnr_db"]) == 0.0
    assert (out / "reference.pgm").read_bytes() == (out / "reconstruction.pgm").read_bytes()
    assert main(["evaluate", "--reference", str(tmp_path / "x.lrjs"), "--reconstruction",
                 str(tmp_path / "x.lrjs"), "--out", str(out)]) == 1


def test_usage_errors(tmp_path):
    with pytest.raises(SystemExit) as info:
        main(["recover", "--bogus"])
    assert info.value.code == 1
    assert main(["recover", "--sr", "0.5"]) == 1  # no frame


def _sweep(tmp_path, name, frame, cfg):
    out = tmp_path / name
    code = main(["sweep", "--config", str(cfg), "--frame", str(frame), "--sr-list",
                 "0.05,0.1,0.2,0.3", "--seed", "3", "--out", str(out)])
    assert code == 0
    return out


def test_sweep_rows_monotone_and_deterministic(tmp_path):
    frame, cfg = _gen_synth(tmp_path / "g")
    a = _sweep(tmp_path, "s1", frame, cfg)
    b = _sweep(tmp_path, "s2", frame, cfg)
    assert (a / "results.csv").read_bytes() == (b / "results.csv").read_bytes()
    with open(a / "results.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 8
    full = {float(r["sr"]): float(r["relative_error"]) for r in rows if r["mode"] == "full"}
    assert full[0.3] <= full[0.05]
    assert (a / "summary.txt").exists() and (a / "full/sr_0.1/trace.csv").exists()
