import json

import numpy as np

from quarnet.experiments import GridResult, SweepResult
from quarnet.reporting import (ManifestWriter, fmt, render_curves_figure,
                               render_heatmap_figure, render_sweep_figure,
                               render_timeseries_figure, write_csv)
from quarnet.simulate import TimeSeries


def make_sweep_result():
    thr = np.array([0.0, 0.5, 1.0])
    z = np.zeros(3)
    return SweepResult(thresholds=thr, mean_total=np.array([0.9, 0.4, 0.8]),
                       stderr_total=z, mean_max=np.array([0.5, 0.2, 0.4]),
                       stderr_max=z, second_wave_prob=z, baseline_total=0.85,
                       baseline_max=0.45, per_trial_total=np.zeros((3, 2)),
                       per_trial_max=np.zeros((3, 2)))


def test_fmt_canonical():
    assert fmt(True) == "1"
    assert fmt(3) == "3"
    assert fmt(0.25) == "0.25"
    assert fmt(np.float64(1 / 3)) == "0.3333333333"


def test_write_csv_deterministic(tmp_path):
    rows = [(1, 0.5, True), (2, 1 / 3, False)]
    p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
    write_csv(p1, "a,b,c", rows)
    write_csv(p2, "a,b,c", rows)
    assert p1.read_bytes() == p2.read_bytes()
    assert p1.read_text().splitlines()[0] == "a,b,c"


def test_manifest_lists_files_with_checksums(tmp_path):
    man = ManifestWriter(tmp_path, "demo", {"x": 1, "skip": None}, seed=7)
    write_csv(man.path("data.csv"), "a", [(1,)])
    out = man.write()
    blob = json.loads(out.read_text())
    assert blob["seed"] == 7
    assert blob["config"] == {"x": 1}
    assert "data.csv" in blob["files"]
    assert len(blob["files"]["data.csv"]) == 64
    assert blob["version"].startswith("quarnet-")


def test_figure_renderers(tmp_path):
    render_sweep_figure(tmp_path / "sweep.png", make_sweep_result(), "t")
    grid = GridResult(q1_values=np.array([0.1, 0.2]), q2_values=np.array([0.1, 0.2]),
                      mean_total=np.array([[0.5, 0.6], [0.4, 0.7]]),
                      mean_max=np.array([[0.2, 0.3], [0.1, 0.4]]),
                      stderr_total=np.zeros((2, 2)), stderr_max=np.zeros((2, 2)))
    render_heatmap_figure(tmp_path / "heat.png", grid, "total", "t")
    ts = TimeSeries(t=np.array([0.0, 1.0, 2.0]), s=np.array([8, 7, 6]),
                    i=np.array([2, 2, 1]), r=np.array([0, 1, 3]),
                    quarantine_times=[1.0])
    render_timeseries_figure(tmp_path / "ts.png", [ts], ["run"], 10, "t")
    render_curves_figure(tmp_path / "c.png", {"a": ([0, 1], [0, 1])}, "x", "y", "t",
                         identity=True)
    for name in ("sweep.png", "heat.png", "ts.png", "c.png"):
        assert (tmp_path / name).stat().st_size > 1000
