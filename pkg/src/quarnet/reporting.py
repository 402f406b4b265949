"""Output management: CSV writers, run manifests with checksums, and
matplotlib figure rendering for the report-producing CLI paths."""

import hashlib
import json
import time
from pathlib import Path

import numpy as np

from . import __version__

__all__ = [
    "fmt",
    "write_csv",
    "ManifestWriter",
    "render_sweep_figure",
    "render_heatmap_figure",
    "render_timeseries_figure",
    "render_curves_figure",
]


def fmt(x) -> str:
    """Canonical scalar formatting so identical runs emit identical bytes."""
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.10g}"
    return str(x)


def write_csv(path, header: str, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(fmt(v) for v in row) + "\n")


def _sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()


class ManifestWriter:
    """Collects emitted files and writes a manifest.json with checksums."""

    def __init__(self, out_dir, command: str, config: dict, seed: int):
        self.out_dir = Path(out_dir)
        self.out_dir.mkdir(parents=True, exist_ok=True)
        self.command = command
        self.config = config
        self.seed = seed
        self.files = []
        self._t0 = time.time()

    def path(self, name: str) -> Path:
        p = self.out_dir / name
        self.files.append(p)
        return p

    def write(self, status: str = "ok") -> Path:
        manifest = {
            "command": self.command,
            "config": {k: v for k, v in sorted(self.config.items()) if v is not None},
            "seed": self.seed,
            "status": status,
            "version": f"quarnet-{__version__}",
            "wall_time_s": round(time.time() - self._t0, 3),
            "files": {p.name: _sha256(p) for p in self.files if p.exists()},
        }
        out = self.out_dir / "manifest.json"
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(manifest, fh, indent=2, sort_keys=True)
            fh.write("\n")
        return out


def _plt():
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    return plt


def render_sweep_figure(path, result, title: str) -> None:
    """Total and peak infected fraction versus quarantine threshold."""
    plt = _plt()
    fig, ax = plt.subplots(figsize=(6, 4))
    thr = result.thresholds
    ax.errorbar(thr, result.mean_total, yerr=result.stderr_total, color="tab:blue",
                lw=1.5, label="total infected")
    ax.errorbar(thr, result.mean_max, yerr=result.stderr_max, color="tab:red",
                lw=1.5, label="max simultaneously infected")
    ax.plot(thr, thr, color="gray", ls=":", lw=1, label="identity")
    ax.set_xlabel("quarantine threshold (affected fraction)")
    ax.set_ylabel("population fraction")
    ax.set_title(title)
    ax.legend(frameon=False, fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_heatmap_figure(path, grid_result, metric: str, title: str) -> None:
    plt = _plt()
    fig, ax = plt.subplots(figsize=(5.5, 4.5))
    mat = grid_result.mean_total if metric == "total" else grid_result.mean_max
    im = ax.imshow(mat, origin="lower", aspect="auto", cmap="viridis",
                   extent=[grid_result.q2_values[0], grid_result.q2_values[-1],
                           grid_result.q1_values[0], grid_result.q1_values[-1]])
    fig.colorbar(im, ax=ax, label=f"mean {metric} infected fraction")
    ax.set_xlabel("second quarantine threshold Q2")
    ax.set_ylabel("first quarantine threshold Q1")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_timeseries_figure(path, series_list, labels, n: int, title: str) -> None:
    plt = _plt()
    fig, ax = plt.subplots(figsize=(6, 4))
    for ts, label in zip(series_list, labels):
        ax.plot(ts.t, ts.i / n, lw=1.2, label=label)
        for tq in ts.quarantine_times:
            ax.axvline(tq, color="gray", lw=0.5, ls="--", alpha=0.5)
    ax.set_xlabel("time")
    ax.set_ylabel("infected fraction")
    ax.set_title(title)
    if labels and any(labels):
        ax.legend(frameon=False, fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_curves_figure(path, curves: dict, xlabel: str, ylabel: str, title: str,
                         identity: bool = False) -> None:
    plt = _plt()
    fig, ax = plt.subplots(figsize=(6, 4))
    for label, (x, y) in curves.items():
        ax.plot(x, y, lw=1.3, label=str(label))
    if identity:
        lim = [0, 1]
        ax.plot(lim, lim, color="gray", ls=":", lw=1, label="identity")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.legend(frameon=False, fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
