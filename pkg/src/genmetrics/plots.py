"""Figure rendering for experiment CSV rows (written next to the CSV)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def render_mog_figure(rows: list[dict], path: str) -> None:
    """Moment-based distances stay flat at zero while MMD tracks lam."""
    lams = [r["lambda"] for r in rows]
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.5))
    ax1.plot(lams, [r["fd_analytic"] for r in rows], "o-", label="FD (analytic moments)")
    ax1.plot(lams, [r["fd_sampled"] for r in rows], "s-", label="FD (sampled)")
    ax1.plot(lams, [r["fd_inf"] for r in rows], "^-", label="FD-infinity")
    ax1.set_xlabel("displacement")
    ax1.set_ylabel("squared Frechet distance")
    ax1.legend(fontsize=8)
    ax2.plot(lams, [r["mmd"] for r in rows], "o-", color="tab:red")
    ax2.set_xlabel("displacement")
    ax2.set_ylabel("MMD (scaled)")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_sample_efficiency_figure(rows: list[dict], path: str) -> None:
    """Relative metric value per subset size, averaged over seeds."""
    sizes = sorted({r["size"] for r in rows})
    fid_rel = [np.mean([r["fid_rel"] for r in rows if r["size"] == s]) for s in sizes]
    cmmd_rel = [np.mean([r["cmmd_rel"] for r in rows if r["size"] == s]) for s in sizes]
    fig, ax = plt.subplots(figsize=(5.5, 3.5))
    ax.plot(sizes, fid_rel, "o-", label="FID / FID(full)")
    ax.plot(sizes, cmmd_rel, "s-", label="CMMD / CMMD(full)")
    ax.axhline(1.0, color="gray", lw=0.8, ls="--")
    ax.set_xlabel("sample size")
    ax.set_ylabel("value relative to full size")
    ax.set_xscale("log")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_bench_figure(report: dict, path: str) -> None:
    """Median wall time of the two metric paths."""
    fig, ax = plt.subplots(figsize=(4.5, 3.5))
    names = ["Frechet", "MMD"]
    medians = [report["frechet"]["median_ms"], report["mmd"]["median_ms"]]
    spans = [
        [report[k]["median_ms"] - report[k]["min_ms"] for k in ("frechet", "mmd")],
        [report[k]["max_ms"] - report[k]["median_ms"] for k in ("frechet", "mmd")],
    ]
    ax.bar(names, medians, yerr=spans, capsize=4, color=["tab:blue", "tab:red"])
    ax.set_ylabel("median wall time (ms)")
    ax.set_title(f"n={report['n']}, d={report['d']}, reps={report['reps']}", fontsize=9)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
