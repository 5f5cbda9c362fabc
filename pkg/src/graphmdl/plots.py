"""Figure rendering for run reports and complexity tables.

Everything draws through the Agg backend and writes straight to file, so
the functions are safe on headless machines.
"""
from __future__ import annotations

from collections.abc import Sequence
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from graphmdl.detect import ChangeReport  # noqa: E402


def score_trace(
    reports: Sequence[ChangeReport], path: str | Path, t_star: int | None = None
) -> Path:
    """Change statistic against its threshold over time, alarms marked."""
    scored = [r for r in reports if r.phi is not None]
    if not scored:
        raise ValueError("nothing to plot: no scored steps")
    ts = [r.t for r in scored]
    fig, ax = plt.subplots(figsize=(7, 3.5))
    ax.plot(ts, [r.phi for r in scored], marker=".", color="tab:blue", label="statistic")
    ax.step(
        ts, [r.epsilon for r in scored], where="mid", linestyle="--",
        color="tab:gray", label="threshold",
    )
    hits = [r for r in scored if r.alarm]
    if hits:
        ax.scatter(
            [r.t for r in hits], [r.phi for r in hits], marker="o",
            facecolors="none", edgecolors="tab:red", s=90, label="alarm", zorder=3,
        )
    if t_star is not None:
        ax.axvline(t_star, color="tab:red", alpha=0.3, linewidth=1)
    ax.set_xlabel("t")
    ax.set_ylabel("bits")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def codelen_trace(reports: Sequence[ChangeReport], path: str | Path) -> Path:
    """Summary and data code-lengths per step on twin axes."""
    if not reports:
        raise ValueError("nothing to plot: empty report list")
    ts = [r.t for r in reports]
    fig, ax = plt.subplots(figsize=(7, 3.5))
    ax.plot(ts, [r.summary_total for r in reports], marker=".", color="tab:green")
    ax.set_xlabel("t")
    ax.set_ylabel("summary bits", color="tab:green")
    twin = ax.twinx()
    twin.plot(ts, [r.data_total for r in reports], marker=".", color="tab:purple", alpha=0.6)
    twin.set_ylabel("data bits", color="tab:purple")
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def complexity_curves(
    rows: Sequence[tuple[int, float, float]], path: str | Path
) -> Path:
    """Parametric-complexity rows (k, lambda, bits) as one curve per k."""
    if not rows:
        raise ValueError("nothing to plot: no complexity rows")
    fig, ax = plt.subplots(figsize=(5.5, 4))
    for k in sorted({k for k, _, _ in rows}):
        pts = sorted((lam, bits) for kk, lam, bits in rows if kk == k)
        ax.plot([p[0] for p in pts], [p[1] for p in pts], marker=".", label=f"k={k}")
    ax.set_xscale("log")
    ax.set_xlabel("lambda")
    ax.set_ylabel("superedge complexity (bits)")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
