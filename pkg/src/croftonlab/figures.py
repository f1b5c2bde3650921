"""Matplotlib rendering of run reports to PNG files alongside the delimited
output. Figures are a presentation convenience; the CSV/JSON report remains
the authoritative record.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .reports import RunReport  # noqa: E402


def _save(fig, outdir: Path, name: str) -> Path:
    outdir.mkdir(parents=True, exist_ok=True)
    path = outdir / f"{name}.png"
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def _plot_cd_scan(report: RunReport, outdir: Path) -> list[Path]:
    taus, values, errors = [], [], []
    for row in report.rows:
        if row.name.startswith("cd[tau="):
            taus.append(float(row.name[len("cd[tau="):-1]))
            values.append(row.value)
            errors.append(row.stderr)
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.errorbar(taus, values, yerr=np.asarray(errors) * 3.0, fmt="o-", capsize=3)
    ax.axhline(0.5, color="gray", lw=0.8, ls="--")
    ax.set_xlabel(r"Kahler angle $\tau$")
    ax.set_ylabel("family coefficient")
    ax.set_title("Hyperplane-family coefficient vs. Kahler angle")
    return [_save(fig, outdir, "cd_scan")]


def _plot_equidistribution(report: RunReport, outdir: Path) -> list[Path]:
    counts, tallies = [], []
    for row in report.rows:
        if row.name.startswith("hist_"):
            counts.append(int(row.name[len("hist_"):]))
            tallies.append(row.value)
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.bar(counts, tallies, width=0.6)
    ax.set_xlabel("distinct intersection points")
    ax.set_ylabel("lines")
    ax.set_xticks(counts)
    ax.set_title("Line-curve intersection histogram")
    return [_save(fig, outdir, "equidistribution")]


def _plot_scan(report: RunReport, outdir: Path) -> list[Path]:
    restarts = [row for row in report.rows if row.name.startswith("restart_")]
    best = report.row("best_value")
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.bar(range(len(restarts)), [row.value for row in restarts], color="steelblue")
    ax.axhline(best.value, color="firebrick", lw=1.2, label="best (fresh draws)")
    ax.set_xlabel("restart")
    ax.set_ylabel("objective")
    ax.set_title("Maximizer scan restarts")
    ax.legend()
    return [_save(fig, outdir, "prop34_scan")]


def _plot_tasaki(report: RunReport, outdir: Path) -> list[Path]:
    named = [row for row in report.rows if row.name in ("product_value", "tasaki_value")]
    randoms = [row for row in report.rows if row.name.startswith("random_")]
    fig, ax = plt.subplots(figsize=(6, 4))
    labels = [row.name for row in named] + [row.name for row in randoms]
    values = [row.value for row in named] + [row.value for row in randoms]
    errors = [3.0 * row.stderr for row in named] + [3.0 * row.stderr for row in randoms]
    colors = ["firebrick", "darkorange"] + ["steelblue"] * len(randoms)
    ax.bar(range(len(values)), values, yerr=errors, color=colors, capsize=2)
    ax.set_xticks(range(len(values)))
    ax.set_xticklabels(labels, rotation=90, fontsize=6)
    ax.set_ylabel("objective")
    ax.set_title("Two-block objective: maximizer families vs. random planes")
    return [_save(fig, outdir, "tasaki_check")]


def _plot_generic(report: RunReport, outdir: Path) -> list[Path]:
    fig, ax = plt.subplots(figsize=(6, 4))
    names = [row.name for row in report.rows]
    values = [row.value for row in report.rows]
    errors = [3.0 * row.stderr for row in report.rows]
    ax.bar(range(len(values)), values, yerr=errors, capsize=3)
    ax.set_xticks(range(len(values)))
    ax.set_xticklabels(names, rotation=45, ha="right", fontsize=7)
    ax.set_title(str(report.config.get("command", "report")))
    return [_save(fig, outdir, str(report.config.get("command", "report")).replace("-", "_"))]


_RENDERERS = {
    "cd-scan": _plot_cd_scan,
    "equidistribution": _plot_equidistribution,
    "prop34-scan": _plot_scan,
    "tasaki-check": _plot_tasaki,
}


def render_report(report: RunReport, outdir: str | Path) -> list[Path]:
    """Write the figure(s) appropriate to the report's command; returns the
    created paths."""
    outdir = Path(outdir)
    renderer = _RENDERERS.get(str(report.config.get("command")), _plot_generic)
    return renderer(report, outdir)
