"""Report rendering: delimited files plus matplotlib figures.

Two report paths exist: the compiler equivalence report (per-cycle step
counts with the fitted linear bound) and the multiplicity-trace space-time
diagram.  Each writes a CSV and a PNG side by side into a directory.
"""

from __future__ import annotations

import csv
import os
from typing import TYPE_CHECKING

if TYPE_CHECKING:  # pragma: no cover
    from .partm import ParTrace
    from .trackdtm import EquivalenceReport


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def write_equivalence_report(report: "EquivalenceReport", out_dir: str) -> list[str]:
    os.makedirs(out_dir, exist_ok=True)
    csv_path = os.path.join(out_dir, "cycles.csv")
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["cycle", "dtm_steps", "adjusted_steps", "matched", "fit_bound"])
        for t, (steps, adj) in enumerate(
            zip(report.dtm_steps_per_partm_step, report.adjusted_steps), start=1
        ):
            bound = report.fit_c * t + report.fit_d
            writer.writerow([t, steps, adj, report.matched[t] if t < len(report.matched) else "", f"{bound:.1f}"])
    png_path = os.path.join(out_dir, "cycles.png")
    plt = _pyplot()
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.5))
    ts = list(range(1, len(report.dtm_steps_per_partm_step) + 1))
    ax1.plot(ts, report.dtm_steps_per_partm_step, "o-", label="steps per cycle")
    ax1.plot(ts, report.adjusted_steps, "s--", label="delimiter-adjusted")
    ax1.plot(ts, [report.fit_c * t + report.fit_d for t in ts], "k:", label=f"{report.fit_c:.1f}·t+{report.fit_d}")
    ax1.set_xlabel("simulated step t")
    ax1.set_ylabel("host steps")
    ax1.legend(fontsize=8)
    cumulative = []
    total = 0
    for s in report.dtm_steps_per_partm_step:
        total += s
        cumulative.append(total)
    ax2.plot(ts, cumulative, "o-", label="cumulative")
    ax2.plot(ts, [report.fit_c_quadratic * t * t for t in ts], "k:", label=f"{report.fit_c_quadratic:.1f}·t²")
    ax2.set_xlabel("simulated step t")
    ax2.set_ylabel("host steps")
    ax2.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(png_path, dpi=120)
    plt.close(fig)
    return [csv_path, png_path]


def write_trace_report(trace: "ParTrace", blank: str, out_dir: str) -> list[str]:
    os.makedirs(out_dir, exist_ok=True)
    csv_path = os.path.join(out_dir, "trace.csv")
    cells = sorted({p for cfg in trace.steps for p, _ in cfg.tape} | {p for cfg in trace.steps for _, p in cfg.active})
    if not cells:
        cells = [0]
    lo, hi = min(cells) - 1, max(cells) + 1
    span = list(range(lo, hi + 1))
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "active"] + [f"cell{p}" for p in span])
        for cfg in trace.steps:
            active = " ".join(f"{s}@{p}" for s, p in sorted(cfg.active))
            row = [cfg.time, active]
            for p in span:
                row.append(",".join(sorted(cfg.cell(p, blank))))
            writer.writerow(row)
    png_path = os.path.join(out_dir, "trace.png")
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(max(4, len(span) * 0.7), max(3, len(trace.steps) * 0.5)))
    for t, cfg in enumerate(trace.steps):
        for p in span:
            syms = cfg.cell(p, blank)
            label = ",".join(sorted(syms))
            multi = len(syms) > 1
            ax.text(p, -t, label, ha="center", va="center", fontsize=9,
                    color="firebrick" if multi else "black")
        for s, p in sorted(cfg.active):
            ax.text(p, -t + 0.33, s, ha="center", va="center", fontsize=7, color="royalblue")
    ax.set_xlim(lo - 0.5, hi + 0.5)
    ax.set_ylim(-len(trace.steps) + 0.5, 0.8)
    ax.set_xticks(span)
    ax.set_yticks([-t for t in range(len(trace.steps))])
    ax.set_yticklabels([f"t={t}" for t in range(len(trace.steps))])
    ax.set_xlabel("cell")
    ax.grid(True, alpha=0.2)
    fig.tight_layout()
    fig.savefig(png_path, dpi=120)
    plt.close(fig)
    return [csv_path, png_path]
