"""Figure rendering for the report path.

Reads the delimited trial output produced by `check` or `sweep` and writes
PNG figures next to a small aggregate CSV.  Everything renders through the
Agg backend so the report path works headless.
"""

import csv
import os
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402


def _to_float(text):
    try:
        return float(text)
    except (TypeError, ValueError):
        return float("nan")


def load_rows(csv_path):
    with open(csv_path, newline="") as fh:
        return list(csv.DictReader(fh))


def render_figures(csv_path, outdir) -> list:
    """Render the standard figures; returns the paths written."""
    rows = load_rows(csv_path)
    if not rows:
        return []
    os.makedirs(outdir, exist_ok=True)
    written = []

    by_check = defaultdict(list)
    for row in rows:
        by_check[row["check"]].append(row)

    # ratio against observed regularity, one series per check
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for name, group in sorted(by_check.items()):
        gammas = [_to_float(r["gamma"]) for r in group]
        ratios = [_to_float(r["ratio"]) for r in group]
        ax.scatter(gammas, ratios, s=12, alpha=0.6, label=name)
    ax.set_xlabel("observed regularity")
    ax.set_ylabel("ratio / constant")
    ax.legend(fontsize=7)
    ax.grid(alpha=0.3)
    path = os.path.join(outdir, "ratio_vs_gamma.png")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    written.append(path)

    # per-check ratio distribution
    names = sorted(by_check)
    data = [
        [x for x in (_to_float(r["ratio"]) for r in by_check[n]) if x == x]
        for n in names
    ]
    fig, ax = plt.subplots(figsize=(7, 4.5))
    kept = [(n, d) for n, d in zip(names, data) if d]
    if kept:
        ax.boxplot([d for _n, d in kept], tick_labels=[n for n, _d in kept])
        plt.setp(ax.get_xticklabels(), rotation=30, ha="right", fontsize=7)
    ax.set_ylabel("ratio / constant")
    ax.grid(alpha=0.3)
    path = os.path.join(outdir, "ratio_by_check.png")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    written.append(path)

    # sweep view when an axis column is present
    if "axis_value" in rows[0] and any(r.get("axis_value") for r in rows):
        fig, ax = plt.subplots(figsize=(7, 4.5))
        for name, group in sorted(by_check.items()):
            per_value = defaultdict(list)
            for r in group:
                v = _to_float(r.get("axis_value"))
                if v == v:
                    ratio = _to_float(r["ratio"])
                    if ratio == ratio:
                        per_value[v].append(ratio)
            if not per_value:
                continue
            xs = sorted(per_value)
            ax.plot(xs, [max(per_value[v]) for v in xs], "o-", label=f"{name} max")
        axis_name = next((r["axis"] for r in rows if r.get("axis")), "axis")
        ax.set_xlabel(axis_name)
        ax.set_ylabel("max ratio / constant")
        ax.legend(fontsize=7)
        ax.grid(alpha=0.3)
        path = os.path.join(outdir, "ratio_vs_axis.png")
        fig.tight_layout()
        fig.savefig(path, dpi=150)
        plt.close(fig)
        written.append(path)

    return written


def write_summary_csv(csv_path, out_path):
    rows = load_rows(csv_path)
    by_check = defaultdict(list)
    for row in rows:
        by_check[row["check"]].append(row)
    with open(out_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["check", "trials", "failed", "max_ratio",
                         "median_ratio"])
        for name in sorted(by_check):
            group = by_check[name]
            ratios = sorted(
                x for x in (_to_float(r["ratio"]) for r in group) if x == x
            )
            failed = sum(1 for r in group if r["pass"] == "false")
            writer.writerow([
                name, len(group), failed,
                repr(ratios[-1]) if ratios else "",
                repr(ratios[len(ratios) // 2]) if ratios else "",
            ])
    return out_path
