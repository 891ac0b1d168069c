"""Figure rendering for the CLI report paths.

Every command that emits a delimited report can render a companion PNG
next to it; these helpers keep matplotlib usage in one place (Agg
backend, no interactive state).
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = [
    "save_benchmark_plot",
    "save_curve_plot",
    "save_design_plot",
    "save_rates_plot",
    "save_trace_plot",
]


def save_curve_plot(x, values, path, label: str = "") -> None:
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.2))
    ax1.plot(x, values, lw=1.2)
    ax1.set_xlabel("x")
    ax1.set_ylabel("r(x)")
    ax1.axhline(0.0, color="0.8", lw=0.6)
    pos = np.asarray(x) >= 0
    ax2.semilogy(np.asarray(x)[pos], np.abs(np.asarray(values)[pos]) + 1e-300, lw=1.2)
    ax2.set_xlabel("x")
    ax2.set_ylabel("|r(x)|")
    if label:
        fig.suptitle(label)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_trace_plot(records, path) -> None:
    evals = [r.evaluations for r in records]
    losses = [r.loss for r in records]
    fig, ax = plt.subplots(figsize=(6, 3.2))
    ax.semilogy(evals, losses, lw=1.2)
    ax.set_xlabel("loss evaluations")
    ax.set_ylabel("loss")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_rates_plot(rows, path) -> None:
    gaps = sorted({r["G"] for r in rows})
    families = list(dict.fromkeys(r["filter"] for r in rows))
    fig, axes = plt.subplots(1, len(gaps), figsize=(3.2 * len(gaps), 3.2), squeeze=False)
    for ax, G in zip(axes[0], gaps):
        for name in families:
            pts = sorted((r["poles"], r["worst_case_rate"]) for r in rows
                         if r["G"] == G and r["filter"] == name)
            ax.semilogy([p for p, _ in pts], [v for _, v in pts], "o-", label=name, ms=4)
        ax.set_title(f"G = {G}")
        ax.set_xlabel("poles")
    axes[0][0].set_ylabel("worst-case rate")
    axes[0][-1].legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_design_plot(evaluations, objectives, path) -> None:
    obj = np.asarray(objectives, dtype=float)
    finite = np.isfinite(obj)
    fig, ax = plt.subplots(figsize=(6, 3.2))
    ax.semilogy(np.asarray(evaluations)[finite], obj[finite], ".", ms=3, label="candidates")
    ax.semilogy(evaluations, np.fmin.accumulate(np.where(finite, obj, np.inf)),
                lw=1.2, label="best so far")
    ax.set_xlabel("evaluation")
    ax.set_ylabel("worst-case rate")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_benchmark_plot(rows, path) -> None:
    problems = list(dict.fromkeys(r["problem_id"] for r in rows))
    filters = list(dict.fromkeys(r["filter"] for r in rows))
    width = 0.8 / max(len(filters), 1)
    fig, ax = plt.subplots(figsize=(max(6, 1.2 * len(problems)), 3.2))
    for j, fname in enumerate(filters):
        counts = [next(r["iterations"] for r in rows
                       if r["problem_id"] == p and r["filter"] == fname)
                  for p in problems]
        ax.bar(np.arange(len(problems)) + j * width, counts, width, label=fname)
    ax.set_xticks(np.arange(len(problems)) + 0.4 - width / 2)
    ax.set_xticklabels(problems, fontsize=7)
    ax.set_ylabel("iterations")
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
