"""Figures for CLI reports.  Uses the Agg backend; nothing is shown on screen."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def _save(fig, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    # fixed metadata keeps the files byte-stable across runs
    fig.savefig(path, metadata={"Software": None, "Creation Time": None} if path.suffix == ".png" else None)
    plt.close(fig)
    return path


def plot_gram(gram, path, title="", labels=None):
    n = len(gram)
    fig, ax = plt.subplots(figsize=(1.2 + 0.45 * n, 1.0 + 0.45 * n))
    vals = [[float(x) for x in row] for row in gram]
    lim = max(1.0, max(abs(x) for row in vals for x in row))
    im = ax.imshow(vals, cmap="RdBu_r", vmin=-lim, vmax=lim)
    for i in range(n):
        for j in range(n):
            if gram[i][j]:
                ax.text(j, i, str(gram[i][j]), ha="center", va="center", fontsize=7)
    if labels:
        ax.set_xticks(range(n), labels, rotation=90, fontsize=7)
        ax.set_yticks(range(n), labels, fontsize=7)
    ax.set_title(title, fontsize=9)
    fig.colorbar(im, ax=ax, shrink=0.7)
    fig.tight_layout()
    return _save(fig, path)


def plot_search(report, path, title=""):
    """Candidates visited and hits per value of a, with the Cauchy-Schwarz bound marked."""
    fig, ax = plt.subplots(figsize=(5, 3))
    if report.per_a:
        a = [r[0] for r in report.per_a]
        ax.bar(a, [r[1] for r in report.per_a], width=1.2, color="#7a9cc6", label="leaves visited")
        ax.bar(a, [r[2] for r in report.per_a], width=0.6, color="#c0504d", label="hits")
        ax.legend(fontsize=7)
    for s in (-1, 1):
        ax.axvline(s * report.a_bound, color="k", ls="--", lw=0.8)
    ax.set_xlabel("a = K.h")
    ax.set_ylabel("count")
    ax.set_title(title or f"n = {report.n}, a_bound = {report.a_bound}", fontsize=9)
    fig.tight_layout()
    return _save(fig, path)


def plot_ledger(result, path, title=""):
    """Handle counts, Euler characteristic and ambient size after each move of a replay."""
    trace = result.trace
    steps = range(len(trace))
    fig, ax = plt.subplots(figsize=(5, 3))
    ax.plot(steps, [L.counts[2] for L in trace], marker=".", label="2-handles")
    ax.plot(steps, [L.counts[3] for L in trace], marker=".", label="3-handles")
    ax.plot(steps, [L.euler for L in trace], marker=".", label="Euler characteristic")
    ax.plot(steps, [L.ambient_n for L in trace], ls=":", label="blow-ups so far")
    ax.set_xlabel("move")
    ax.legend(fontsize=7)
    ax.set_title(title or result.script, fontsize=9)
    fig.tight_layout()
    return _save(fig, path)
