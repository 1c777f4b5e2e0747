"""Figures written next to the textual reports when ``--plot DIR`` is given.

Matplotlib is imported lazily with the non-interactive backend, so the rest
of the package works without it.
"""
from __future__ import annotations

from pathlib import Path


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def _save(fig, out_dir: Path, name: str) -> str:
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / name
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    _pyplot().close(fig)
    return str(path)


def plot_suite(result, out_dir: Path) -> str:
    """Passed and failed cases, plus the instance tallies of the suite."""
    plt = _pyplot()
    fig, axes = plt.subplots(1, 2, figsize=(8, 3))
    ax = axes[0]
    failed = result.cases - result.passed
    ax.bar(["passed", "failed"], [result.passed, failed], color=["#4c72b0", "#c44e52"])
    ax.set_title(f"{result.suite} (seed {result.seed})")
    ax.set_ylabel("cases")
    ax = axes[1]
    tallies = sorted(result.tallies.items())
    if tallies:
        ax.bar([k for k, _ in tallies], [v for _, v in tallies], color="#55a868")
        ax.tick_params(axis="x", labelrotation=20)
    else:
        ax.text(0.5, 0.5, "no instance tallies", ha="center", va="center")
        ax.set_axis_off()
    ax.set_title("instance mix")
    return _save(fig, out_dir, f"props_{result.suite}_seed{result.seed}.png")


def plot_syncat(sc, out_dir: Path, stem: str) -> str:
    """Heat map of hom-set class counts between the enumerated contexts."""
    plt = _pyplot()
    n = len(sc.contexts)
    grid = [[sc.hom_count(i, j) for j in range(n)] for i in range(n)]
    fig, ax = plt.subplots(figsize=(1 + 0.5 * n, 1 + 0.5 * n))
    im = ax.imshow(grid, cmap="Blues")
    for i in range(n):
        for j in range(n):
            ax.text(j, i, str(grid[i][j]), ha="center", va="center", fontsize=7)
    ax.set_xlabel("target context")
    ax.set_ylabel("source context")
    ax.set_xticks(range(n))
    ax.set_yticks(range(n))
    ax.set_title(f"hom classes ({stem})")
    fig.colorbar(im, ax=ax, shrink=0.8)
    return _save(fig, out_dir, f"syncat_{stem}_d{sc.bounds.depth}_s{sc.bounds.size}.png")


def plot_fibers(model, out_dir: Path, stem: str) -> str:
    """Fiber sizes of each sort over each base object."""
    plt = _pyplot()
    objs = list(model.base.objects)
    sorts = list(model.fibrations)
    fig, ax = plt.subplots(figsize=(max(4, 0.8 * len(objs) * max(1, len(sorts)) / 2), 3))
    width = 0.8 / max(1, len(sorts))
    for k, A in enumerate(sorts):
        D = model.fibrations[A]
        xs = [i + k * width for i in range(len(objs))]
        ax.bar(xs, [len(D.fiber(a)) for a in objs], width=width, label=str(A))
    ax.set_xticks([i + 0.4 - width / 2 for i in range(len(objs))])
    ax.set_xticklabels([str(a) for a in objs])
    ax.set_ylabel("fiber size")
    ax.set_title(f"fibers of {model.name or stem}")
    ax.legend(fontsize=7)
    return _save(fig, out_dir, f"lang_{stem}.png")
