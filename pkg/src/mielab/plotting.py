"""Optional PNG figures for CLI runs (requires matplotlib)."""

from __future__ import annotations

import math


def _pyplot():
    try:
        import matplotlib
    except ImportError as exc:
        raise SystemExit("figures need matplotlib: pip install 'artifact[figures]'") from exc
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def figures_for(subcommand, summary, rows, out_dir):
    """Write the figures relevant to ``subcommand`` and return their paths."""
    if subcommand == "saw-enum":
        return [plot_saw_growth(rows, out_dir / "saw-enum.png")]
    if subcommand == "sebd":
        return [plot_sebd_profile(rows, out_dir / "sebd.png")]
    if subcommand == "mie-sim":
        return [plot_mie_histogram(rows, out_dir / "mie-sim.png")]
    return []


def plot_saw_growth(rows, path):
    plt = _pyplot()
    ns = [r["n"] for r in rows if r["n"] > 0]
    roots = [r["root"] for r in rows if r["n"] > 0]
    fig, ax = plt.subplots(figsize=(4.5, 3.2))
    ax.plot(ns, roots, "o-", label="c_n^(1/n)")
    ax.axhline(math.exp(0.97), ls="--", color="gray", label="e^0.97")
    ax.set_xlabel("walk length n")
    ax.set_ylabel("c_n^(1/n)")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_sebd_profile(rows, path):
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(4.5, 3.2))
    runs = sorted({r["run"] for r in rows})
    for run in runs:
        pts = [(r["t"], r["half_chain_entropy"]) for r in rows if r["run"] == run]
        ax.plot(*zip(*pts), color="C0", alpha=0.4)
    ax.set_xlabel("column t")
    ax.set_ylabel("boundary half-chain entropy (nats)")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_mie_histogram(rows, path):
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(4.5, 3.2))
    ax.hist([r["mie_sampled_nats"] for r in rows], bins=20)
    ax.set_xlabel("sampled MIE per circuit (nats)")
    ax.set_ylabel("circuits")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
