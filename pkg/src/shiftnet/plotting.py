"""Figure rendering for run traces and trial-averaged activity curves.

Everything here converts exact rationals to floats at the last moment; the
plots are a reporting surface only and never feed back into computations.
"""

from __future__ import annotations

from typing import List, Sequence


def _mpl():
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    return plt


def save_run_figure(net, trace, path: str, title: str = "") -> str:
    """Per-layer activation raster over macro steps for a network run."""
    plt = _mpl()
    steps = range(1, len(trace.steps) + 1)
    mcl_x = [float(s.after_mcl[net.mcl_x]) for s in trace.steps]
    mcl_y = [float(s.after_mcl[net.mcl_y]) for s in trace.steps]
    bsl = [[float(s.after_bsl[i]) for i in net.bsl_x + net.bsl_y]
           for s in trace.steps]
    ltl = [[float(s.after_ltl[i]) for pair in net.ltl.values() for i in pair]
           for s in trace.steps]

    fig, axes = plt.subplots(3, 1, figsize=(8, 7), sharex=True)
    axes[0].step(steps, mcl_x, where="post", label="c_x")
    axes[0].step(steps, mcl_y, where="post", label="c_y")
    axes[0].set_ylabel("configuration")
    axes[0].set_ylim(-0.05, 1.05)
    axes[0].legend(loc="upper right", fontsize=8)
    for ax, data, label in ((axes[1], bsl, "selection"), (axes[2], ltl, "transformation")):
        if data and data[0]:
            ax.imshow([list(col) for col in zip(*data)], aspect="auto",
                      interpolation="nearest", origin="lower",
                      extent=(0.5, len(trace.steps) + 0.5, -0.5, len(data[0]) - 0.5))
        ax.set_ylabel(label)
    axes[2].set_xlabel("macro step")
    if title:
        axes[0].set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_ian_figure(net, rows: List[dict], path: str, title: str = "") -> str:
    """Tape codes and mean activity over macro steps for an interactive run."""
    plt = _mpl()
    steps = [row["step"] for row in rows]
    fig, axes = plt.subplots(2, 1, figsize=(8, 5), sharex=True)
    for tape in net.tapes:
        axes[0].step(steps, [float(row[tape]) for row in rows], where="post",
                     label=tape)
    axes[0].set_ylabel("tape codes")
    axes[0].legend(loc="upper right", fontsize=8)
    axes[1].step(steps, [float(row["mean_activity"]) for row in rows], where="post")
    axes[1].set_ylabel("mean activity")
    axes[1].set_xlabel("macro step")
    if title:
        axes[0].set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_erp_figure(results: Sequence, path: str, title: str = "") -> str:
    """Mean curves with one standard-deviation bands per condition."""
    plt = _mpl()
    fig, ax = plt.subplots(figsize=(8, 4.5))
    for res in results:
        means = [float(m) for m in res.means]
        stds = res.stds()
        ax.plot(res.steps, means, label=res.condition or "condition")
        ax.fill_between(res.steps,
                        [m - s for m, s in zip(means, stds)],
                        [m + s for m, s in zip(means, stds)], alpha=0.3)
    ax.set_xlabel("step")
    ax.set_ylabel("mean network activity")
    ax.legend(loc="upper right", fontsize=8)
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
