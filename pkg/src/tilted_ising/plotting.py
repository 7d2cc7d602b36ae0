"""SVG figures for the command-line tools, drawn with matplotlib's SVG backend."""

from __future__ import annotations

import matplotlib

matplotlib.use("svg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .chaostats import poisson_pdf, wigner_pdf  # noqa: E402

# text as paths: no font files referenced; fixed salt keeps ids stable
plt.rcParams.update({"svg.fonttype": "path", "svg.hashsalt": "tilted-ising"})


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def levels_plot(path, theta, levels, title=""):
    fig, ax = plt.subplots(figsize=(6, 4.5))
    ax.plot(theta, levels, color="k", lw=0.6)
    ax.set_xlabel(r"$\theta$")
    ax.set_ylabel("energy")
    ax.set_title(title)
    _save(fig, path)


def nnsd_plot(path, panels):
    """``panels``: list of (label, bin_centers, densities)."""
    n = len(panels)
    cols = min(n, 2)
    rows = (n + cols - 1) // cols
    fig, axes = plt.subplots(rows, cols, figsize=(4.5 * cols, 3.5 * rows), squeeze=False)
    s = np.linspace(0, 4, 400)
    for ax, (label, centers, dens) in zip(axes.flat, panels):
        if len(centers):
            w = centers[1] - centers[0] if len(centers) > 1 else 2 * centers[0]
            ax.bar(centers, dens, width=w, color="0.8", edgecolor="0.4")
        ax.plot(s, wigner_pdf(s), "b-", label="Wigner")
        ax.plot(s, poisson_pdf(s), "r--", label="Poisson")
        ax.set_xlim(0, 4)
        ax.set_xlabel("s")
        ax.set_ylabel("P(s)")
        ax.set_title(label)
        ax.legend(fontsize=8)
    for ax in list(axes.flat)[n:]:
        ax.axis("off")
    _save(fig, path)


def ks_plot(path, theta, mean_s_half, d_poisson, d_wigner):
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(6, 6), sharex=True)
    ax1.plot(theta, mean_s_half, "ko-", ms=3)
    ax1.set_ylabel(r"mean $S_{L/2}$ (bits)")
    ax2.plot(theta, d_poisson, "r^-", ms=3, label="Poisson")
    ax2.plot(theta, d_wigner, "bo-", ms=3, label="GOE")
    ax2.set_xlabel(r"$\theta$")
    ax2.set_ylabel("KS distance")
    ax2.legend()
    _save(fig, path)


def eigent_plot(path, panels):
    """``panels``: list of (label, energy, log_pr, Q, S_sh, S_half)."""
    n = len(panels)
    fig, axes = plt.subplots(2, n, figsize=(4.5 * n, 7), squeeze=False)
    for j, (label, e, log_pr, q, s_sh, s_half) in enumerate(panels):
        ax = axes[0, j]
        ax.plot(e, log_pr, "k-", lw=0.7, label="log PR")
        ax.plot(e, 4 * q, "k--", lw=0.7, label="4Q")
        ax.set_xlabel("energy")
        ax.set_title(label)
        ax.legend(fontsize=8)
        ax = axes[1, j]
        ax.plot(s_sh, s_half, "k.", ms=2)
        ax.set_xlabel(r"$S_{sh}$ (nats)")
        ax.set_ylabel(r"$S_{L/2}$ (bits)")
    _save(fig, path)


def sl_plot(path, curves):
    """``curves``: list of (label, l_values, S_l)."""
    fig, ax = plt.subplots(figsize=(5.5, 4))
    for label, l, s in curves:
        ax.plot(l, s, "o-", ms=3, label=label)
    ax.set_xlabel("l")
    ax.set_ylabel(r"$S_l$ (bits)")
    ax.legend(fontsize=8)
    _save(fig, path)


def avoided_plot(path, theta, energies, q, tangle, s_half, labels):
    fig, axes = plt.subplots(2, 2, figsize=(9, 7), sharex=True)
    for data, ax, name in zip(
        (energies, tangle, q, s_half),
        (axes[0, 0], axes[0, 1], axes[1, 1], axes[1, 0]),
        ("energy", "total tangle", "Q", r"$S_{L/2}$"),
    ):
        for col, lab in enumerate(labels):
            ax.plot(theta, data[:, col], lw=0.9, label=lab)
        ax.set_ylabel(name)
    axes[0, 0].legend(fontsize=8)
    for ax in axes[1]:
        ax.set_xlabel(r"$\theta$")
    _save(fig, path)


def crossing_plot(path, profiles):
    """``profiles``: list of (label, theta, avg_Q, avg_tangle)."""
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(6, 6))
    for label, theta, q, tau in profiles:
        ax1.plot(theta, q, lw=0.9, label=label)
        ax2.plot(theta, tau, lw=0.9, label=label)
    ax1.set_ylabel("pair-averaged Q")
    ax2.set_ylabel("pair-averaged total tangle")
    ax2.set_xlabel(r"$\theta$")
    ax1.legend(fontsize=8)
    _save(fig, path)


def concurrence_heatmap(path, panels):
    """``panels``: list of (label, times, nn_concurrence[t, pair])."""
    n = len(panels)
    cols = min(n, 2)
    rows = (n + cols - 1) // cols
    fig, axes = plt.subplots(rows, cols, figsize=(4 * cols, 4 * rows), squeeze=False)
    for ax, (label, times, c) in zip(axes.flat, panels):
        ax.imshow(
            c, aspect="auto", origin="lower", cmap="Greys", vmin=0, vmax=1,
            extent=(0.5, c.shape[1] + 0.5, times[0], times[-1]),
        )
        ax.set_xlabel("pair l")
        ax.set_ylabel("t")
        ax.set_title(label)
    for ax in list(axes.flat)[n:]:
        ax.axis("off")
    _save(fig, path)


def time_series_plot(path, series, ylabel):
    """``series``: list of (label, times, values)."""
    fig, ax = plt.subplots(figsize=(6, 4))
    for label, t, y in series:
        ax.plot(t, y, lw=0.8, label=label)
    ax.set_xlabel("t")
    ax.set_ylabel(ylabel)
    ax.legend(fontsize=8)
    _save(fig, path)
