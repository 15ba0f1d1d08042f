"""Matplotlib rendering of the traced moduli curves."""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .moduli import CORNER_LABELS, _U, _W, km_locus, project_hemisphere  # noqa: E402


def _xy(v):
    v = np.asarray(v, dtype=float)
    v = v / np.linalg.norm(v)
    if v.sum() < 0:
        v = -v
    return v @ _U, v @ _W


def moduli_figure(branches, title: str | None = None):
    """Return a figure with the branches on the hemisphere around [1:1:1]."""
    fig, ax = plt.subplots(figsize=(6, 6))
    t = np.linspace(0, 2 * math.pi, 361)
    ax.plot(np.cos(t), np.sin(t), color="0.6", lw=0.8)
    cmap = plt.get_cmap("tab10")
    for br in branches:
        for k, seg in enumerate(project_hemisphere(br.points)):
            ax.plot(seg[:, 0], seg[:, 1], color=cmap(br.id % 10), lw=1.6,
                    label=f"branch {br.id}: {br.endpoints[0]}-{br.endpoints[1]}" if k == 0 else None)
    for k, lab in enumerate(CORNER_LABELS):
        x, y = _xy(np.eye(3)[k])
        ax.plot([x], [y], "ko", ms=5)
        ax.annotate(lab, (x, y), textcoords="offset points", xytext=(6, 6))
    for L in km_locus(1.0):
        x, y = _xy((1.0, L, 1.0))
        ax.plot([x], [y], marker="*", color="k", ms=10)
    ax.set_aspect("equal")
    ax.set_xlim(-1.05, 1.05)
    ax.set_ylim(-1.05, 1.05)
    ax.axis("off")
    ax.legend(loc="lower left", fontsize=7, frameon=False)
    if title:
        ax.set_title(title)
    fig.tight_layout()
    return fig


def save_moduli_figure(branches, path, title: str | None = None, dpi: int = 150) -> None:
    fig = moduli_figure(branches, title)
    suffix = str(path).rsplit(".", 1)[-1].lower()
    # strip timestamps/version stamps so repeated renders are byte-identical
    meta = {"png": {"Software": None}, "svg": {"Date": None}, "pdf": {"CreationDate": None}}.get(suffix)
    fig.savefig(path, dpi=dpi, metadata=meta)
    plt.close(fig)
