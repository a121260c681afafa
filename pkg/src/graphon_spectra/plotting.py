"""PNG figures for experiment results.  Needs the optional matplotlib extra."""

from __future__ import annotations

import numpy as np


def available() -> bool:
    try:
        import matplotlib  # noqa: F401
    except ImportError:
        return False
    return True


def _pyplot():
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    return plt


def render(spec, path):
    draw = {"circle": _circle, "convergence": _convergence, "ws": _ws}[spec.kind]
    plt = _pyplot()
    fig = draw(plt, spec.data)
    # fixed metadata keeps repeated runs byte-identical
    fig.savefig(path, dpi=120, metadata={"Software": None})
    plt.close(fig)


def _circle(plt, data):
    fig, ax = plt.subplots(figsize=(5, 5))
    pts = np.array(data["points"], dtype=float).reshape(-1, 2)
    ax.scatter(pts[:, 0], pts[:, 1], s=18, label="samples")
    th = np.array(data["theory"], dtype=float).reshape(-1, 2)
    if len(th):
        ax.scatter(th[:, 0], th[:, 1], marker="D", color="red", s=40, label="representation basis")
    r = data.get("radius")
    if r:
        t = np.linspace(0, 2 * np.pi, 400)
        ax.plot(r * np.cos(t), r * np.sin(t), lw=0.8, color="grey")
    ax.set_aspect("equal")
    ax.axhline(0, lw=0.4, color="k")
    ax.axvline(0, lw=0.4, color="k")
    ax.set_xlabel("coefficient 2")
    ax.set_ylabel("coefficient 3")
    ax.legend(loc="upper right", fontsize=8)
    return fig


def _convergence(plt, data):
    fig, ax = plt.subplots(figsize=(6, 4))
    sizes = data["sizes"]
    for label, med in data["medians"].items():
        if label == "total":
            continue
        ax.loglog(sizes, med["hs"], marker="o", label=f"{label} HS")
    ax.set_xlabel("n")
    ax.set_ylabel("median distance")
    ax.legend(fontsize=8)
    return fig


def _ws(plt, data):
    fig, ax = plt.subplots(figsize=(6, 4))
    for cells, d in data["data"].items():
        idx = np.arange(1, len(d["closed"]) + 1)
        ax.plot(idx, d["closed"], "o", mfc="none", label="closed form")
        ax.plot(idx, d["discretized"], "x", label=f"{cells} cells")
    ax.set_xlabel("index")
    ax.set_ylabel("eigenvalue")
    ax.legend(fontsize=8)
    return fig
