"""SVG emission: distribution histograms, loss curves, and the sweep heatmap.

Rendering is headless and reproducible: fixed hash salt, no Date metadata,
atomic writes. Histogram bars are indexed by outcome; the tick label is the
binary expansion of the index (bit k of the index is output bit k, so bit 0
is the rightmost character).
"""

import io

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402 - backend must be set first
import numpy as np  # noqa: E402

from .persist import atomic_write_text  # noqa: E402
from .statevector import ProbDist  # noqa: E402

matplotlib.rcParams["svg.hashsalt"] = "bornlab"


def _save(fig, path) -> None:
    buf = io.StringIO()
    fig.savefig(buf, format="svg", metadata={"Date": None})
    plt.close(fig)
    atomic_write_text(path, buf.getvalue())


def _bit_labels(n_bits: int) -> list:
    return [format(i, f"0{n_bits}b") for i in range(1 << n_bits)]


def save_histogram(path, dist: ProbDist, title: str) -> None:
    n = 1 << dist.n_bits
    fig, ax = plt.subplots(figsize=(max(4.0, 0.22 * n), 3.0))
    ax.bar(np.arange(n), dist.probs, color="#3465a4")
    ax.set_xticks(np.arange(n))
    ax.set_xticklabels(_bit_labels(dist.n_bits), rotation=90,
                       fontsize=8 if dist.n_bits <= 4 else 6)
    ax.set_ylabel("probability")
    ax.set_title(title, fontsize=10)
    fig.tight_layout()
    _save(fig, path)


def save_loss_curves(path, curves, title: str) -> None:
    """curves: iterable of (label, loss array)."""
    fig, ax = plt.subplots(figsize=(5.0, 3.2))
    for label, losses in curves:
        ax.plot(np.arange(len(losses)), losses, label=label, linewidth=1.2)
    ax.set_xlabel("iteration")
    ax.set_ylabel("KL loss")
    ax.set_title(title, fontsize=10)
    ax.legend(fontsize=8)
    fig.tight_layout()
    _save(fig, path)


def save_kl_heatmap(path, cells: dict, title: str) -> None:
    """cells: {(n_in, n_hid): (kl_mean, param_count)}; missing cells stay gray."""
    n_in_values = sorted({k[0] for k in cells})
    n_hid_values = sorted({k[1] for k in cells})
    grid = np.full((len(n_hid_values), len(n_in_values)), np.nan)
    for (n_in, n_hid), (kl, _count) in cells.items():
        grid[n_hid_values.index(n_hid), n_in_values.index(n_in)] = kl

    cmap = matplotlib.colormaps["viridis"].copy()
    cmap.set_bad("#d3d3d3")
    fig, ax = plt.subplots(figsize=(4.6, 3.8))
    image = ax.imshow(np.ma.masked_invalid(grid), origin="lower", cmap=cmap)
    ax.set_xticks(range(len(n_in_values)), [str(v) for v in n_in_values])
    ax.set_yticks(range(len(n_hid_values)), [str(v) for v in n_hid_values])
    ax.set_xlabel("input neurons")
    ax.set_ylabel("hidden neurons")
    ax.set_title(title, fontsize=10)
    for (n_in, n_hid), (_kl, count) in cells.items():
        ax.text(n_in_values.index(n_in), n_hid_values.index(n_hid), str(count),
                ha="center", va="center", color="white", fontsize=8)
    fig.colorbar(image, ax=ax, label="mean KL")
    fig.tight_layout()
    _save(fig, path)
