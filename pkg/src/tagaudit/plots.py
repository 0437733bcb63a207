"""Matplotlib rendering of the study grids, written next to the data."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

_MARKERS = ("o", "s", "^", "D", "v", "P")


def render_error_grid(rows, *, x_label: str, out_path) -> str:
    """Line plot of mean precision error per profile.

    ``rows`` are (x, profile, err) triples as produced by the grid
    studies; one line per profile, saved as an image at ``out_path``.
    """
    by_profile: dict[str, list[tuple[float, float]]] = {}
    for x, profile, err in rows:
        by_profile.setdefault(profile, []).append((x, err))

    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for i, (profile, points) in enumerate(sorted(by_profile.items())):
        points.sort()
        ax.plot(
            [p[0] for p in points],
            [p[1] for p in points],
            marker=_MARKERS[i % len(_MARKERS)],
            label=profile,
        )
    ax.set_xlabel(x_label)
    ax.set_ylabel("mean |estimated - true| precision")
    ax.grid(True, alpha=0.4)
    ax.legend()
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return str(out_path)
