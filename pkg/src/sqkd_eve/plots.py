"""Advantage-curve figure rendering.

Everything renders through the Agg backend to plain files; no display is
ever required.  The canonical figure has two panels: the full disturbance
range [0, 0.5] and a magnified low-disturbance panel where the two-way
attack overtakes the one-way attack, with the crossover marked.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .analytic import CurvePoint, crossover_disturbance


def _draw_panel(ax, points: tuple[CurvePoint, ...], title: str) -> None:
    d = [pt.d for pt in points]
    series = (
        ("a1", "one-way", "-"),
        ("a2_match", "two-way, probes match", "--"),
        ("a2_avg", "two-way, average", "-."),
        ("a2_avg_h", "two-way vs Hadamard resend", ":"),
    )
    for attr, label, style in series:
        ax.plot(d, [getattr(pt, attr) for pt in points], style, label=label)
    d_star = crossover_disturbance()
    if d and d[0] <= d_star <= d[-1]:
        ax.axvline(d_star, color="gray", linewidth=0.8, linestyle=(0, (2, 2)))
        ax.annotate(
            f"D* = {d_star:.4f}",
            xy=(d_star, 0.0),
            xytext=(3, 4),
            textcoords="offset points",
            fontsize=8,
            color="gray",
        )
    ax.set_title(title)
    ax.set_xlabel("disturbance D")
    ax.set_ylabel("guessing advantage")
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8)


def advantage_figure(
    full: tuple[CurvePoint, ...], magnified: tuple[CurvePoint, ...]
):
    """Two-panel comparison of attacker advantages over the disturbance axis."""
    fig, axes = plt.subplots(1, 2, figsize=(11, 4.5))
    _draw_panel(axes[0], tuple(full), "full range")
    _draw_panel(axes[1], tuple(magnified), "low-disturbance detail")
    fig.tight_layout()
    return fig


def save_advantage_figure(
    full: tuple[CurvePoint, ...],
    magnified: tuple[CurvePoint, ...],
    path: str,
    dpi: int = 150,
) -> None:
    """Render the advantage figure to `path`; output is byte-reproducible."""
    fig = advantage_figure(full, magnified)
    try:
        # Suppress the writer's software tag so repeated renders of the
        # same data produce identical bytes.
        fig.savefig(path, dpi=dpi, metadata={"Software": None})
    finally:
        plt.close(fig)
