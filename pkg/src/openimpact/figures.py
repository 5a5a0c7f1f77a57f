"""Matplotlib rendering of the openness/impact bubble chart."""

import matplotlib
matplotlib.use("Agg")   # file output only, no display dependency
import matplotlib.pyplot as plt


def scatter_figure(points, path):
    """Render scatter points as a labeled bubble chart and save to path.

    Bubble area is proportional to each country's fractional output;
    reference lines mark the quadrant boundaries at x=0 and y=1.
    """
    fig, ax = plt.subplots(figsize=(8.0, 6.0))
    if points:
        max_size = max(p.size for p in points)
        areas = [2000.0 * p.size / max_size for p in points]
        ax.scatter([p.x for p in points], [p.y for p in points],
                   s=areas, alpha=0.45, edgecolors="black", linewidths=0.6)
        for p in points:
            ax.annotate(p.country_code, (p.x, p.y),
                        ha="center", va="center", fontsize=7)
    ax.axvline(0.0, color="gray", linewidth=0.8, linestyle="--")
    ax.axhline(1.0, color="gray", linewidth=0.8, linestyle="--")
    ax.set_xlabel("Openness (first component score)")
    ax.set_ylabel("Fractional field-weighted citation impact")
    ax.set_title("Openness and citation impact, bubble size = fractional output")
    fig.tight_layout()
    fig.savefig(path, dpi=150, metadata={"Software": None})
    plt.close(fig)
