"""Optional figure rendering. matplotlib is imported only when a figure is asked for."""

from __future__ import annotations

from typing import Mapping

from .regions import RateRegion


class PlottingUnavailable(RuntimeError):
    pass


def render_regions(regions: Mapping[str, RateRegion], path, title: str | None = None) -> None:
    """Draw each region's boundary (filled lightly) and save to ``path``."""
    try:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError as exc:
        raise PlottingUnavailable("matplotlib is required for --figure") from exc

    fig, ax = plt.subplots(figsize=(5, 4.5))
    for label, reg in regions.items():
        v = reg.vertices
        if len(v) >= 3:
            ax.fill(v[:, 0], v[:, 1], alpha=0.12)
            closed = list(range(len(v))) + [0]
            ax.plot(v[closed, 0], v[closed, 1], lw=1.4, label=label)
        else:
            ax.plot(v[:, 0], v[:, 1], "o-", lw=1.4, label=label)
    ax.set_xlabel("R_c [bits]")
    ax.set_ylabel("R_p [bits]")
    ax.set_xlim(left=0)
    ax.set_ylim(bottom=0)
    if title:
        ax.set_title(title)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
