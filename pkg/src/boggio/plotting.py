"""Optional figure output for CLI tables (needs the ``plot`` extra: matplotlib)."""
from __future__ import annotations

import math


def render_table(path: str, columns, rows, x_col: str, y_cols, title: str) -> None:
    """Plot ``y_cols`` against ``x_col`` and save to ``path`` (format from suffix)."""
    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError as exc:  # pragma: no cover - depends on the environment
        raise RuntimeError("--plot needs matplotlib (pip install 'artifact[plot]')") from exc
    ix = columns.index(x_col)
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for name in y_cols:
        iy = columns.index(name)
        pts = [(r[ix], r[iy]) for r in rows
               if isinstance(r[iy], float) and math.isfinite(r[iy])]
        if pts:
            xs, ys = zip(*pts)
            ax.plot(xs, ys, marker="o", markersize=3, label=name)
    ax.set_xlabel(x_col)
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
