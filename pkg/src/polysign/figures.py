"""Figure rendering for the report path.

All figures are written straight to files with the Agg backend, so no
display is ever required.  Three-dimensional grids are shown as the
mid-plane slice.  PNG metadata is pinned so repeated runs produce
identical bytes.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_SAVE_KWARGS = {"dpi": 110, "metadata": {"Software": "polysign"}}


def _field_image(function) -> tuple[np.ndarray, tuple]:
    """Embed interior values in the full lattice; NaN outside."""
    domain = function.domain
    grid = np.full(domain.lattice_shape, np.nan)
    grid[domain.mask] = function.values
    if domain.dimension == 3:
        grid = grid[:, :, grid.shape[2] // 2]
    extent = (domain.origin[0],
              domain.origin[0] + domain.h * (domain.lattice_shape[0] - 1),
              domain.origin[1],
              domain.origin[1] + domain.h * (domain.lattice_shape[1] - 1))
    return grid.T, extent


def _draw_field(ax, function, title: str) -> None:
    grid, extent = _field_image(function)
    image = ax.imshow(grid, origin="lower", extent=extent, cmap="RdBu_r",
                      interpolation="nearest")
    ax.set_title(title)
    ax.figure.colorbar(image, ax=ax, shrink=0.8)


def render_solution(path: str, function, title: str = "u") -> None:
    fig, ax = plt.subplots(figsize=(6, 4.5))
    _draw_field(ax, function, title)
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KWARGS)
    plt.close(fig)


def render_decomposition(path: str, solution) -> None:
    """Three aligned panels: u, the nonnegative parts u_oplus, u_ominus."""
    fig, axes = plt.subplots(3, 1, figsize=(7, 9))
    _draw_field(axes[0], solution.u, "u")
    _draw_field(axes[1], solution.u_oplus, "u_oplus")
    _draw_field(axes[2], solution.u_ominus, "u_ominus")
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KWARGS)
    plt.close(fig)


def render_histogram(path: str, edges: np.ndarray, counts: np.ndarray,
                     title: str = "kernel ratio histogram") -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.bar(edges[:-1], counts, width=np.diff(edges), align="edge",
           color="tab:blue", edgecolor="none")
    ax.set_title(title)
    ax.set_xlabel("(G + c2 w w) / H")
    ax.set_ylabel("pairs")
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KWARGS)
    plt.close(fig)


def render_trial_ratios(path: str, report) -> None:
    """Per-trial target/bound ratios, one series per resolution."""
    fig, ax = plt.subplots(figsize=(6, 4))
    by_cells: dict[int, list[tuple[int, float]]] = {}
    for rec in report.trials:
        by_cells.setdefault(rec["cells"], []).append(
            (rec["trial"], rec["ratio"]))
    for cells, pairs in sorted(by_cells.items()):
        pairs.sort()
        ax.plot([t for t, _ in pairs], [r for _, r in pairs],
                marker="o", label=f"cells={cells}")
    ax.axhline(report.empirical_constant, color="0.4", linestyle="--",
               label="empirical constant")
    ax.set_title(report.kind)
    ax.set_xlabel("trial")
    ax.set_ylabel("target / bound")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KWARGS)
    plt.close(fig)
