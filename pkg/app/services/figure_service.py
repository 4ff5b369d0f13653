"""
Figure Service - deterministic SVG plots of staircases and S_P estimates.

- Staircase points as unit squares (the usual staircase picture)
- Scaled staircase points, the inner hull A_{P,d} and the exact S_P per dilate
- Fixed view box, sorted drawing order, fixed hash salt and no date metadata,
  so the same input always produces the same bytes
"""

import io
import logging
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
from matplotlib.patches import Polygon as PolygonPatch, Rectangle  # noqa: E402

from app.utils.lattice_geometry import Polygon

logger = logging.getLogger(__name__)

matplotlib.rcParams["svg.hashsalt"] = "staircase"
matplotlib.rcParams["svg.fonttype"] = "none"

SVG_METADATA = {"Date": None, "Creator": None}


def _save(fig) -> str:
    buffer = io.StringIO()
    fig.savefig(buffer, format="svg", metadata=SVG_METADATA)
    plt.close(fig)
    return buffer.getvalue()


def _outline(P: Polygon) -> List[Tuple[float, float]]:
    return [(float(x), float(y)) for x, y in P.vertices]


class FigureService:
    """Renders SVG strings; callers decide where to write them."""

    def staircase_svg(self, elements: Iterable[Sequence[int]], title: str = "") -> str:
        cells = sorted(tuple(e) for e in elements)
        size = max([max(c) for c in cells] + [1]) + 2
        fig, ax = plt.subplots(figsize=(4, 4))
        for x, y in cells:
            ax.add_patch(Rectangle((x, y), 1, 1, facecolor="#9ecae1", edgecolor="#08519c", linewidth=0.8))
        ax.set_xlim(0, size)
        ax.set_ylim(0, size)
        ax.set_aspect("equal")
        if title:
            ax.set_title(title)
        logger.debug(f"staircase figure with {len(cells)} cells")
        return _save(fig)

    def spoly_svg(
        self,
        panels: Sequence[Tuple[Fraction, Iterable[Sequence[int]], Optional[Polygon]]],
        exact: Optional[Polygon] = None,
    ) -> str:
        """One panel per dilate: E/d as dots, A_{P,d} filled, exact S_P outlined."""
        panels = sorted(panels, key=lambda p: p[0])
        count = max(len(panels), 1)
        fig, axes = plt.subplots(1, count, figsize=(3 * count, 3), squeeze=False)
        for ax, (d, elements, inner) in zip(axes[0], panels):
            scaled = sorted((Fraction(e[0]) / d, Fraction(e[1]) / d) for e in elements)
            if inner is not None and inner.dim == 2:
                ax.add_patch(PolygonPatch(_outline(inner), closed=True, facecolor="#c6dbef", edgecolor="none"))
            if exact is not None:
                ax.add_patch(PolygonPatch(_outline(exact), closed=True, fill=False, edgecolor="#cb181d"))
            ax.scatter([float(x) for x, _ in scaled], [float(y) for _, y in scaled], s=6, color="#08306b")
            bound = max([float(max(x, y)) for x, y in scaled] + [1.0]) * 1.1
            if exact is not None:
                bound = max(bound, max(float(max(x, y)) for x, y in exact.vertices) * 1.1)
            ax.set_xlim(0, bound)
            ax.set_ylim(0, bound)
            ax.set_aspect("equal")
            ax.set_title(f"d = {d}")
        return _save(fig)


figure_service = FigureService()
