"""SVG pictures of edge-count maps and of the tours in a population.

Colours and stroke widths are cosmetic. Every drawn edge is a ``<line>``
carrying a ``class`` (``edge``, ``opt``, ``shared`` or ``unique``) and
``data-u``/``data-v`` attributes, which keeps the output easy to inspect.
"""
from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np

from .diversity import Population
from .instance import Instance, Tour, tour_cost

PANEL = 320
MARGIN = 12
SHARED = "#d62728"
UNIQUE = "#1f77b4"
OPT = "#e41a1c"


def _scaler(instance: Instance, size: float):
    if instance.coords is None:
        raise ValueError(f"instance {instance.name!r} has no coordinates to draw")
    xy = np.asarray(instance.coords, dtype=float)
    lo = xy.min(axis=0)
    span = float((xy.max(axis=0) - lo).max()) or 1.0
    scale = (size - 2 * MARGIN) / span

    def point(v: int) -> tuple[float, float]:
        x, y = xy[v]
        # SVG y grows downwards
        return MARGIN + (x - lo[0]) * scale, size - MARGIN - (y - lo[1]) * scale

    return point


def _line(point, u, v, cls, stroke, width, opacity=1.0, dx=0.0) -> str:
    (x1, y1), (x2, y2) = point(u), point(v)
    return (
        f'<line class="{cls}" data-u="{u}" data-v="{v}" '
        f'x1="{x1 + dx:.2f}" y1="{y1:.2f}" x2="{x2 + dx:.2f}" y2="{y2:.2f}" '
        f'stroke="{stroke}" stroke-width="{width}" stroke-opacity="{opacity:.4f}"/>'
    )


def _vertices(point, n, dx=0.0) -> list[str]:
    out = []
    for v in range(n):
        x, y = point(v)
        out.append(f'<circle class="vertex" cx="{x + dx:.2f}" cy="{y:.2f}" r="2.2" fill="#222"/>')
    return out


def _svg(width, height, body, title) -> str:
    return "\n".join(
        [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
            f'viewBox="0 0 {width} {height}">',
            f"<title>{title}</title>",
            f'<rect width="{width}" height="{height}" fill="white"/>',
            *body,
            "</svg>",
            "",
        ]
    )


def render_edge_counts(pop: Population, instance: Instance, opt_tour: Tour | None = None) -> str:
    """One line per used edge, opacity proportional to its count over ``mu``."""
    point = _scaler(instance, PANEL)
    iu, ju = np.nonzero(np.triu(pop.counts, k=1))
    body = []
    for u, v in zip(iu.tolist(), ju.tolist()):
        body.append(_line(point, u, v, "edge", "black", 1.6, pop.counts[u, v] / pop.size))
    if opt_tour is not None:
        for u, v in sorted(opt_tour.edges):
            body.append(_line(point, u, v, "opt", OPT, 0.8))
    body += _vertices(point, instance.n)
    title = escape(f"{instance.name}: edge counts of {pop.size} tours")
    return _svg(PANEL, PANEL, body, title)


def render_population(pop: Population, instance: Instance) -> str:
    """One panel per tour, cheapest first; red edges are shared, blue are unique."""
    point = _scaler(instance, PANEL)
    tours = sorted(pop.tours, key=lambda t: tour_cost(instance, t))
    body = []
    for k, tour in enumerate(tours):
        dx = k * PANEL
        body.append(
            f'<g class="panel" data-cost="{tour_cost(instance, tour)}">'
        )
        for u, v in sorted(tour.edges):
            shared = pop.counts[u, v] >= 2
            body.append(_line(point, u, v, "shared" if shared else "unique",
                              SHARED if shared else UNIQUE, 1.4, dx=dx))
        body += _vertices(point, instance.n, dx)
        body.append("</g>")
    title = escape(f"{instance.name}: {pop.size} tours")
    return _svg(PANEL * len(tours), PANEL, body, title)
