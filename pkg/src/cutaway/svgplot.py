"""Minimal deterministic SVG line plots.

Hand-rolled on purpose: the analyze/train commands must emit byte-identical
plots for a fixed seed, and a full plotting stack buys nothing for two line
charts. Floats are written with fixed precision so output is stable across
platforms.
"""

from __future__ import annotations

from typing import Sequence

_PALETTE = ("#2166ac", "#b2182b", "#1b7837", "#762a83")
_MARGIN = 46.0


def _fmt(value: float) -> str:
    return f"{value:.2f}".rstrip("0").rstrip(".")


def svg_line_plot(
    curves: Sequence[tuple[str, Sequence[float], Sequence[float]]],
    *,
    title: str,
    x_label: str,
    y_label: str,
    width: int = 640,
    height: int = 280,
    y_min: float = 0.0,
    y_max: float | None = None,
) -> str:
    """Render labelled (xs, ys) curves into a standalone SVG document."""
    if not curves:
        raise ValueError("need at least one curve")
    all_x = [x for _, xs, _ in curves for x in xs]
    all_y = [y for _, _, ys in curves for y in ys]
    if not all_x:
        raise ValueError("curves must contain points")
    x_lo, x_hi = min(all_x), max(all_x)
    y_lo = y_min
    y_hi = y_max if y_max is not None else max(max(all_y), y_lo + 1e-9)
    if x_hi <= x_lo:
        x_hi = x_lo + 1.0
    if y_hi <= y_lo:
        y_hi = y_lo + 1.0
    plot_w = width - 2 * _MARGIN
    plot_h = height - 2 * _MARGIN

    def px(x: float) -> float:
        return _MARGIN + (x - x_lo) / (x_hi - x_lo) * plot_w

    def py(y: float) -> float:
        return height - _MARGIN - (y - y_lo) / (y_hi - y_lo) * plot_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2:.1f}" y="18" text-anchor="middle" font-size="13">{title}</text>',
    ]
    # axes
    parts.append(
        f'<line x1="{_MARGIN}" y1="{height - _MARGIN}" x2="{width - _MARGIN}" '
        f'y2="{height - _MARGIN}" stroke="black"/>'
    )
    parts.append(
        f'<line x1="{_MARGIN}" y1="{_MARGIN}" x2="{_MARGIN}" '
        f'y2="{height - _MARGIN}" stroke="black"/>'
    )
    for k in range(5):
        fx = x_lo + (x_hi - x_lo) * k / 4
        fy = y_lo + (y_hi - y_lo) * k / 4
        parts.append(
            f'<text x="{px(fx):.1f}" y="{height - _MARGIN + 16:.1f}" '
            f'text-anchor="middle">{_fmt(fx)}</text>'
        )
        parts.append(
            f'<text x="{_MARGIN - 6:.1f}" y="{py(fy) + 4:.1f}" '
            f'text-anchor="end">{_fmt(fy)}</text>'
        )
    parts.append(
        f'<text x="{width / 2:.1f}" y="{height - 8:.1f}" text-anchor="middle">{x_label}</text>'
    )
    parts.append(
        f'<text x="14" y="{height / 2:.1f}" text-anchor="middle" '
        f'transform="rotate(-90 14 {height / 2:.1f})">{y_label}</text>'
    )
    for c, (label, xs, ys) in enumerate(curves):
        color = _PALETTE[c % len(_PALETTE)]
        pts = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in zip(xs, ys))
        parts.append(
            f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>'
        )
        parts.append(
            f'<text x="{width - _MARGIN - 4:.1f}" y="{_MARGIN + 14 + 14 * c:.1f}" '
            f'text-anchor="end" fill="{color}">{label}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
