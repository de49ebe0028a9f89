"""Minimal hand-rolled SVG line charts for monthly series.

No plotting dependency: charts are assembled as strings, so output is
deterministic byte-for-byte. Series are drawn over the union of their
months; gaps (missing months) break the line. An optional event month is
marked with a dashed vertical rule.
"""
from __future__ import annotations

PALETTE = (
    "#1f77b4",
    "#d62728",
    "#2ca02c",
    "#9467bd",
    "#ff7f0e",
    "#8c564b",
    "#e377c2",
    "#7f7f7f",
)

MARGIN_LEFT = 64
MARGIN_RIGHT = 24
MARGIN_TOP = 40
MARGIN_BOTTOM = 48


def _fmt(x: float) -> str:
    return f"{x:.2f}"


def month_x(months: list[str], month: str, width: int) -> float:
    """Pixel x-coordinate of a month on the chart's shared axis."""
    span = max(len(months) - 1, 1)
    inner = width - MARGIN_LEFT - MARGIN_RIGHT
    return MARGIN_LEFT + inner * months.index(month) / span


def render_line_chart(
    series: dict[str, list[tuple[str, float | None]]],
    title: str = "",
    y_label: str = "",
    event_month: str | None = None,
    width: int = 760,
    height: int = 420,
) -> str:
    """Render named monthly series as one SVG document."""
    if not series:
        raise ValueError("no series to chart")
    months = sorted({m for pairs in series.values() for m, _ in pairs})
    if not months:
        raise ValueError("series contain no months")
    values = [v for pairs in series.values() for _, v in pairs if v is not None]
    if not values:
        raise ValueError("series contain no values")
    lo, hi = min(values), max(values)
    if lo == hi:
        lo, hi = lo - 1.0, hi + 1.0
    pad = 0.05 * (hi - lo)
    lo, hi = lo - pad, hi + pad

    inner_h = height - MARGIN_TOP - MARGIN_BOTTOM

    def y_pos(v: float) -> float:
        return MARGIN_TOP + inner_h * (1.0 - (v - lo) / (hi - lo))

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
    ]
    if title:
        out.append(
            f'<text x="{width / 2:.0f}" y="22" text-anchor="middle" '
            f'font-family="sans-serif" font-size="14">{title}</text>'
        )

    # Axes.
    x0, x1 = MARGIN_LEFT, width - MARGIN_RIGHT
    y0, y1 = MARGIN_TOP, height - MARGIN_BOTTOM
    out.append(f'<line x1="{x0}" y1="{y1}" x2="{x1}" y2="{y1}" stroke="black"/>')
    out.append(f'<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>')

    for i in range(5):
        v = lo + (hi - lo) * i / 4
        y = y_pos(v)
        out.append(f'<line x1="{x0 - 4}" y1="{_fmt(y)}" x2="{x0}" y2="{_fmt(y)}" stroke="black"/>')
        out.append(
            f'<text x="{x0 - 8}" y="{_fmt(y + 4)}" text-anchor="end" '
            f'font-family="sans-serif" font-size="11">{v:.3g}</text>'
        )
    if y_label:
        out.append(
            f'<text x="14" y="{(y0 + y1) / 2:.0f}" text-anchor="middle" font-family="sans-serif" '
            f'font-size="12" transform="rotate(-90 14 {(y0 + y1) / 2:.0f})">{y_label}</text>'
        )

    step = max(1, (len(months) + 7) // 8)
    for idx in range(0, len(months), step):
        x = month_x(months, months[idx], width)
        out.append(f'<line x1="{_fmt(x)}" y1="{y1}" x2="{_fmt(x)}" y2="{y1 + 4}" stroke="black"/>')
        out.append(
            f'<text x="{_fmt(x)}" y="{y1 + 18}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="10">{months[idx]}</text>'
        )

    if event_month is not None and months[0] <= event_month <= months[-1]:
        if event_month in months:
            ex = month_x(months, event_month, width)
        else:
            later = [m for m in months if m > event_month]
            ex = month_x(months, later[0], width) if later else x1
        out.append(
            f'<line x1="{_fmt(ex)}" y1="{y0}" x2="{_fmt(ex)}" y2="{y1}" '
            f'stroke="#555555" stroke-dasharray="5,4"/>'
        )
        out.append(
            f'<text x="{_fmt(ex + 4)}" y="{y0 + 12}" font-family="sans-serif" '
            f'font-size="10" fill="#555555">{event_month}</text>'
        )

    for s_idx, (label, pairs) in enumerate(series.items()):
        color = PALETTE[s_idx % len(PALETTE)]
        segment: list[str] = []
        segments: list[list[str]] = []
        by_month = dict(pairs)
        for month in months:
            v = by_month.get(month)
            if v is None:
                if segment:
                    segments.append(segment)
                    segment = []
                continue
            segment.append(f"{_fmt(month_x(months, month, width))},{_fmt(y_pos(v))}")
        if segment:
            segments.append(segment)
        for seg in segments:
            if len(seg) == 1:
                cx, cy = seg[0].split(",")
                out.append(f'<circle cx="{cx}" cy="{cy}" r="2.5" fill="{color}"/>')
            else:
                out.append(
                    f'<polyline points="{" ".join(seg)}" fill="none" stroke="{color}" stroke-width="1.5"/>'
                )
        ly = MARGIN_TOP + 14 * s_idx
        out.append(f'<rect x="{x1 - 130}" y="{ly - 8}" width="10" height="10" fill="{color}"/>')
        out.append(
            f'<text x="{x1 - 116}" y="{ly + 1}" font-family="sans-serif" font-size="11">{label}</text>'
        )

    out.append("</svg>")
    return "\n".join(out) + "\n"
