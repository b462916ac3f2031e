"""Rendering Ext charts: a text grid of stems by filtration and a static SVG."""

from __future__ import annotations

from xml.sax.saxutils import escape

from .resolution import ExtChart

FORMATS = ("json", "text", "svg")


def dots(chart: ExtChart):
    """(stem, s, dim, labels) for every nonzero entry, ordered by (s, t)."""
    for (s, t), d in sorted(chart.entries.items()):
        if d:
            yield t - s, s, d, chart.labels.get((s, t), [])


def text_grid(chart: ExtChart) -> str:
    """Rows are filtrations (highest first), columns stems t - s; '.' marks zero."""
    width = chart.max_t + 1
    cells = {(stem, s): d for stem, s, d, _ in dots(chart)}
    lines = [f"Ext chart of {chart.module} at p={chart.p}, s <= {chart.max_s}, t <= {chart.max_t}"]
    for s in range(chart.max_s, -1, -1):
        row = []
        for stem in range(width):
            d = cells.get((stem, s), 0)
            row.append("." if d == 0 else (str(d) if d < 10 else "+"))
        lines.append(f"{s:>3} | " + "".join(row).rstrip("."))
    ticks = "".join("|" if i % 10 == 0 else " " for i in range(width)).rstrip()
    nums = "".join(f"{i:<10}" for i in range(0, width, 10)).rstrip()
    lines.append("    +-" + "-" * len(ticks))
    lines.append("      " + ticks)
    lines.append("      " + nums)
    lines.append("stem t-s across, filtration s up")
    for stem, s, d, labels in dots(chart):
        tag = f" [{', '.join(labels)}]" if labels else ""
        lines.append(f"  (stem {stem}, s {s}) dim {d}{tag}")
    return "\n".join(lines) + "\n"


def svg_chart(chart: ExtChart, cell: int = 12, margin: int = 40) -> str:
    stems = chart.max_t + 1
    width = margin * 2 + cell * stems
    height = margin * 2 + cell * (chart.max_s + 1)

    def xy(stem, s):
        return margin + cell * stem + cell // 2, height - margin - cell * s - cell // 2

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
        f"<title>{escape(f'Ext chart of {chart.module} at p={chart.p}')}</title>",
        '<rect width="100%" height="100%" fill="white"/>',
        f'<line x1="{margin}" y1="{height - margin}" x2="{width - margin}" y2="{height - margin}" stroke="black"/>',
        f'<line x1="{margin}" y1="{margin}" x2="{margin}" y2="{height - margin}" stroke="black"/>',
    ]
    for stem in range(0, stems, 10):
        x, _ = xy(stem, 0)
        out.append(f'<text x="{x}" y="{height - margin + 14}" font-size="9" text-anchor="middle">{stem}</text>')
    for s in range(chart.max_s + 1):
        _, y = xy(0, s)
        out.append(f'<text x="{margin - 6}" y="{y + 3}" font-size="9" text-anchor="end">{s}</text>')
    for stem, s, d, labels in dots(chart):
        x, y = xy(stem, s)
        for k in range(d):
            out.append(f'<circle cx="{x + 3 * k}" cy="{y}" r="2.5" fill="black"/>')
        if labels:
            out.append(f'<text x="{x + 4}" y="{y - 4}" font-size="7">{escape(labels[0])}</text>')
    out.append(f'<text x="{width // 2}" y="{height - 8}" font-size="10" text-anchor="middle">t - s</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render(chart: ExtChart, fmt: str) -> str:
    if fmt == "json":
        return chart.dumps() + "\n"
    if fmt == "text":
        return text_grid(chart)
    if fmt == "svg":
        return svg_chart(chart)
    raise ValueError(f"unknown format {fmt!r}; choose from {', '.join(FORMATS)}")
