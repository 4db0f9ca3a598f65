"""Tiny hand-rolled SVG charts (axes, polylines, points).

Deliberately dependency-free and deterministic: fixed canvas, fixed
float formatting, no timestamps.  Enough for result displays; not a
plotting library.
"""

__all__ = ["line_chart", "scatter_chart"]

W, H = 640, 420
MARGIN = 60


def _fmt(x):
    return f"{x:.6g}"


def _scale(values, lo_pix, hi_pix):
    vmin = min(values)
    vmax = max(values)
    if vmax == vmin:
        vmax = vmin + 1.0
    span = vmax - vmin

    def to_pix(v):
        return lo_pix + (v - vmin) / span * (hi_pix - lo_pix)

    return to_pix, vmin, vmax


def _frame(title, xlabel, ylabel, xmin, xmax, ymin, ymax):
    x0, x1 = MARGIN, W - MARGIN // 2
    y0, y1 = H - MARGIN, MARGIN // 2
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" '
        f'viewBox="0 0 {W} {H}">',
        f'<rect width="{W}" height="{H}" fill="white"/>',
        f'<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>',
        f'<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>',
        f'<text x="{W // 2}" y="24" text-anchor="middle" font-size="15">{title}</text>',
        f'<text x="{(x0 + x1) // 2}" y="{H - 14}" text-anchor="middle" font-size="12">{xlabel}</text>',
        f'<text x="16" y="{(y0 + y1) // 2}" text-anchor="middle" font-size="12" '
        f'transform="rotate(-90 16 {(y0 + y1) // 2})">{ylabel}</text>',
        f'<text x="{x0}" y="{y0 + 16}" font-size="10">{_fmt(xmin)}</text>',
        f'<text x="{x1}" y="{y0 + 16}" text-anchor="end" font-size="10">{_fmt(xmax)}</text>',
        f'<text x="{x0 - 4}" y="{y0}" text-anchor="end" font-size="10">{_fmt(ymin)}</text>',
        f'<text x="{x0 - 4}" y="{y1 + 8}" text-anchor="end" font-size="10">{_fmt(ymax)}</text>',
    ]
    return parts, x0, x1, y0, y1


def line_chart(xs, ys, path, title="", xlabel="", ylabel=""):
    xs = list(xs)
    ys = list(ys)
    parts, x0, x1, y0, y1 = _frame(title, xlabel, ylabel, min(xs), max(xs), min(ys), max(ys))
    sx, *_ = _scale(xs, x0, x1)
    sy, *_ = _scale(ys, y0, y1)
    pts = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in zip(xs, ys))
    parts.append(f'<polyline points="{pts}" fill="none" stroke="steelblue" stroke-width="2"/>')
    for x, y in zip(xs, ys):
        parts.append(f'<circle cx="{sx(x):.2f}" cy="{sy(y):.2f}" r="3" fill="steelblue"/>')
    parts.append("</svg>")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(parts) + "\n")


def scatter_chart(xs, ys, path, title="", xlabel="", ylabel=""):
    xs = list(xs)
    ys = list(ys)
    parts, x0, x1, y0, y1 = _frame(title, xlabel, ylabel, min(xs), max(xs), min(ys), max(ys))
    sx, *_ = _scale(xs, x0, x1)
    sy, *_ = _scale(ys, y0, y1)
    for x, y in zip(xs, ys):
        parts.append(
            f'<circle cx="{sx(x):.2f}" cy="{sy(y):.2f}" r="3" fill="firebrick" fill-opacity="0.6"/>'
        )
    parts.append("</svg>")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(parts) + "\n")
