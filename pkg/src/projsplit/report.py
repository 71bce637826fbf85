"""Trace serialisation: CSV rows, key=value certificates and SVG convergence plots."""

import csv
import math
from xml.sax.saxutils import escape

import numpy as np

BASE_FIELDS = ("k", "err_total", "err_tangent", "err_normal", "p", "q", "bound_p")
PLOT_FLOOR = 1e-16


def _fmt(x):
    return format(float(x), ".17g")


def csv_header(n_directions):
    return list(BASE_FIELDS) + [f"sin2R_{j}" for j in range(1, n_directions + 1)]


def emit_csv(trace, path, bound_p=None):
    """Write one row per record. ``bound_p`` (optional) is indexed by k; missing -> empty."""
    n_dir = len(trace.records[0].sin2_R)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(csv_header(n_dir))
        for rec in trace.records:
            bound = ""
            if bound_p is not None and rec.k < len(bound_p):
                bound = _fmt(bound_p[rec.k])
            row = [str(rec.k)] + [_fmt(getattr(rec, f)) for f in BASE_FIELDS[1:6]]
            w.writerow(row + [bound] + [_fmt(x) for x in rec.sin2_R])


def read_csv(path):
    """Parse a trace CSV into ``{column: ndarray}``; empty ``bound_p`` cells become NaN."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    cols = {}
    for j, name in enumerate(header):
        vals = [float(r[j]) if r[j] != "" else math.nan for r in body]
        cols[name] = np.array(vals, dtype=int if name == "k" else float)
    return cols


def write_certificate(path, values):
    """``key=value`` lines in the given order; ``None`` is written as an empty value."""
    with open(path, "w") as fh:
        for key, val in values.items():
            if val is None:
                text = ""
            elif isinstance(val, bool):
                text = "true" if val else "false"
            else:
                text = _fmt(val)
            fh.write(f"{key}={text}\n")


def read_certificate(path):
    out = {}
    with open(path) as fh:
        for line in fh:
            key, _, val = line.rstrip("\n").partition("=")
            out[key] = val
    return out


SERIES = (
    ("err_total", "#1f77b4", "total"),
    ("err_tangent", "#2ca02c", "tangent"),
    ("err_normal", "#d62728", "normal"),
)


def emit_plot(trace, path, guides=(), title=None, width=720, height=440):
    """Log-scale convergence chart of err_total, err_tangent and err_normal vs k.

    ``guides`` draws dashed horizontal lines (e.g. at the singular values of X*).
    Values are floored at 1e-16 before taking log10.
    """
    ks = np.array([rec.k for rec in trace.records], dtype=float)
    logs = {
        name: np.log10(np.maximum(trace.column(name), PLOT_FLOOR)) for name, _, _ in SERIES
    }
    guide_logs = [math.log10(max(g, PLOT_FLOOR)) for g in guides]
    all_logs = np.concatenate([v for v in logs.values()] + [np.array(guide_logs)])
    y_lo = math.floor(all_logs.min())
    y_hi = math.ceil(all_logs.max())
    if y_hi == y_lo:
        y_hi += 1
    x_hi = max(ks.max(), 1.0)

    left, right, top, bottom = 70, 150, 40, 50
    pw, ph = width - left - right, height - top - bottom

    def sx(k):
        return left + pw * (k / x_hi)

    def sy(v):
        return top + ph * (y_hi - v) / (y_hi - y_lo)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="#444"/>',
    ]
    if title:
        out.append(f'<text x="{left}" y="{top - 14}" font-size="13">{escape(title)}</text>')

    step = max(1, math.ceil((y_hi - y_lo) / 10))
    for e in range(y_lo, y_hi + 1, step):
        y = sy(e)
        out.append(f'<line x1="{left}" y1="{y:.2f}" x2="{left + pw}" y2="{y:.2f}" stroke="#eee"/>')
        out.append(f'<text x="{left - 6}" y="{y + 4:.2f}" text-anchor="end">1e{e}</text>')
    for i in range(6):
        k = x_hi * i / 5
        x = sx(k)
        out.append(f'<text x="{x:.2f}" y="{top + ph + 16}" text-anchor="middle">{k:.0f}</text>')
    out.append(
        f'<text x="{left + pw / 2}" y="{height - 12}" text-anchor="middle">iteration k</text>'
    )

    for j, g in enumerate(guide_logs, start=1):
        y = sy(g)
        out.append(
            f'<line class="guide" x1="{left}" y1="{y:.2f}" x2="{left + pw}" y2="{y:.2f}" '
            f'stroke="#888" stroke-dasharray="4 3"/>'
        )
        out.append(f'<text x="{left + pw + 4}" y="{y + 4:.2f}" fill="#666">sigma_{j}</text>')

    for i, (name, color, label) in enumerate(SERIES):
        ys = logs[name]
        if len(ks) == 1:
            out.append(
                f'<circle class="marker" cx="{sx(ks[0]):.2f}" cy="{sy(ys[0]):.2f}" r="3" fill="{color}"/>'
            )
        else:
            pts = " ".join(f"{sx(k):.2f},{sy(v):.2f}" for k, v in zip(ks, ys))
            out.append(
                f'<polyline class="series" points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>'
            )
        ly = top + 14 + 16 * i
        out.append(f'<line x1="{left + pw + 60}" y1="{ly - 4}" x2="{left + pw + 80}" y2="{ly - 4}" '
                   f'stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{left + pw + 84}" y="{ly}">{label}</text>')
    out.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(out) + "\n")
