"""Self-contained SVG figures for benchmark reports.

Emits SVG directly (no plotting library) into a fixed 800x500 viewBox.
Structure over aesthetics: line plots carry exactly one polyline per
series, plus optional circle markers, a shaded vertical band (the cliff
window), and dashed horizontal reference lines (e.g. a predicted-speedup
level).  Bar charts emit one rect per bar.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from xml.sax.saxutils import escape

from .errors import EmptySeries, NonPositiveLogValue

PLOT_KINDS = ("time_vs_qubits_log", "speedup_vs_qubits", "cliff_bars")

WIDTH, HEIGHT = 800, 500
MARGIN_LEFT, MARGIN_RIGHT, MARGIN_TOP, MARGIN_BOTTOM = 70, 170, 46, 56

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd",
           "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f")


@dataclass(frozen=True)
class Series:
    label: str
    xs: tuple[float, ...]
    ys: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "xs", tuple(float(x) for x in self.xs))
        object.__setattr__(self, "ys", tuple(float(y) for y in self.ys))
        if len(self.xs) != len(self.ys):
            raise ValueError(f"series {self.label!r}: x/y length mismatch")


@dataclass(frozen=True)
class RefLine:
    y: float
    label: str = ""


@dataclass(frozen=True)
class PlotSpec:
    kind: str
    series: tuple[Series, ...]
    title: str = ""
    x_label: str = ""
    y_label: str = ""
    log_y: bool = False
    band: tuple[float, float] | None = None       # shaded x interval
    ref_lines: tuple[RefLine, ...] = ()
    x_tick_labels: tuple[str, ...] | None = None  # categorical x (bars)

    def __post_init__(self):
        if self.kind not in PLOT_KINDS:
            raise ValueError(f"unknown plot kind {self.kind!r}")
        object.__setattr__(self, "series", tuple(self.series))
        object.__setattr__(self, "ref_lines", tuple(self.ref_lines))


def _nice_step(span: float, target: int = 5) -> float:
    raw = span / max(target, 1)
    mag = 10 ** math.floor(math.log10(raw)) if raw > 0 else 1.0
    for mult in (1, 2, 5, 10):
        if mult * mag >= raw:
            return mult * mag
    return 10 * mag


def _linear_ticks(lo: float, hi: float) -> list[float]:
    if hi == lo:
        return [lo]
    step = _nice_step(hi - lo)
    first = math.ceil(lo / step) * step
    ticks = []
    v = first
    while v <= hi + 1e-12 * step:
        ticks.append(round(v, 12))
        v += step
    return ticks or [lo, hi]


def _decade_ticks(lo: float, hi: float) -> list[float]:
    ticks = []
    e = math.floor(math.log10(lo))
    while 10.0 ** e <= hi * (1 + 1e-12):
        if 10.0 ** e >= lo * (1 - 1e-12):
            ticks.append(10.0 ** e)
        e += 1
    return ticks or [lo, hi]


def _fmt(v: float) -> str:
    if v == 0:
        return "0"
    if abs(v) >= 1000 or abs(v) < 0.01:
        return f"{v:.1e}"
    return f"{v:g}"


def emit_plot(spec: PlotSpec) -> str:
    """Render a PlotSpec to an SVG document string."""
    if not spec.series or all(len(s.xs) == 0 for s in spec.series):
        raise EmptySeries("plot needs at least one non-empty series")
    if spec.log_y:
        for s in spec.series:
            if any(y <= 0 for y in s.ys):
                raise NonPositiveLogValue(f"series {s.label!r} has y <= 0 on a log axis")

    if spec.kind == "cliff_bars":
        return _emit_bars(spec)
    return _emit_lines(spec)


def _data_ranges(spec: PlotSpec):
    xs = [x for s in spec.series for x in s.xs]
    ys = [y for s in spec.series for y in s.ys]
    for r in spec.ref_lines:
        ys.append(r.y)
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(ys), max(ys)
    if x_lo == x_hi:
        x_lo, x_hi = x_lo - 0.5, x_hi + 0.5
    if spec.log_y:
        if y_lo == y_hi:
            y_lo, y_hi = y_lo / 2, y_hi * 2
        y_lo, y_hi = y_lo / 1.2, y_hi * 1.2
    else:
        pad = 0.08 * (y_hi - y_lo) if y_hi > y_lo else max(abs(y_hi), 1.0) * 0.2
        y_lo, y_hi = y_lo - pad, y_hi + pad
        if min(y for s in spec.series for y in s.ys) >= 0:
            y_lo = max(0.0, y_lo)
    return x_lo, x_hi, y_lo, y_hi


def _emit_lines(spec: PlotSpec) -> str:
    x_lo, x_hi, y_lo, y_hi = _data_ranges(spec)
    px_lo, px_hi = MARGIN_LEFT, WIDTH - MARGIN_RIGHT
    py_lo, py_hi = HEIGHT - MARGIN_BOTTOM, MARGIN_TOP

    def xmap(x: float) -> float:
        return px_lo + (x - x_lo) / (x_hi - x_lo) * (px_hi - px_lo)

    if spec.log_y:
        l_lo, l_hi = math.log10(y_lo), math.log10(y_hi)

        def ymap(y: float) -> float:
            return py_lo + (math.log10(y) - l_lo) / (l_hi - l_lo) * (py_hi - py_lo)
    else:
        def ymap(y: float) -> float:
            return py_lo + (y - y_lo) / (y_hi - y_lo) * (py_hi - py_lo)

    parts = [_header(spec)]

    if spec.band is not None:
        b0, b1 = sorted(spec.band)
        b0 = min(max(b0, x_lo), x_hi)
        b1 = min(max(b1, x_lo), x_hi)
        parts.append(
            f'<rect class="band" x="{xmap(b0):.1f}" y="{py_hi}" '
            f'width="{max(xmap(b1) - xmap(b0), 0):.1f}" height="{py_lo - py_hi}" '
            f'fill="#d62728" fill-opacity="0.12"/>')

    parts.append(_axes_frame())

    xs_all = sorted({x for s in spec.series for x in s.xs})
    if all(float(x).is_integer() for x in xs_all) and len(xs_all) <= 14:
        x_ticks = xs_all
    else:
        x_ticks = _linear_ticks(x_lo, x_hi)
    for x in x_ticks:
        px = xmap(x)
        parts.append(f'<line x1="{px:.1f}" y1="{py_lo}" x2="{px:.1f}" y2="{py_lo + 5}" stroke="#333"/>')
        parts.append(f'<text x="{px:.1f}" y="{py_lo + 20}" text-anchor="middle" font-size="12">{_fmt(x)}</text>')

    y_ticks = _decade_ticks(y_lo, y_hi) if spec.log_y else _linear_ticks(y_lo, y_hi)
    for y in y_ticks:
        py = ymap(y)
        parts.append(f'<line x1="{px_lo - 5}" y1="{py:.1f}" x2="{px_lo}" y2="{py:.1f}" stroke="#333"/>')
        parts.append(f'<line x1="{px_lo}" y1="{py:.1f}" x2="{px_hi}" y2="{py:.1f}" stroke="#ddd" stroke-width="0.5"/>')
        parts.append(f'<text x="{px_lo - 9}" y="{py + 4:.1f}" text-anchor="end" font-size="12">{_fmt(y)}</text>')

    for ref in spec.ref_lines:
        py = ymap(ref.y)
        label = ref.label or _fmt(ref.y)
        parts.append(
            f'<line class="refline" x1="{px_lo}" y1="{py:.1f}" x2="{px_hi}" y2="{py:.1f}" '
            f'stroke="#444" stroke-dasharray="6,4"/>')
        parts.append(
            f'<text x="{px_hi - 4}" y="{py - 5:.1f}" text-anchor="end" font-size="12" '
            f'fill="#444">{escape(label)}</text>')

    for i, s in enumerate(spec.series):
        color = PALETTE[i % len(PALETTE)]
        pts = " ".join(f"{xmap(x):.2f},{ymap(y):.2f}" for x, y in zip(s.xs, s.ys))
        parts.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="2"/>')
        for x, y in zip(s.xs, s.ys):
            parts.append(f'<circle cx="{xmap(x):.2f}" cy="{ymap(y):.2f}" r="3.2" fill="{color}"/>')

    parts.append(_legend(spec))
    parts.append(_labels(spec))
    parts.append("</svg>")
    return "\n".join(parts)


def _emit_bars(spec: PlotSpec) -> str:
    x_vals = sorted({x for s in spec.series for x in s.xs})
    labels = spec.x_tick_labels or tuple(_fmt(x) for x in x_vals)
    ys = [y for s in spec.series for y in s.ys] + [r.y for r in spec.ref_lines]
    y_lo, y_hi = 0.0, max(ys) * 1.12
    px_lo, px_hi = MARGIN_LEFT, WIDTH - MARGIN_RIGHT
    py_lo, py_hi = HEIGHT - MARGIN_BOTTOM, MARGIN_TOP
    slot = (px_hi - px_lo) / max(len(x_vals), 1)
    group_w = slot * 0.72
    bar_w = group_w / max(len(spec.series), 1)

    def ymap(y: float) -> float:
        return py_lo + (y - y_lo) / (y_hi - y_lo) * (py_hi - py_lo)

    parts = [_header(spec), _axes_frame()]
    for y in _linear_ticks(y_lo, y_hi):
        py = ymap(y)
        parts.append(f'<line x1="{px_lo - 5}" y1="{py:.1f}" x2="{px_lo}" y2="{py:.1f}" stroke="#333"/>')
        parts.append(f'<line x1="{px_lo}" y1="{py:.1f}" x2="{px_hi}" y2="{py:.1f}" stroke="#ddd" stroke-width="0.5"/>')
        parts.append(f'<text x="{px_lo - 9}" y="{py + 4:.1f}" text-anchor="end" font-size="12">{_fmt(y)}</text>')

    for ref in spec.ref_lines:
        py = ymap(ref.y)
        label = ref.label or _fmt(ref.y)
        parts.append(f'<line class="refline" x1="{px_lo}" y1="{py:.1f}" x2="{px_hi}" y2="{py:.1f}" '
                     f'stroke="#444" stroke-dasharray="6,4"/>')
        parts.append(f'<text x="{px_hi - 4}" y="{py - 5:.1f}" text-anchor="end" font-size="12" '
                     f'fill="#444">{escape(label)}</text>')

    for pos, (x, lab) in enumerate(zip(x_vals, labels)):
        cx = px_lo + (pos + 0.5) * slot
        parts.append(f'<text x="{cx:.1f}" y="{py_lo + 20}" text-anchor="middle" font-size="12">{escape(str(lab))}</text>')
        for i, s in enumerate(spec.series):
            if x not in s.xs:
                continue
            y = s.ys[s.xs.index(x)]
            color = PALETTE[i % len(PALETTE)]
            bx = cx - group_w / 2 + i * bar_w
            parts.append(
                f'<rect class="bar" x="{bx:.1f}" y="{ymap(y):.1f}" width="{bar_w * 0.92:.1f}" '
                f'height="{py_lo - ymap(y):.1f}" fill="{color}"/>')

    parts.append(_legend(spec))
    parts.append(_labels(spec))
    parts.append("</svg>")
    return "\n".join(parts)


def _header(spec: PlotSpec) -> str:
    return (
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" '
        f'width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif">\n'
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>'
    )


def _axes_frame() -> str:
    return (f'<rect x="{MARGIN_LEFT}" y="{MARGIN_TOP}" '
            f'width="{WIDTH - MARGIN_LEFT - MARGIN_RIGHT}" '
            f'height="{HEIGHT - MARGIN_TOP - MARGIN_BOTTOM}" '
            f'fill="none" stroke="#333"/>')


def _legend(spec: PlotSpec) -> str:
    x0 = WIDTH - MARGIN_RIGHT + 14
    rows = []
    for i, s in enumerate(spec.series):
        color = PALETTE[i % len(PALETTE)]
        y = MARGIN_TOP + 14 + i * 20
        rows.append(f'<line x1="{x0}" y1="{y}" x2="{x0 + 22}" y2="{y}" stroke="{color}" stroke-width="3"/>')
        rows.append(f'<text x="{x0 + 28}" y="{y + 4}" font-size="12">{escape(s.label)}</text>')
    return "\n".join(rows)


def _labels(spec: PlotSpec) -> str:
    rows = []
    if spec.title:
        rows.append(f'<text x="{WIDTH / 2:.0f}" y="24" text-anchor="middle" '
                    f'font-size="16" font-weight="bold">{escape(spec.title)}</text>')
    if spec.x_label:
        rows.append(f'<text x="{(MARGIN_LEFT + WIDTH - MARGIN_RIGHT) / 2:.0f}" y="{HEIGHT - 14}" '
                    f'text-anchor="middle" font-size="13">{escape(spec.x_label)}</text>')
    if spec.y_label:
        cy = (MARGIN_TOP + HEIGHT - MARGIN_BOTTOM) / 2
        rows.append(f'<text x="20" y="{cy:.0f}" text-anchor="middle" font-size="13" '
                    f'transform="rotate(-90 20 {cy:.0f})">{escape(spec.y_label)}</text>')
    return "\n".join(rows)
