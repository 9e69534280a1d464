"""SVG figures of gauge curve families and c-sets, and the PDF experiment summary."""

import io
import logging
import math
from typing import Dict, Iterable, List, Optional, Sequence

import numpy as np
from reportlab.graphics import renderSVG
from reportlab.graphics.shapes import Circle, Drawing, Line, PolyLine, Rect, String
from reportlab.lib import colors
from reportlab.lib.pagesizes import A4
from reportlab.lib.styles import ParagraphStyle
from reportlab.platypus import Paragraph, SimpleDocTemplate, Spacer, Table, TableStyle

from . import gauges
from .curve_geometry import Branch, CurveFamily, boundary_point, meets
from .disc_sets import DiscCollection, gen_random
from .exceptions import LabError
from .gauges import Ambient, Gauge
from .measure_lab import ExceptionalReport

logger = logging.getLogger(__name__)

WIDTH = 480
HEIGHT = 360
MARGIN = 30
MIN_DISC_PX = 1.5
CURVE_POINTS = 400

HIT = colors.HexColor("#c0392b")
MISS = colors.HexColor("#95a5a6")
CURVE = colors.HexColor("#2c3e50")

# name -> (gauge spec, c values drawn, plane x range)
FAMILIES = {
    "concave": ("concave_power:a=0.5", [0.5, 1.0, 2.0, 4.0], 60.0),
    "convex": ("convex_power:p=1", [2.0, 5.0, 10.0, 20.0], 60.0),
    "constant": ("constant", [0.5, 1.0, 2.0, 4.0], 60.0),
    "rapid": ("rapid_power:p=2", [0.02, 0.05, 0.1, 0.2], 30.0),
    "unit_disc": ("unit_stolz_power:gamma=1", [1.2, 1.5, 2.0, 3.0], 1.0),
}


class _Frame:
    """Affine map from data coordinates to the drawing."""

    def __init__(self, x_lo: float, x_hi: float, y_lo: float, y_hi: float):
        self.x_lo, self.y_lo = x_lo, y_lo
        self.scale = min((WIDTH - 2 * MARGIN) / (x_hi - x_lo), (HEIGHT - 2 * MARGIN) / (y_hi - y_lo))

    def __call__(self, x: float, y: float):
        return MARGIN + (x - self.x_lo) * self.scale, MARGIN + (y - self.y_lo) * self.scale


def _render(drawing: Drawing) -> str:
    return renderSVG.drawToString(drawing)


def _curve_points(fam: CurveFamily, x_hi: float) -> List[complex]:
    if fam.ambient is Ambient.PLANE:
        ts = np.linspace(max(fam.gauge.curve_start, 1e-3), x_hi, CURVE_POINTS)
    else:
        ts = np.linspace(1e-3, 1 - 1e-4, CURVE_POINTS)
    points = []
    for t in ts:
        try:
            points.append(boundary_point(fam, float(t)))
        except LabError:
            continue
    return points


def family_svg(gauge: Gauge, col: DiscCollection, cs: Sequence[float], x_hi: float, title: str = "") -> str:
    """Both branches of y = ±c·g(x) (or the unit-disc level curves) over the
    collection; discs met by a drawn curve are filled red."""
    unit = gauge.is_unit
    if unit:
        frame = _Frame(-1.05, 1.05, -1.05, 1.05)
    else:
        y_hi = max([abs(d.center.imag) + d.radius for d in col.discs] + [1.0])
        frame = _Frame(0.0, x_hi, -y_hi, y_hi)
    drawing = Drawing(WIDTH, HEIGHT)
    drawing.add(Rect(0, 0, WIDTH, HEIGHT, fillColor=colors.white, strokeColor=None))
    if unit:
        cx, cy = frame(0.0, 0.0)
        drawing.add(Circle(cx, cy, frame.scale, fillColor=None, strokeColor=colors.black, strokeWidth=0.5))
    else:
        drawing.add(Line(*frame(0.0, 0.0), *frame(x_hi, 0.0), strokeColor=colors.black, strokeWidth=0.5))

    families = [
        CurveFamily(gauge, c, branch=branch)
        for c in cs
        for branch in (Branch.UPPER, Branch.LOWER)
    ]
    for fam in families:
        points = _curve_points(fam, x_hi)
        if len(points) > 1:
            coords = [v for p in points for v in frame(p.real, p.imag)]
            drawing.add(PolyLine(coords, strokeColor=CURVE, strokeWidth=0.8))

    hits = 0
    for d in col.discs:
        if not unit and abs(d.center.real) > x_hi:
            continue
        met = any(meets(fam, d) for fam in families)
        hits += met
        x, y = frame(d.center.real, d.center.imag)
        drawing.add(
            Circle(x, y, max(d.radius * frame.scale, MIN_DISC_PX), fillColor=HIT if met else MISS, strokeColor=None)
        )
    if title:
        drawing.add(String(MARGIN, HEIGHT - MARGIN / 2, title, fontName="Helvetica", fontSize=10))
    logger.debug(f"Figure {title!r}: {hits} of {len(col)} discs met")
    return _render(drawing)


def c_strip_svg(report: ExceptionalReport, c_range: Optional[Sequence[float]] = None, title: str = "") -> str:
    """Per-disc c-intervals stacked above the merged exceptional c-set."""
    rows = [r for r in report.reports if not r.empty]
    if c_range is None:
        lo = min([r.c_lo for r in rows], default=0.0)
        hi = max([r.c_hi for r in rows], default=1.0)
        c_range = (lo, hi if hi > lo else lo + 1.0)
    lo, hi = c_range
    scale = (WIDTH - 2 * MARGIN) / (hi - lo)
    drawing = Drawing(WIDTH, HEIGHT)
    drawing.add(Rect(0, 0, WIDTH, HEIGHT, fillColor=colors.white, strokeColor=None))
    step = (HEIGHT - 3 * MARGIN) / max(len(rows), 1)

    def x_of(c: float) -> float:
        return MARGIN + (min(max(c, lo), hi) - lo) * scale

    for i, r in enumerate(rows):
        y = 2 * MARGIN + i * step
        drawing.add(Line(x_of(r.c_lo), y, max(x_of(r.c_hi), x_of(r.c_lo) + 0.5), y, strokeColor=MISS, strokeWidth=1))
    for a, b in report.union:
        drawing.add(Rect(x_of(a), MARGIN, max(x_of(b) - x_of(a), 0.5), 8, fillColor=HIT, strokeColor=None))
    drawing.add(String(MARGIN, MARGIN - 12, f"{lo:.4g}", fontName="Helvetica", fontSize=8))
    drawing.add(String(WIDTH - MARGIN - 30, MARGIN - 12, f"{hi:.4g}", fontName="Helvetica", fontSize=8))
    caption = title or f"exceptional c-set, measure {report.measure:.4g}"
    drawing.add(String(MARGIN, HEIGHT - MARGIN / 2, caption, fontName="Helvetica", fontSize=10))
    return _render(drawing)


def figure_instance(name: str, seed: int, count: int = 40) -> DiscCollection:
    spec, _, x_hi = FAMILIES[name]
    gauge = gauges.from_spec(spec)
    if gauge.is_unit:
        return gen_random(Ambient.UNIT_DISC, gauge, count, 1e-2, 2.0, seed)
    return gen_random(Ambient.PLANE, gauge, count, 1e-1, 1.0, seed, x_max=x_hi, c_range=(0.2, 5.0))


def all_figures(seed: int, names: Optional[Iterable[str]] = None) -> Dict[str, str]:
    """File name -> SVG text for each requested family."""
    out = {}
    for name in names or FAMILIES:
        spec, cs, x_hi = FAMILIES[name]
        gauge = gauges.from_spec(spec)
        col = figure_instance(name, seed)
        out[f"{name}.svg"] = family_svg(gauge, col, cs, x_hi, title=f"{gauge.kind.value} curves")
    logger.info(f"Rendered {len(out)} figures")
    return out


def summary_pdf(results: Sequence, title: str = "Experiment summary") -> bytes:
    """One row per experiment result; built in invariant mode so reruns are byte-identical."""
    buffer = io.BytesIO()
    doc = SimpleDocTemplate(buffer, pagesize=A4, invariant=1, title=title)
    title_style = ParagraphStyle(name="Title", fontSize=14, alignment=1, spaceAfter=12)
    body_style = ParagraphStyle(name="Body", fontSize=8, leading=10)

    data = [["EXPERIMENT", "RESULT", "METRICS"]]
    for result in results:
        metrics = "<br/>".join(f"{k}: {_short(v)}" for k, v in sorted(result.metrics.items()))
        data.append([result.experiment, "PASS" if result.passed else "FAIL", Paragraph(metrics, body_style)])
    table = Table(data, colWidths=[90, 50, 370])
    table.setStyle(
        TableStyle(
            [
                ("GRID", (0, 0), (-1, -1), 0.5, colors.black),
                ("FONT", (0, 0), (-1, -1), "Helvetica", 9),
                ("FONT", (0, 0), (-1, 0), "Helvetica-Bold", 9),
                ("VALIGN", (0, 0), (-1, -1), "TOP"),
            ]
        )
    )
    doc.build([Paragraph(title, title_style), Spacer(1, 12), table])
    return buffer.getvalue()


def _short(value) -> str:
    if isinstance(value, float):
        return f"{value:.6g}" if math.isfinite(value) else str(value)
    if isinstance(value, dict):
        return "{" + ", ".join(f"{k}: {_short(v)}" for k, v in sorted(value.items())) + "}"
    if isinstance(value, list) and len(value) > 6:
        return f"[{len(value)} values]"
    return str(value)
