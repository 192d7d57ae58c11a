import io

import numpy as np
from reportlab.lib.pagesizes import LETTER
from reportlab.pdfbase.pdfmetrics import stringWidth
from reportlab.pdfgen import canvas


BOTTOM_MARGIN = 60


def _wrap_text(text: str, max_width: float, font_name: str, font_size: int) -> list[str]:
    words = text.split()
    if not words:
        return [""]
    lines: list[str] = []
    current = words[0]
    for word in words[1:]:
        candidate = f"{current} {word}"
        if stringWidth(candidate, font_name, font_size) <= max_width:
            current = candidate
        else:
            lines.append(current)
            current = word
    lines.append(current)
    return lines


def _new_page_if_needed(c: canvas.Canvas, y: float, needed: float = 0) -> float:
    if y < BOTTOM_MARGIN + needed:
        c.showPage()
        return LETTER[1] - BOTTOM_MARGIN
    return y


def _draw_paragraph(c: canvas.Canvas, text: str, x: float, y: float, width: float,
                    font_name: str = "Times-Roman", font_size: int = 11,
                    leading: int = 15) -> float:
    for line in _wrap_text(text, width, font_name, font_size):
        y = _new_page_if_needed(c, y)
        c.setFont(font_name, font_size)
        c.drawString(x, y, line)
        y -= leading
    return y


def _draw_heading(c: canvas.Canvas, text: str, x: float, y: float, width: float,
                  level: int = 1) -> float:
    font_size = {1: 18, 2: 14, 3: 12}.get(level, 12)
    y = _new_page_if_needed(c, y, 20)
    return _draw_paragraph(c, text, x, y, width, font_name="Helvetica-Bold",
                           font_size=font_size, leading=font_size + 6) - 6


def _draw_matrix(c: canvas.Canvas, m, x: float, y: float) -> float:
    # fixed-width rows, one per matrix row
    for row in np.asarray(m):
        cells = []
        for z in row:
            z = complex(z)
            cells.append(f"{z.real:+.4f}" if abs(z.imag) < 5e-5 else f"{z.real:+.3f}{z.imag:+.3f}i")
        y = _new_page_if_needed(c, y)
        c.setFont("Courier", 9)
        c.drawString(x, y, "  ".join(cells))
        y -= 12
    return y - 4


def build_report_pdf(report: dict) -> bytes:
    """
    Render a report of the form
    {"title": str, "sections": [{"heading": str, "lines": [str], "matrices": {name: m}}]}.
    """
    buffer = io.BytesIO()
    c = canvas.Canvas(buffer, pagesize=LETTER, invariant=1)
    width, height = LETTER
    margin_x = 54
    text_width = width - 2 * margin_x
    y = height - 72

    c.setFont("Helvetica-Bold", 22)
    c.drawString(margin_x, y, report.get("title") or "Report")
    y -= 30

    for section in report.get("sections") or []:
        y = _draw_heading(c, section.get("heading") or "", margin_x, y, text_width, level=2)
        for line in section.get("lines") or []:
            y = _draw_paragraph(c, str(line), margin_x, y, text_width)
        for name, matrix in (section.get("matrices") or {}).items():
            y = _draw_heading(c, name, margin_x, y, text_width, level=3)
            y = _draw_matrix(c, matrix, margin_x + 6, y)
        y -= 8

    c.save()
    return buffer.getvalue()
