import numpy as np

from app.report_export import _wrap_text, build_report_pdf


def _report(lines: int = 3) -> dict:
    return {
        "title": "State analysis",
        "sections": [
            {
                "heading": "Summary",
                "lines": [f"line {i}: spectrum [0.5, 0.5, 0.0, 0.0]" for i in range(lines)],
                "matrices": {"rho": np.eye(4) / 4 + 0.1j * np.diag([1, -1, 0, 0])},
            }
        ],
    }


def test_pdf_bytes():
    pdf = build_report_pdf(_report())
    assert pdf.startswith(b"%PDF")
    assert pdf.rstrip().endswith(b"%%EOF")


def test_pdf_is_reproducible():
    assert build_report_pdf(_report()) == build_report_pdf(_report())


def test_long_reports_page_break():
    short = build_report_pdf(_report(3))
    long = build_report_pdf(_report(200))
    assert long.count(b"/Type /Page") > short.count(b"/Type /Page")


def test_wrap_text_respects_width():
    lines = _wrap_text("alpha beta gamma delta epsilon " * 10, 120, "Times-Roman", 11)
    assert len(lines) > 1
    assert _wrap_text("", 100, "Times-Roman", 11) == [""]
