"""CSV readers/writers and the SVG line chart.

All CSV files use ``,`` separators, ``.`` decimals, a header row and ``\\n``
line endings.
"""
import csv
from dataclasses import asdict, fields
from pathlib import Path
from xml.sax.saxutils import escape

from .engine import RECORD_FIELDS, DailyRecord
from .metrics import ComparisonReport, RunSummary


class SeriesParseError(ValueError):
    pass


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_csv(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def write_timeseries(path, series):
    write_csv(path, RECORD_FIELDS, ([getattr(r, f) for f in RECORD_FIELDS] for r in series))


def _read_rows(path):
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise SeriesParseError(f"{path}: cannot open ({exc.strerror})") from None
    with fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise SeriesParseError(f"{path}: empty file")
        header = [h.strip() for h in header]
        rows = [(reader.line_num, row) for row in reader if any(c.strip() for c in row)]
    return header, rows


def _int_cell(path, line, name, raw):
    try:
        return int(raw)
    except ValueError:
        raise SeriesParseError(f"{path}:{line}: {name} is not an integer: {raw!r}") from None


def read_timeseries(path):
    header, rows = _read_rows(path)
    if tuple(header) != RECORD_FIELDS:
        raise SeriesParseError(f"{path}:1: expected header {','.join(RECORD_FIELDS)}")
    out = []
    for line, row in rows:
        if len(row) != len(RECORD_FIELDS):
            raise SeriesParseError(f"{path}:{line}: expected {len(RECORD_FIELDS)} fields, got {len(row)}")
        out.append(DailyRecord(*(_int_cell(path, line, f, v) for f, v in zip(RECORD_FIELDS, row))))
    return out


def read_daily_series(path):
    """Read ``(first_day, counts)`` from an observed ``day,new_cases`` file or a timeseries.csv.

    Days must increase by exactly one per row and counts must be >= 0.
    """
    header, rows = _read_rows(path)
    if "day" not in header:
        raise SeriesParseError(f"{path}:1: missing 'day' column")
    for col in ("new_cases", "new_infections"):
        if col in header:
            break
    else:
        raise SeriesParseError(f"{path}:1: need a 'new_cases' or 'new_infections' column")
    di, ci = header.index("day"), header.index(col)
    if not rows:
        raise SeriesParseError(f"{path}: no data rows")
    days, counts = [], []
    for line, row in rows:
        if len(row) != len(header):
            raise SeriesParseError(f"{path}:{line}: expected {len(header)} fields, got {len(row)}")
        day = _int_cell(path, line, "day", row[di].strip())
        count = _int_cell(path, line, col, row[ci].strip())
        if days and day != days[-1] + 1:
            raise SeriesParseError(f"{path}:{line}: day {day} does not follow day {days[-1]}")
        if count < 0:
            raise SeriesParseError(f"{path}:{line}: negative count {count}")
        days.append(day)
        counts.append(count)
    return days[0], counts


SUMMARY_FIELDS = tuple(f.name for f in fields(RunSummary))


def write_summary(path, summary: RunSummary, seed):
    write_csv(path, ("seed",) + SUMMARY_FIELDS, [[seed] + [getattr(summary, f) for f in SUMMARY_FIELDS]])


def write_comparison(path, report: ComparisonReport):
    d = asdict(report)
    write_csv(path, tuple(d), [list(d.values())])


def svg_chart(series, title="epidemic curve", width=720, height=360):
    """Active infections and daily new infections against day, as SVG text."""
    days = [r.day for r in series]
    lines = {
        "active infections": ([r.infected for r in series], "#1f77b4"),
        "new infections": ([r.new_infections for r in series], "#ff7f0e"),
    }
    left, right, top, bottom = 60, 20, 30, 40
    pw, ph = width - left - right, height - top - bottom
    x0, x1 = days[0], max(days[-1], days[0] + 1)
    ymax = max(1, max(max(v) for v, _ in lines.values()))

    def sx(d):
        return left + (d - x0) / (x1 - x0) * pw

    def sy(v):
        return top + ph - v / ymax * ph

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2:.1f}" y="18" text-anchor="middle" font-family="sans-serif" font-size="13">{escape(title)}</text>',
        f'<line x1="{left}" y1="{top + ph}" x2="{left + pw}" y2="{top + ph}" stroke="black"/>',
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + ph}" stroke="black"/>',
    ]
    for k in range(5):
        v = ymax * k / 4
        parts.append(
            f'<text x="{left - 5}" y="{sy(v) + 4:.1f}" text-anchor="end" font-family="sans-serif" font-size="10">{v:.0f}</text>'
        )
        d = x0 + (x1 - x0) * k / 4
        parts.append(
            f'<text x="{sx(d):.1f}" y="{top + ph + 15}" text-anchor="middle" font-family="sans-serif" font-size="10">{d:.0f}</text>'
        )
    parts.append(
        f'<text x="{left + pw / 2:.1f}" y="{height - 5}" text-anchor="middle" font-family="sans-serif" font-size="11">day</text>'
    )
    for n, (label, (values, colour)) in enumerate(lines.items()):
        pts = " ".join(f"{sx(d):.2f},{sy(v):.2f}" for d, v in zip(days, values))
        parts.append(f'<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{pts}"/>')
        ly = top + 12 + 14 * n
        parts.append(f'<line x1="{left + pw - 140}" y1="{ly}" x2="{left + pw - 120}" y2="{ly}" stroke="{colour}" stroke-width="2"/>')
        parts.append(
            f'<text x="{left + pw - 115}" y="{ly + 4}" font-family="sans-serif" font-size="11">{escape(label)}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def write_svg(path, series, title="epidemic curve"):
    Path(path).write_text(svg_chart(series, title), encoding="utf-8")
