"""
Report rendering: plain text, TSV plot data and a PDF summary of suite runs.

Reports take serializer output (dicts of strings, numbers and booleans), so
the same data renders identically in every format.
"""
import logging
from io import BytesIO
from xml.sax.saxutils import escape

from reportlab.lib import colors
from reportlab.lib.pagesizes import A4
from reportlab.lib.styles import ParagraphStyle, getSampleStyleSheet
from reportlab.lib.units import inch
from reportlab.platypus import Paragraph, SimpleDocTemplate, Spacer, Table, TableStyle

logger = logging.getLogger(__name__)

FORMATS = ('text', 'tsv')

HEADER_BLUE = '#2b6cb0'
BODY_BLUE = '#ebf8ff'
GRID_BLUE = '#bee3f8'
HEADER_GREEN = '#38a169'
BODY_GREEN = '#f0fff4'
GRID_GREEN = '#9ae6b4'
TITLE_NAVY = '#1a365d'


def cell(value):
    if value is None:
        return '-'
    if isinstance(value, bool):
        return 'yes' if value else 'no'
    if isinstance(value, dict):
        return ' '.join(f'{key}={cell(item)}' for key, item in value.items())
    return str(value)


def render_fields(title, data):
    """``key: value`` lines under a title."""
    width = max((len(key) for key in data), default=0)
    lines = [title, '=' * len(title)]
    lines += [f'{key.ljust(width)}  {cell(value)}' for key, value in data.items()]
    return '\n'.join(lines) + '\n'


def render_table(rows, columns=None):
    """Aligned text table."""
    if not rows:
        return '(no rows)\n'
    columns = columns or list(rows[0])
    cells = [[cell(row.get(column)) for column in columns] for row in rows]
    widths = [max(len(column), *(len(r[k]) for r in cells)) for k, column in enumerate(columns)]
    lines = ['  '.join(column.ljust(w) for column, w in zip(columns, widths)).rstrip()]
    lines.append('  '.join('-' * w for w in widths))
    lines += ['  '.join(value.ljust(w) for value, w in zip(r, widths)).rstrip() for r in cells]
    return '\n'.join(lines) + '\n'


def render_tsv(rows, columns=None):
    if not rows:
        return ''
    columns = columns or list(rows[0])
    lines = ['\t'.join(columns)]
    lines += ['\t'.join(cell(row.get(column)) for column in columns) for row in rows]
    return '\n'.join(lines) + '\n'


def render(title, data, fmt='text', rows=None):
    """A report: summary fields and an optional table of rows."""
    if fmt == 'tsv':
        if rows:
            return render_tsv(rows)
        return render_tsv([{'field': key, 'value': cell(value)} for key, value in data.items()])
    text = render_fields(title, data)
    if rows:
        text += '\n' + render_table(rows)
    return text


def _table_style(header, body, grid):
    return TableStyle([
        ('BACKGROUND', (0, 0), (-1, 0), colors.HexColor(header)),
        ('TEXTCOLOR', (0, 0), (-1, 0), colors.whitesmoke),
        ('ALIGN', (0, 0), (-1, -1), 'LEFT'),
        ('FONTNAME', (0, 0), (-1, 0), 'Helvetica-Bold'),
        ('FONTSIZE', (0, 0), (-1, 0), 11),
        ('BOTTOMPADDING', (0, 0), (-1, 0), 10),
        ('BACKGROUND', (0, 1), (-1, -1), colors.HexColor(body)),
        ('TEXTCOLOR', (0, 1), (-1, -1), colors.black),
        ('FONTNAME', (0, 1), (-1, -1), 'Helvetica'),
        ('FONTSIZE', (0, 1), (-1, -1), 9),
        ('GRID', (0, 0), (-1, -1), 1, colors.HexColor(grid)),
        ('TOPPADDING', (0, 1), (-1, -1), 6),
        ('BOTTOMPADDING', (0, 1), (-1, -1), 6),
    ])


def suite_pdf(results, title='Catalytic lab suite'):
    """PDF bytes with a pass/fail summary and one row per check."""
    buffer = BytesIO()
    doc = SimpleDocTemplate(buffer, pagesize=A4, rightMargin=54, leftMargin=54,
                            topMargin=54, bottomMargin=54, invariant=1)

    styles = getSampleStyleSheet()
    title_style = ParagraphStyle(
        'SuiteTitle',
        parent=styles['Heading1'],
        fontSize=22,
        spaceAfter=24,
        textColor=colors.HexColor(TITLE_NAVY),
        alignment=1,
    )
    heading_style = ParagraphStyle(
        'SuiteHeading',
        parent=styles['Heading2'],
        fontSize=15,
        spaceBefore=16,
        spaceAfter=8,
        textColor=colors.HexColor(HEADER_BLUE),
    )
    detail_style = ParagraphStyle('SuiteDetail', parent=styles['Normal'], fontSize=8, leading=10)

    passed = sum(1 for result in results if result['passed'])
    story = [Paragraph(title, title_style)]

    story.append(Paragraph('Summary', heading_style))
    summary = Table([
        ['Checks', 'Passed', 'Failed'],
        [str(len(results)), str(passed), str(len(results) - passed)],
    ], colWidths=[1.6 * inch] * 3)
    summary.setStyle(_table_style(HEADER_BLUE, BODY_BLUE, GRID_BLUE))
    story.append(summary)
    story.append(Spacer(1, 16))

    story.append(Paragraph('Checks', heading_style))
    rows = [['Check', 'Result', 'Detail']]
    for result in results:
        rows.append([
            result['name'],
            'pass' if result['passed'] else 'FAIL',
            Paragraph(escape(result['detail']), detail_style),
        ])
    checks = Table(rows, colWidths=[1.8 * inch, 0.7 * inch, 4.0 * inch], repeatRows=1)
    checks.setStyle(_table_style(HEADER_GREEN, BODY_GREEN, GRID_GREEN))
    story.append(checks)

    doc.build(story)
    logger.debug('Rendered suite PDF with %d checks', len(results))
    return buffer.getvalue()
