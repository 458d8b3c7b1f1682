import io

from reportlab.lib import colors
from reportlab.lib.pagesizes import A4
from reportlab.lib.units import mm
from reportlab.pdfbase.pdfmetrics import stringWidth
from reportlab.pdfgen import canvas

FONT = 'Helvetica'
FONT_BOLD = 'Helvetica-Bold'
ROW_H = 7 * mm


def _draw_text(c, x, y, text, size=8, align='left', bold=False):
    c.setFont(FONT_BOLD if bold else FONT, size)
    c.setFillColor(colors.black)
    text = str(text if text is not None else '')
    if align == 'center':
        c.drawCentredString(x, y, text)
    elif align == 'right':
        c.drawRightString(x, y, text)
    else:
        c.drawString(x, y, text)


def _fit(text, width, size):
    text = str(text)
    while text and stringWidth(text, FONT_BOLD, size) > width:
        text = text[:-2] + '…' if len(text) > 2 else ''
    return text


def _draw_table(c, table, page_w, page_h, fingerprint):
    m = 15 * mm
    w = page_w - 2 * m
    curr_y = page_h - m

    _draw_text(c, m, curr_y - 6 * mm, table.title, size=14, bold=True)
    curr_y -= 14 * mm

    columns = len(table.header)
    first_w = w * 0.4 if columns > 1 else w
    other_w = (w - first_w) / max(columns - 1, 1)
    widths = [first_w] + [other_w] * (columns - 1)

    rows = [table.header] + list(table.rows)
    c.roundRect(m, curr_y - ROW_H * len(rows), w, ROW_H * len(rows), 3, stroke=1, fill=0)
    for row_index, row in enumerate(rows):
        x = m
        baseline = curr_y - ROW_H * row_index - 5 * mm
        for column, cell in enumerate(row):
            bold = row_index == 0 or (row_index - 1, column) in table.bold
            text = _fit(cell, widths[column] - 4 * mm, 8)
            if column == 0:
                _draw_text(c, x + 2 * mm, baseline, text, bold=bold)
            else:
                _draw_text(c, x + widths[column] / 2, baseline, text, align='center', bold=bold)
            x += widths[column]
        if row_index == 0:
            c.setStrokeColor(colors.black)
            c.line(m, curr_y - ROW_H, m + w, curr_y - ROW_H)

    _draw_text(c, m, m, f'fingerprint {fingerprint}', size=7)
    c.showPage()


def generate_report_pdf(tables, fingerprint=''):
    """
    One page per table. Each table has `title`, `header`, `rows` and `bold`,
    a set of (row, column) cells to emphasise. `invariant=1` keeps the bytes
    free of creation dates and random document ids.
    """
    buffer = io.BytesIO()
    page_w, page_h = A4
    c = canvas.Canvas(buffer, pagesize=A4, invariant=1)
    c.setTitle('MARVEL evaluation report')
    for table in tables:
        _draw_table(c, table, page_w, page_h, fingerprint)
    c.save()

    buffer.seek(0)
    return buffer.getvalue()
