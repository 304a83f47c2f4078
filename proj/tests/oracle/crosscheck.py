"""Cross-checks fixtures and reports with third-party readers.

pdfminer.six re-extracts the PDF essays, the stdlib zipfile/ElementTree
re-reads the .docx essays, olefile opens the legacy .doc sample and
openpyxl opens the XLSX report, which is compared cell by cell with the
CSV report read by the stdlib csv module.

Exits 77 (skip) when a reader is not installed.
"""

import csv
import io
import json
import logging
import sys
import zipfile
import xml.etree.ElementTree as ET
from pathlib import Path

try:
    import olefile
    import openpyxl
    from pdfminer.high_level import extract_text
except ImportError as exc:  # pragma: no cover
    print(f"skipping: {exc}")
    sys.exit(77)

W = "{http://schemas.openxmlformats.org/wordprocessingml/2006/main}"
MC_FALLBACK = "{http://schemas.openxmlformats.org/markup-compatibility/2006}Fallback"

failures = []


def check(cond, what):
    if not cond:
        failures.append(what)
        print(f"FAIL {what}")


def census(text):
    return {
        "ascii_double": text.count('"'),
        "ascii_single": text.count("'"),
        "curly_double": text.count("“") + text.count("”"),
        "curly_single": text.count("‘") + text.count("’"),
        "em_dash": text.count("—"),
        "en_dash": text.count("–"),
        "ellipsis": text.count("…"),
    }


def docx_text(path):
    texts = []
    with zipfile.ZipFile(path) as z:
        for part in ("word/document.xml", "word/footnotes.xml"):
            if part not in z.namelist():
                continue
            collect(ET.fromstring(z.read(part)), texts)
    return "".join(texts)


def collect(node, texts):
    # Alternate-content fallbacks duplicate the chosen branch.
    if node.tag == MC_FALLBACK:
        return
    if node.tag == W + "t":
        texts.append(node.text or "")
    for child in node:
        collect(child, texts)


def doc_piece_text(word, table):
    """Text of the whole piece table, decoded from the FIB's Clx pointer."""
    import struct

    csw = struct.unpack_from("<H", word, 0x20)[0]
    lw_at = 0x22 + 2 * csw
    cslw = struct.unpack_from("<H", word, lw_at)[0]
    fclcb_at = lw_at + 2 + 4 * cslw + 2
    fc_clx, lcb_clx = struct.unpack_from("<II", word, fclcb_at + 33 * 8)
    clx = table[fc_clx:fc_clx + lcb_clx]
    assert clx[0] == 2
    lcb = struct.unpack_from("<I", clx, 1)[0]
    plc = clx[5:5 + lcb]
    n = (lcb - 4) // 12
    cps = struct.unpack_from(f"<{n + 1}I", plc, 0)
    out = []
    for i in range(n):
        fc = struct.unpack_from("<I", plc, 4 * (n + 1) + 8 * i + 2)[0]
        count = cps[i + 1] - cps[i]
        if fc & 0x40000000:
            start = (fc & ~0x40000000) // 2
            out.append(word[start:start + count].decode("cp1252"))
        else:
            out.append(word[fc:fc + 2 * count].decode("utf-16-le"))
    return "".join(out).replace("\r", "\n")


def main(base):
    logging.getLogger("pdfminer").setLevel(logging.ERROR)
    base = Path(base)
    manifest = json.loads((base / "manifest.json").read_text(encoding="utf-8"))

    for essay in manifest["essays"]:
        path = base / "corpus" / essay["name"]
        if path.suffix == ".pdf":
            text = extract_text(str(path))
        else:
            text = docx_text(path)
        got = census(text)
        check(got == essay["planted"], f"{essay['name']}: third-party census {got} != planted {essay['planted']}")

    doc = manifest["doc"]
    ole = olefile.OleFileIO(str(base / "doc" / doc["name"]))
    check(ole.exists("WordDocument"), "sample.doc: WordDocument stream missing")
    check(ole.exists("1Table"), "sample.doc: 1Table stream missing")
    word = ole.openstream("WordDocument").read()
    check(word[:2] == b"\xec\xa5", "sample.doc: FIB magic")
    table = ole.openstream("1Table").read()
    ole.close()
    text = doc_piece_text(word, table)
    for para in doc["paragraphs"]:
        check(para in text, f"sample.doc: paragraph {para!r} not found in piece-table text")

    with open(base / "report" / "report.csv", newline="", encoding="utf-8") as f:
        raw = f.read()
    check("﻿" not in raw[:1], "report.csv: no byte-order mark")
    rows = list(csv.reader(io.StringIO(raw, newline="")))

    wb = openpyxl.load_workbook(base / "report" / "report.xlsx")
    ws = wb.worksheets[0]
    check(ws.title == "AI Detection Results", f"sheet title {ws.title!r}")
    matrix = []
    for row in ws.iter_rows(min_row=1, max_row=ws.max_row, max_col=len(rows[0])):
        matrix.append(["" if c.value is None else str(c.value) for c in row])
    check(matrix == rows, "xlsx cell matrix equals csv")
    check(ws.auto_filter.ref == f"A1:{openpyxl.utils.get_column_letter(len(rows[0]))}{len(rows)}",
          f"autofilter {ws.auto_filter.ref}")

    header = rows[0]
    verdict_col = header.index("Verdict")
    fills = {"NoTraces": "FFC6EFCE", "Acknowledged": "FFC6EFCE", "Unacknowledged": "FFFFC7CE",
             "AllAscii": "FFD9D9D9"}
    for r, row in enumerate(rows[1:], start=2):
        name_fill = ws.cell(row=r, column=1).fill.fgColor.rgb
        check(name_fill == fills[row[verdict_col]], f"row {r} name fill {name_fill}")
        check(isinstance(ws.cell(row=r, column=2).value, int), f"row {r} AI Traces is numeric")
        for c, label in enumerate(header, start=1):
            if label.endswith(" Mentioned"):
                want = "FFC6EFCE" if row[c - 1] == "Yes" else "FFFFC7CE"
                check(ws.cell(row=r, column=c).fill.fgColor.rgb == want, f"row {r} col {label} fill")

    if failures:
        print(f"{len(failures)} cross-check failure(s)")
        return 1
    print(f"cross-check passed: {len(manifest['essays'])} essays, doc sample, report pair")
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1]))
