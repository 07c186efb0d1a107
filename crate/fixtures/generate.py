"""Builds the ALTO fixtures and the newspaper ground truth.

Run from this directory: python3 generate.py

Geometry follows printed newspapers: body lines 30 px high on a 40 px
pitch, paragraphs indented by 40 px, 30 px between paragraphs, and titles
set in large type with 60 px of space above and below. Labels in the truth
file come from how each element was built, not from any labeller.
"""

import csv
import random
from xml.sax.saxutils import quoteattr

WORDS = (
    "le la les un une des du de et en au aux sur sous dans pour par avec sans "
    "ville campagne maison rivière pont route marché place église école jardin "
    "conseil maire habitants voisins ouvriers paysans soldats enfants familles "
    "travail récolte blé vin pluie soleil hiver printemps été automne matin soir "
    "semaine journée année dernière prochaine grande petite nouvelle ancienne "
    "belle longue courte forte douce claire sombre calme vive "
    "arrive part reste passe tombe monte descend ouvre ferme attend cherche "
    "trouve porte donne prend voit entend parle répond demande apprend "
    "toujours souvent parfois enfin encore déjà bientôt hier demain ici "
    "très assez plus moins aussi comme mais donc car puis alors"
).split()

CAPITAL_STARTS = (
    "Hier Depuis Dans Les Le La Notre Chaque Après Pendant Selon Avant Sur "
    "Cette Ce Un Une On Nos"
).split()

DOC_TITLE = "LE PETIT JOURNAL DU SOIR"

LINE_H = 30
PITCH = 40
INDENT = 40
PARA_GAP = 30
TITLE_H = 100
TITLE_GAP = 60


class Writer:
    def __init__(self, name, rng):
        self.name = name
        self.rng = rng
        self.pages = []
        self.truth = []

    def page(self):
        self.pages.append([])
        return len(self.pages)

    def block(self, page, hpos, vpos, width, lines, label, line_labels, type_attr=None):
        """lines: (hpos, vpos, height, width, text)."""
        bid = f"P{page}_B{len(self.pages[page - 1]) + 1}"
        height = max(l[1] + l[2] for l in lines) - vpos
        self.pages[page - 1].append((bid, hpos, vpos, height, width, lines, type_attr))
        self.truth.append((bid, "block", label))
        for i, lab in enumerate(line_labels):
            self.truth.append((f"{bid}_L{i + 1}", "line", lab))
        return vpos + height

    def xml(self):
        out = ['<?xml version="1.0" encoding="UTF-8"?>',
               '<alto xmlns="http://www.loc.gov/standards/alto/ns-v3#">',
               "<Layout>"]
        for p, blocks in enumerate(self.pages, 1):
            out.append(f'<Page ID="PAGE{p}" PHYSICAL_IMG_NR="{p}" WIDTH="2400" HEIGHT="3400">')
            out.append('<PrintSpace HPOS="0" VPOS="0" WIDTH="2400" HEIGHT="3400">')
            for bid, hpos, vpos, height, width, lines, type_attr in blocks:
                t = f" TYPE={quoteattr(type_attr)}" if type_attr else ""
                out.append(f'<TextBlock ID="{bid}" HPOS="{hpos}" VPOS="{vpos}" '
                           f'HEIGHT="{height}" WIDTH="{width}"{t}>')
                for i, (lh, lv, lhgt, lw, text) in enumerate(lines, 1):
                    words = "<SP/>".join(f"<String CONTENT={quoteattr(w)}/>" for w in text.split())
                    out.append(f'<TextLine ID="{bid}_L{i}" HPOS="{lh}" VPOS="{lv}" '
                               f'HEIGHT="{lhgt}" WIDTH="{lw}">{words}</TextLine>')
                out.append("</TextBlock>")
            out.append("</PrintSpace>")
            out.append("</Page>")
        out.append("</Layout>")
        out.append("</alto>")
        return "\n".join(out) + "\n"


def body_words(rng, n):
    return " ".join(rng.choice(WORDS) for _ in range(n))


def paragraph(w, page, x, y, col_w, n_lines):
    """Indented first line, full middle lines, short last line ending a sentence."""
    rng = w.rng
    lines = []
    for i in range(n_lines):
        vpos = y + i * PITCH
        if i == 0:
            text = rng.choice(CAPITAL_STARTS) + " " + body_words(rng, 6)
            lines.append((x + INDENT, vpos, LINE_H, col_w - INDENT, text))
        elif i == n_lines - 1:
            k = rng.randint(2, 4)
            text = body_words(rng, k) + "."
            lines.append((x, vpos, LINE_H, 80 * k + 20, text))
        else:
            lines.append((x, vpos, LINE_H, col_w, body_words(rng, 8)))
    labels = ["firstline"] + ["text"] * (n_lines - 1)
    return w.block(page, x, y, col_w, lines, "text", labels)


def title(w, page, x, y, col_w, text):
    tw = min(40 * len(text), col_w)
    hpos = x + (col_w - tw) // 2
    return w.block(page, hpos, y, tw, [(hpos, y, TITLE_H, tw, text)], "title", ["title"])


def header(w, page, y, rows):
    """rows: (height, text); spans the page width."""
    lines = []
    vpos = y
    for h, text in rows:
        lines.append((100, vpos, h, 2200, text))
        vpos += h + 10
    return w.block(page, 100, y, 2200, lines, "header", ["header"] * len(rows))


def column(w, page, x, y, col_w, plan):
    """plan items: int = paragraph line count, str = title, ("sig", text),
    ("ad", lines)."""
    for item in plan:
        if isinstance(item, int):
            y = paragraph(w, page, x, y, col_w, item) + PARA_GAP
        elif isinstance(item, str):
            y = title(w, page, x, y + TITLE_GAP - PARA_GAP, col_w, item) + TITLE_GAP
        elif item[0] == "sig":
            hpos = x + col_w - 300
            y = w.block(page, hpos, y, 300, [(hpos, y, LINE_H, 300, item[1])], "text", ["text"]) + PARA_GAP
        elif item[0] == "ad":
            rows = item[1]
            lines = [(x, y + i * PITCH, LINE_H, col_w, t) for i, t in enumerate(rows)]
            y = w.block(page, x, y, col_w, lines, "other", ["other"] * len(rows), "advertisement") + PARA_GAP
    return y


COLS = [100, 850, 1600]
COL_W = 700


def newspaper():
    w = Writer("newspaper_3c", random.Random(1943))
    plans = [
        [
            [5, 4, 6, "Nouvelles locales", 4, 5, 3, 6, 4],
            ["Chronique agricole", 5, 6, 4, "Échos", 5, 4, ("sig", "Henri Marchal."), 5],
            ["Faits divers", 4, 5, 6, 3, "Tribunaux", 4, 5, 6],
        ],
        [
            [6, 4, 5, "Théâtre", 5, 4, 6, 3, 5, 4],
            ["Sports", 5, 4, 6, 5, "Marchés", 4, 5, 6],
            [4, 6, 5, "Nécrologie", 3, 5, 4, ("sig", "Paul Girard."), 6, 5],
        ],
        [
            [5, 6, 4, "Mariages", 5, 4, 6, 5, 3],
            ["Feuilleton", 6, 5, 6, 4, 5, 6, 4],
            [4, 5, ("ad", ["Maison Berthier", "chaussures et sabots", "prix modérés"]), 5, "Variétés", 4, 6, 5],
        ],
    ]
    for p, cols in enumerate(plans, 1):
        page = w.page()
        if p == 1:
            top = header(w, page, 100, [(90, DOC_TITLE), (LINE_H, "Paraissant le samedi"),
                                        (LINE_H, "Rédacteur en chef Louis Perrin")])
        else:
            top = header(w, page, 100, [(LINE_H, f"{DOC_TITLE} Page {p}")])
        for x, plan in zip(COLS, cols):
            column(w, page, x, top + 60, COL_W, plan)
    return w


def three_column_page():
    w = Writer("3col_page", random.Random(7))
    page = w.page()
    top = header(w, page, 100, [(90, DOC_TITLE), (LINE_H, "Paraissant le samedi")])
    column(w, page, COLS[0], top + 60, COL_W, [8, 9, 7, 8])
    column(w, page, COLS[1], top + 60, COL_W, [9, 8, 7, 9])
    column(w, page, COLS[2], top + 60, COL_W, [8, 6, 6])
    return w


def two_column_page():
    w = Writer("2col_page", random.Random(11))
    page = w.page()
    top = header(w, page, 100, [(LINE_H, f"{DOC_TITLE} Page 2")])
    y = paragraph(w, page, 150, top + 40, 1000, 12)
    # Two centered lines with wide margins above and below.
    y += 70
    lines = [(450, y, 50, 400, "GRANDE"), (450, y + 60, 50, 400, "NOUVELLE")]
    y = w.block(page, 450, y, 400, lines, "title", ["title", "title"]) + 70
    paragraph(w, page, 150, y, 1000, 10)
    y = top + 40
    for _ in range(5):
        y = paragraph(w, page, 1250, y, 1000, 2) + PARA_GAP
    return w


def write(w, truth=False):
    with open(f"{w.name}.xml", "w", encoding="utf-8") as f:
        f.write(w.xml())
    if truth:
        with open(f"{w.name}.truth.csv", "w", newline="", encoding="utf-8") as f:
            out = csv.writer(f, lineterminator="\n")
            out.writerow(["document_id", "element_id", "kind", "label"])
            for eid, kind, label in w.truth:
                out.writerow([w.name, eid, kind, label])


if __name__ == "__main__":
    write(newspaper(), truth=True)
    write(three_column_page())
    write(two_column_page(), truth=True)
    with open("layouts.csv", "w", newline="", encoding="utf-8") as f:
        f.write("document_id,layout\nnewspaper_3c,3c+\n2col_page,2c\n")
    with open("malformed.xml", "w", encoding="utf-8") as f:
        f.write('<?xml version="1.0"?>\n<alto><Layout><Page><PrintSpace><TextBlock ID="b1">\n')
