"""Attention inspection over BPE subword units.

Subwords are merged into words (``autobu@@ se`` -> ``autobuse``), then each
MWE span is summarised by how much of its target rows' attention lands on
the aligned source span (concentration) and how spread out those rows are
(entropy, in bits). Matrices render as text, SVG or HTML.
"""

from __future__ import annotations

import html
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import kernels
from .corpus_io import AttentionRecord, nfc

BPE_MARK = "@@"
SHADES = " .:-=+*#%@"
ROW_SUM_TOL = 1e-4


@dataclass(frozen=True, eq=False)
class WordAttention:
    id: str
    src_words: tuple[str, ...]
    trg_words: tuple[str, ...]
    matrix: np.ndarray
    src_map: tuple[tuple[int, int], ...]
    trg_map: tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class SpanReport:
    src_span: tuple[int, int]
    trg_span: tuple[int, int]
    concentration: float
    mean_entropy_bits: float

    def to_dict(self) -> dict:
        return {
            "src_span": list(self.src_span),
            "trg_span": list(self.trg_span),
            "concentration": self.concentration,
            "mean_entropy_bits": self.mean_entropy_bits,
        }


def group_units(units: Sequence[str], rec_id: str = "?"):
    """Words and their ``[start, stop)`` unit ranges."""
    words, ranges = [], []
    pieces: list[str] = []
    start = 0
    for i, unit in enumerate(units):
        if unit.endswith(BPE_MARK):
            pieces.append(unit[: -len(BPE_MARK)])
            continue
        pieces.append(unit)
        words.append("".join(pieces))
        ranges.append((start, i + 1))
        pieces = []
        start = i + 1
    if pieces:
        raise ValueError(f"record {rec_id}: last unit {units[-1]!r} continues into nothing")
    return tuple(words), tuple(ranges)


def merge_bpe(record: AttentionRecord) -> WordAttention:
    """Merge subwords: source columns are summed, target rows averaged."""
    src_words, src_map = group_units(record.src_units, record.id)
    trg_words, trg_map = group_units(record.trg_units, record.id)
    m = record.matrix
    if len(src_map) != len(record.src_units):
        m = kernels.sum_column_groups(m, [s for s, _ in src_map])
    if len(trg_map) != len(record.trg_units):
        m = kernels.mean_row_groups(m, [s for s, _ in trg_map])
    return WordAttention(record.id, src_words, trg_words, np.asarray(m, dtype=np.float64), src_map, trg_map)


def row_entropy(matrix) -> np.ndarray:
    """Shannon entropy per row in bits.

    Rows are renormalised first so float32 rounding (sums a hair above 1)
    cannot push a one-hot row below zero.
    """
    m = np.asarray(matrix, dtype=np.float64)
    sums = m.sum(axis=1, keepdims=True)
    m = np.divide(m, sums, out=np.zeros_like(m), where=sums > 0)
    return kernels.row_entropy(m)


def _check_span(span, size, side):
    s, e = span
    if not 0 <= s <= e < size:
        raise IndexError(f"{side} span {span} outside 0..{size - 1}")


def span_concentration(wa: WordAttention, src_span, trg_span) -> SpanReport:
    """Mean attention mass a target span sends into a source span (spans inclusive)."""
    _check_span(src_span, len(wa.src_words), "source")
    _check_span(trg_span, len(wa.trg_words), "target")
    rows = wa.matrix[trg_span[0] : trg_span[1] + 1]
    inside = rows[:, src_span[0] : src_span[1] + 1].sum()
    conc = float(min(1.0, max(0.0, inside / rows.shape[0])))
    ent = float(row_entropy(rows).mean())
    return SpanReport(tuple(src_span), tuple(trg_span), conc, ent)


def _find(words: Sequence[str], phrase: str):
    needle = [nfc(w).casefold() for w in phrase.split()]
    hay = [nfc(w).casefold() for w in words]
    n = len(needle)
    if n == 0:
        return None
    for i in range(len(hay) - n + 1):
        if hay[i : i + n] == needle:
            return (i, i + n - 1)
    return None


def locate_mwe_spans(wa: WordAttention, pair):
    """First occurrence of the pair's source and target surfaces, or None."""
    src = _find(wa.src_words, pair.src_surface)
    trg = _find(wa.trg_words, pair.trg_surface)
    if src is None or trg is None:
        return None
    return src, trg


# --- statistics over dumps -----------------------------------------------------


def record_stats(records, lexicon) -> list[dict]:
    """One row per (record, lexicon entry) located in the record."""
    rows = []
    for rec in sorted(records, key=lambda r: r.id):
        wa = merge_bpe(rec)
        for entry in lexicon:
            spans = locate_mwe_spans(wa, entry)
            if spans is None:
                continue
            rep = span_concentration(wa, *spans)
            rows.append({"id": rec.id, "src": entry.src_surface, "trg": entry.trg_surface, **rep.to_dict()})
    return rows


@dataclass(frozen=True)
class Comparison:
    id: str
    src_surface: str
    trg_surface: str
    a: SpanReport
    b: SpanReport


def compare_systems(records_a, records_b, lexicon):
    """Pair records by id and report each located MWE under both systems.

    Returns ``(rows, skipped)`` where ``skipped`` counts ids present in only
    one dump. Rows are ordered by id, then lexicon order.
    """
    by_a = {r.id: r for r in records_a}
    by_b = {r.id: r for r in records_b}
    shared = sorted(by_a.keys() & by_b.keys())
    skipped = len(by_a.keys() ^ by_b.keys())
    rows = []
    for rid in shared:
        wa, wb = merge_bpe(by_a[rid]), merge_bpe(by_b[rid])
        for entry in lexicon:
            sa = locate_mwe_spans(wa, entry)
            sb = locate_mwe_spans(wb, entry)
            if sa is None or sb is None:
                continue
            rows.append(Comparison(rid, entry.src_surface, entry.trg_surface,
                                   span_concentration(wa, *sa), span_concentration(wb, *sb)))
    return rows, skipped


def format_comparison_tsv(rows) -> str:
    out = ["id\tsrc\ttrg\tconcentration_a\tconcentration_b\tentropy_a\tentropy_b\n"]
    for r in rows:
        out.append(
            f"{r.id}\t{r.src_surface}\t{r.trg_surface}\t{r.a.concentration:.6f}\t{r.b.concentration:.6f}"
            f"\t{r.a.mean_entropy_bits:.6f}\t{r.b.mean_entropy_bits:.6f}\n"
        )
    return "".join(out)


# --- rendering -----------------------------------------------------------------


def shade(p: float) -> str:
    return SHADES[min(int(p * len(SHADES)), len(SHADES) - 1)] if p > 0 else SHADES[0]


def _labels(obj):
    if isinstance(obj, WordAttention):
        return obj.src_words, obj.trg_words
    return obj.src_units, obj.trg_units


def _render_text(src, trg, m) -> str:
    lines = [f"{j:>3}  {w}" for j, w in enumerate(src)]
    width = max((len(w) for w in trg), default=0)
    header = " " * width + " |" + " ".join(f"{j % 10}" for j in range(len(src))) + "|"
    lines.append("")
    lines.append(header)
    for t, word in enumerate(trg):
        cells = " ".join(shade(float(p)) for p in m[t])
        lines.append(f"{word:>{width}} |{cells}|")
    return "\n".join(lines) + "\n"


CELL = 24


def _render_svg(src, trg, m) -> str:
    left = 8 * max((len(w) for w in trg), default=1) + 12
    top = 8 * max((len(w) for w in src), default=1) + 12
    width = left + CELL * len(src) + 4
    height = top + CELL * len(trg) + 4
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="monospace" font-size="12">'
    ]
    for j, w in enumerate(src):
        x = left + CELL * j + CELL // 2
        parts.append(
            f'<text x="{x}" y="{top - 6}" transform="rotate(-90 {x} {top - 6})" '
            f'dominant-baseline="middle">{html.escape(w)}</text>'
        )
    for t, w in enumerate(trg):
        y = top + CELL * t + CELL // 2
        parts.append(f'<text x="{left - 6}" y="{y}" text-anchor="end" dominant-baseline="middle">{html.escape(w)}</text>')
        for j in range(len(src)):
            p = float(m[t, j])
            parts.append(
                f'<rect x="{left + CELL * j}" y="{top + CELL * t}" width="{CELL}" height="{CELL}" '
                f'fill="#000" fill-opacity="{p:.4f}" stroke="#ccc"><title>{p:.4f}</title></rect>'
            )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def render_matrix(obj, fmt: str = "text") -> str:
    """Render a WordAttention or AttentionRecord as ``text``, ``svg`` or ``html``.

    Text uses the ten-level ramp ``" .:-=+*#%@"`` over equal bins of [0, 1].
    """
    src, trg = _labels(obj)
    m = np.asarray(obj.matrix, dtype=np.float64)
    if fmt == "text":
        return _render_text(src, trg, m)
    if fmt == "svg":
        return _render_svg(src, trg, m)
    if fmt == "html":
        title = html.escape(f"Soft alignment: {obj.id}")
        return (
            f'<!DOCTYPE html>\n<html><head><meta charset="utf-8"><title>{title}</title></head>\n'
            f"<body>\n<h1>{title}</h1>\n{_render_svg(src, trg, m)}</body></html>\n"
        )
    raise ValueError(f"unknown format {fmt!r}; expected text, svg or html")


def max_entropy(n_src: int) -> float:
    return math.log2(n_src) if n_src > 0 else 0.0
