"""Corpus BLEU, MWE-bearing devset extraction and n-gram diffing."""

from __future__ import annotations

import html
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence

from .corpus_io import ParallelCorpus, nfc

MAX_ORDER = 4


@dataclass(frozen=True)
class BleuReport:
    bleu: float
    precisions: tuple[float, ...]
    brevity_penalty: float
    hyp_length: int
    ref_length: int

    def to_dict(self) -> dict:
        return {
            "bleu": self.bleu,
            "precisions": list(self.precisions),
            "brevity_penalty": self.brevity_penalty,
            "hyp_length": self.hyp_length,
            "ref_length": self.ref_length,
        }


def ngram_counts(tokens: Sequence[str], n: int) -> Counter:
    return Counter(zip(*(tokens[i:] for i in range(n))))


def corpus_bleu(hyps, refs, smooth: bool = False, max_order: int = MAX_ORDER) -> BleuReport:
    """Single-reference corpus BLEU with pooled clipped n-gram counts.

    With ``smooth`` the orders above 1 get add-one counts (BLEU+1 style),
    useful for sentence-level scores where 4-gram matches vanish.
    """
    if len(hyps) != len(refs):
        raise ValueError(f"{len(hyps)} hypotheses but {len(refs)} references")
    if not hyps:
        raise ValueError("empty hypothesis corpus")
    matches = [0] * max_order
    totals = [0] * max_order
    hyp_len = ref_len = 0
    for hyp, ref in zip(hyps, refs):
        hyp_len += len(hyp)
        ref_len += len(ref)
        for n in range(1, max_order + 1):
            h = ngram_counts(hyp, n)
            if not h:
                break
            r = ngram_counts(ref, n)
            matches[n - 1] += sum(min(c, r[g]) for g, c in h.items() if g in r)
            totals[n - 1] += max(len(hyp) - n + 1, 0)
    precisions = []
    for n, (m, t) in enumerate(zip(matches, totals), start=1):
        if smooth and n > 1:
            precisions.append((m + 1) / (t + 1))
        else:
            precisions.append(m / t if t else 0.0)
    if hyp_len == 0:
        bp = 0.0
    else:
        bp = 1.0 if hyp_len >= ref_len else math.exp(1.0 - ref_len / hyp_len)
    if min(precisions) > 0.0:
        geo = math.exp(sum(math.log(p) for p in precisions) / max_order)
        bleu = 100.0 * bp * geo
    else:
        bleu = 0.0
    return BleuReport(bleu, tuple(precisions), bp, hyp_len, ref_len)


def tokenize(line: str) -> list[str]:
    return nfc(line).split()


# --- MWE devset ----------------------------------------------------------------


def _contains(tokens: Sequence[str], phrases_by_len: dict[int, set]) -> bool:
    for n, phrases in phrases_by_len.items():
        for i in range(len(tokens) - n + 1):
            if tuple(tokens[i : i + n]) in phrases:
                return True
    return False


def _index_phrases(phrases) -> dict[int, set]:
    by_len: dict[int, set] = {}
    for phrase in phrases:
        toks = tuple(nfc(phrase).lower().split())
        if toks:
            by_len.setdefault(len(toks), set()).add(toks)
    return by_len


def extract_mwe_devset(dev: ParallelCorpus, lexicon, tagged_source=None):
    """Keep dev pairs whose source contains any lexicon source MWE.

    Matching is on lowercased whitespace tokens. Passing ``tagged_source``
    (TaggedSentence list aligned with ``dev``) switches to lemma matching,
    using each entry's source surface as the lemma sequence.
    Returns ``(subset, kept_indices)``.
    """
    phrases = _index_phrases(e.src_surface for e in lexicon)
    kept = []
    if phrases:
        if tagged_source is not None:
            if len(tagged_source) != len(dev):
                raise ValueError("tagged source is not aligned with the devset")
            rows = [[t.lemma.lower() for t in s.tokens] for s in tagged_source]
        else:
            rows = [nfc(line).lower().split() for line in dev.source]
        kept = [i for i, toks in enumerate(rows) if _contains(toks, phrases)]
    return dev.select(kept), kept


# --- n-gram diff ---------------------------------------------------------------


@dataclass
class NgramDiff:
    """Reference-aware comparison of a baseline and a new hypothesis.

    ``improving``: n-grams whose clipped reference matches grow in the new
    output (rendered green in the new hypothesis).
    ``worsening``: n-grams that the baseline produces beyond what the
    reference licenses and the new output no longer produces (rendered red
    in the baseline).
    ``lost``: reference matches the baseline had and the new output dropped.
    Spans are 0-based inclusive token ranges.
    """

    improving: set = field(default_factory=set)
    worsening: set = field(default_factory=set)
    lost: set = field(default_factory=set)
    improving_spans: list = field(default_factory=list)
    worsening_spans: list = field(default_factory=list)
    lost_spans: list = field(default_factory=list)


def _all_counts(tokens, max_n) -> Counter:
    counts = Counter()
    for n in range(1, max_n + 1):
        counts.update(ngram_counts(tokens, n))
    return counts


def _spans(tokens, grams) -> list[tuple[int, int]]:
    covered = [False] * len(tokens)
    for n in {len(g) for g in grams}:
        for i in range(len(tokens) - n + 1):
            if tuple(tokens[i : i + n]) in grams:
                for k in range(i, i + n):
                    covered[k] = True
    spans = []
    start = None
    for i, c in enumerate(covered + [False]):
        if c and start is None:
            start = i
        elif not c and start is not None:
            spans.append((start, i - 1))
            start = None
    return spans


def ngram_diff(baseline_hyp, new_hyp, ref, max_n: int = MAX_ORDER) -> NgramDiff:
    if max_n < 1:
        raise ValueError("max_n must be >= 1")
    cb, cn, cr = (_all_counts(t, max_n) for t in (baseline_hyp, new_hyp, ref))

    def matched(c, g):
        return min(c[g], cr[g])

    improving = {g for g in cn if matched(cn, g) > matched(cb, g)}
    lost = {g for g in cb if matched(cb, g) > matched(cn, g)}
    worsening = {g for g in cb if cb[g] - matched(cb, g) > cn[g] - matched(cn, g)}
    return NgramDiff(
        improving={(g, len(g)) for g in improving},
        worsening={(g, len(g)) for g in worsening},
        lost={(g, len(g)) for g in lost},
        improving_spans=_spans(new_hyp, improving),
        worsening_spans=_spans(baseline_hyp, worsening),
        lost_spans=_spans(baseline_hyp, lost),
    )


_CSS = """body{font-family:sans-serif;line-height:1.8}
table{border-collapse:collapse}td{padding:4px 8px;vertical-align:top}
.imp{background:#b7f0b1}.wor{background:#f5b5b5}.lost{text-decoration:underline wavy #c60}
"""


def _mark(tokens, spans, css) -> str:
    out = []
    starts = {s: e for s, e in spans}
    i = 0
    while i < len(tokens):
        if i in starts:
            e = starts[i]
            out.append(f'<span class="{css}">' + html.escape(" ".join(tokens[i : e + 1])) + "</span>")
            i = e + 1
        else:
            out.append(html.escape(tokens[i]))
            i += 1
    return " ".join(out)


def _mark_baseline(tokens, diff: NgramDiff) -> str:
    red = {i for s, e in diff.worsening_spans for i in range(s, e + 1)}
    und = {i for s, e in diff.lost_spans for i in range(s, e + 1)}
    parts = []
    for i, tok in enumerate(tokens):
        classes = [c for c, hit in (("wor", i in red), ("lost", i in und)) if hit]
        text = html.escape(tok)
        parts.append(f'<span class="{" ".join(classes)}">{text}</span>' if classes else text)
    return " ".join(parts)


def render_diff_html(base_lines, new_lines, ref_lines, max_n: int = MAX_ORDER) -> str:
    """Self-contained HTML page: improving n-grams green, worsening red."""
    if not len(base_lines) == len(new_lines) == len(ref_lines):
        raise ValueError("baseline, new and reference must have the same number of lines")
    rows = []
    for k, (b, n, r) in enumerate(zip(base_lines, new_lines, ref_lines), start=1):
        bt, nt, rt = tokenize(b), tokenize(n), tokenize(r)
        d = ngram_diff(bt, nt, rt, max_n)
        rows.append(
            f"<tr><th colspan=2>#{k}</th></tr>\n"
            f"<tr><td>Baseline</td><td>{_mark_baseline(bt, d)}</td></tr>\n"
            f"<tr><td>New</td><td>{_mark(nt, d.improving_spans, 'imp')}</td></tr>\n"
            f"<tr><td>Reference</td><td>{html.escape(' '.join(rt))}</td></tr>\n"
        )
    return (
        "<!DOCTYPE html>\n<html><head><meta charset=\"utf-8\"><title>n-gram diff</title>\n"
        f"<style>{_CSS}</style></head><body>\n<table>\n" + "".join(rows) + "</table>\n</body></html>\n"
    )
