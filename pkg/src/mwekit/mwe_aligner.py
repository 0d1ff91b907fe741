"""Bilingual alignment of monolingual MWE candidates.

Pairs are scored by a weighted mix of Dice co-occurrence over the
sentence-aligned corpus and diacritic-insensitive string similarity.
"""

from __future__ import annotations

import logging
import unicodedata
from collections import defaultdict
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import kernels
from .corpus_io import LexiconEntry, TaggedSentence
from .pattern_engine import MweCandidate, dice_score

log = logging.getLogger(__name__)

DEFAULT_WEIGHTS = (0.7, 0.3)
DEFAULT_THRESHOLD = 0.5
LENGTH_RATIO_WARN = 2.0


def fold(text: str) -> str:
    """Lowercase and strip combining marks (``elektronické`` -> ``elektronicke``)."""
    decomposed = unicodedata.normalize("NFD", text.lower())
    return "".join(ch for ch in decomposed if not unicodedata.combining(ch))


def _codes(text: str) -> np.ndarray:
    return np.fromiter((ord(c) for c in text), dtype=np.int64, count=len(text))


def string_similarity(a: str, b: str) -> float:
    fa, fb = fold(a), fold(b)
    longest = max(len(fa), len(fb))
    if longest == 0:
        return 1.0
    return 1.0 - kernels.levenshtein(_codes(fa), _codes(fb)) / longest


@dataclass(frozen=True)
class MwePair:
    src: MweCandidate
    trg: MweCandidate
    cooc: int
    score: float

    def __post_init__(self):
        if self.cooc < 1:
            raise ValueError("aligned pairs must co-occur at least once")
        if not 0.0 <= self.score <= 1.0:
            raise ValueError(f"score {self.score} outside [0, 1]")

    @property
    def src_surface(self) -> str:
        return self.src.surface_text

    @property
    def trg_surface(self) -> str:
        return self.trg.surface_text

    @property
    def length_ratio(self) -> float:
        a, b = len(self.src.surface), len(self.trg.surface)
        return max(a, b) / min(a, b)

    def to_entry(self) -> LexiconEntry:
        return LexiconEntry(self.src_surface, self.trg_surface, self.score, self.src.freq, self.trg.freq, self.cooc)


def line_index(sentences: Sequence[TaggedSentence]) -> dict[str, int]:
    index = {}
    for i, sent in enumerate(sentences):
        if sent.id in index:
            raise ValueError(f"duplicate sentence id {sent.id!r}")
        index[sent.id] = i
    return index


def candidate_lines(cand: MweCandidate, index: dict[str, int]) -> set[int]:
    try:
        return {index[sid] for sid, _, _ in cand.occurrences}
    except KeyError as exc:
        raise ValueError(f"candidate {cand.key_text!r} refers to unknown sentence {exc.args[0]!r}") from None


def cooccurrence_counts(src_cands, trg_cands, src_sentences, trg_sentences, corpus=None) -> dict:
    """``{(src lemma_key, trg lemma_key): number of aligned lines containing both}``.

    Tagged corpora must be line-aligned with each other (and with ``corpus``
    when one is given). Zero counts are omitted.
    """
    if len(src_sentences) != len(trg_sentences):
        raise ValueError(
            f"tagged corpora are not aligned: {len(src_sentences)} source vs {len(trg_sentences)} target sentences"
        )
    if corpus is not None and len(corpus) != len(src_sentences):
        raise ValueError(f"parallel corpus has {len(corpus)} lines but tagged corpora have {len(src_sentences)}")
    src_index = line_index(src_sentences)
    trg_index = line_index(trg_sentences)
    by_line = defaultdict(list)
    for t in trg_cands:
        for line in candidate_lines(t, trg_index):
            by_line[line].append(t.lemma_key)
    counts = {}
    for s in src_cands:
        for line in candidate_lines(s, src_index):
            for tkey in by_line.get(line, ()):
                key = (s.lemma_key, tkey)
                counts[key] = counts.get(key, 0) + 1
    return counts


def pair_score(src: MweCandidate, trg: MweCandidate, cooc: int, weights=DEFAULT_WEIGHTS) -> float:
    w_dice, w_sim = weights
    score = w_dice * dice_score(src.freq, trg.freq, cooc) + w_sim * string_similarity(
        src.surface_text, trg.surface_text
    )
    return min(1.0, max(0.0, score))


def _check_weights(weights, threshold):
    w_dice, w_sim = weights
    if w_dice < 0 or w_sim < 0 or abs(w_dice + w_sim - 1.0) > 1e-9:
        raise ValueError(f"weights must be non-negative and sum to 1, got {weights}")
    if not 0.0 <= threshold <= 1.0:
        raise ValueError(f"threshold must lie in [0, 1], got {threshold}")


def align_pairs(src_cands, trg_cands, cooc: dict, weights=DEFAULT_WEIGHTS, threshold=DEFAULT_THRESHOLD):
    """One best target per source candidate, scored and filtered.

    ``cooc`` is the mapping from :func:`cooccurrence_counts`. Ties on score
    go to the higher co-occurrence count, then the smaller target lemma key.
    Output is sorted by score descending, then source and target keys.
    """
    _check_weights(weights, threshold)
    src_by_key = {c.lemma_key: c for c in src_cands}
    trg_by_key = {c.lemma_key: c for c in trg_cands}
    best: dict[tuple, MwePair] = {}
    for (skey, tkey), n in cooc.items():
        if n < 1 or skey not in src_by_key or tkey not in trg_by_key:
            continue
        src, trg = src_by_key[skey], trg_by_key[tkey]
        score = pair_score(src, trg, n, weights)
        if score < threshold:
            continue
        cur = best.get(skey)
        if cur is None or (-score, -n, tkey) < (-cur.score, -cur.cooc, cur.trg.lemma_key):
            best[skey] = MwePair(src, trg, n, score)
    pairs = sorted(best.values(), key=lambda p: (-p.score, p.src.lemma_key, p.trg.lemma_key))
    for p in pairs:
        if p.length_ratio > LENGTH_RATIO_WARN:
            log.warning(
                "token-count mismatch in aligned pair %r -> %r (ratio %.2f)",
                p.src_surface, p.trg_surface, p.length_ratio,
            )
    return pairs


def align_corpora(src_cands, trg_cands, src_sentences, trg_sentences, weights=DEFAULT_WEIGHTS,
                  threshold=DEFAULT_THRESHOLD, corpus=None):
    cooc = cooccurrence_counts(src_cands, trg_cands, src_sentences, trg_sentences, corpus)
    return align_pairs(src_cands, trg_cands, cooc, weights, threshold)


def pair_lines(pairs, src_sentences, trg_sentences) -> list[int]:
    """Sorted line indices where at least one aligned pair co-occurs."""
    src_index = line_index(src_sentences)
    trg_index = line_index(trg_sentences)
    lines = set()
    for p in pairs:
        lines |= candidate_lines(p.src, src_index) & candidate_lines(p.trg, trg_index)
    return sorted(lines)
