"""POS-sequence pattern DSL and MWE candidate extraction.

A pattern line looks like ``np2: NOUN ADP{0,1} NOUN``. Items are a UPOS
tag, an alternation ``(ADJ|NOUN)``, the wildcard ``*``, and any of those
followed by a bounded repeat ``{m,n}``.
"""

from __future__ import annotations

import re
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .corpus_io import FormatError, TaggedSentence

UPOS_TAGS = (
    "ADJ", "ADP", "ADV", "AUX", "CCONJ", "DET", "INTJ", "NOUN", "NUM",
    "PART", "PRON", "PROPN", "PUNCT", "SCONJ", "SYM", "VERB", "X",
)
TAG_ID = {tag: i for i, tag in enumerate(UPOS_TAGS)}
ANY_MASK = (1 << len(UPOS_TAGS)) - 1
# tags outside UPOS in input data never match a literal, only the wildcard
UNKNOWN_TAG_ID = len(UPOS_TAGS)
WILDCARD_MASK = ANY_MASK | (1 << UNKNOWN_TAG_ID)
MAX_REPEAT = 8


class PatternError(ValueError):
    pass


@dataclass(frozen=True)
class Literal:
    tag: str


@dataclass(frozen=True)
class Alternation:
    tags: frozenset


@dataclass(frozen=True)
class Wildcard:
    pass


@dataclass(frozen=True)
class Repeat:
    item: object
    min: int
    max: int


def _bounds(item):
    if isinstance(item, Repeat):
        return item.min, item.max
    return 1, 1


def _mask(item) -> int:
    if isinstance(item, Literal):
        return 1 << TAG_ID[item.tag]
    if isinstance(item, Alternation):
        m = 0
        for tag in item.tags:
            m |= 1 << TAG_ID[tag]
        return m
    return WILDCARD_MASK


@dataclass(frozen=True)
class Pattern:
    name: str
    items: tuple

    def __post_init__(self):
        if not self.items:
            raise PatternError(f"pattern {self.name!r} has no items")
        if self.min_length < 2:
            raise PatternError(
                f"pattern {self.name!r} can match {self.min_length} token(s); an MWE needs at least 2"
            )

    @property
    def min_length(self) -> int:
        return sum(_bounds(i)[0] for i in self.items)

    @property
    def max_length(self) -> int:
        return sum(_bounds(i)[1] for i in self.items)

    def compile(self):
        """Expand into a linear NFA: (tag masks, optional flags) per element."""
        masks, optional = [], []
        for item in self.items:
            lo, hi = _bounds(item)
            base = item.item if isinstance(item, Repeat) else item
            m = _mask(base)
            masks.extend([m] * hi)
            optional.extend([False] * lo + [True] * (hi - lo))
        return np.array(masks, dtype=np.int64), np.array(optional, dtype=np.bool_)


_TOKEN_RE = re.compile(r"\s*(\(|\)|\||\*|\{[^}]*\}?|[A-Za-z]+|\S)")


def _tag(word: str, line: str) -> str:
    tag = word.upper()
    if tag not in TAG_ID:
        raise PatternError(f"unknown UPOS tag {word!r} in {line!r}; valid tags: {' '.join(UPOS_TAGS)}")
    return tag


def parse_pattern(line: str) -> Pattern:
    name, sep, body = line.partition(":")
    name = name.strip()
    if not sep or not name or re.search(r"\s", name):
        raise PatternError(f"expected 'name: ITEM ...', got {line!r}")
    toks = _TOKEN_RE.findall(body)
    items = []
    i = 0
    while i < len(toks):
        tok = toks[i]
        if tok == "(":
            if ")" not in toks[i:]:
                raise PatternError(f"unbalanced parenthesis in {line!r}")
            tags = []
            i += 1
            while True:
                if i >= len(toks):
                    raise PatternError(f"unbalanced parenthesis in {line!r}")
                t = toks[i]
                if t in ("(", "*") or t.startswith("{"):
                    raise PatternError(f"only UPOS tags may appear inside an alternation: {line!r}")
                if t == ")":
                    raise PatternError(f"empty alternative in {line!r}")
                tags.append(_tag(t, line))
                i += 1
                if i >= len(toks):
                    raise PatternError(f"unbalanced parenthesis in {line!r}")
                if toks[i] == ")":
                    break
                if toks[i] != "|":
                    raise PatternError(f"expected '|' or ')' in {line!r}")
                i += 1
            item = Alternation(frozenset(tags)) if len(set(tags)) > 1 else Literal(tags[0])
        elif tok == ")":
            raise PatternError(f"unbalanced parenthesis in {line!r}")
        elif tok == "*":
            item = Wildcard()
        elif tok.isalpha():
            item = Literal(_tag(tok, line))
        else:
            raise PatternError(f"unexpected {tok!r} in {line!r}")
        i += 1
        if i < len(toks) and toks[i].startswith("{"):
            m = re.fullmatch(r"\{\s*(\d+)\s*(?:,\s*(\d+)\s*)?\}", toks[i])
            if not m:
                raise PatternError(f"bad repeat {toks[i]!r} in {line!r}")
            lo = int(m.group(1))
            hi = int(m.group(2)) if m.group(2) is not None else lo
            if not 0 <= lo <= hi <= MAX_REPEAT:
                raise PatternError(f"repeat bounds must satisfy 0 <= min <= max <= {MAX_REPEAT}: {line!r}")
            item = Repeat(item, lo, hi)
            i += 1
        items.append(item)
    return Pattern(name, tuple(items))


def parse_pattern_file(text: str) -> list[Pattern]:
    patterns = []
    seen = set()
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            p = parse_pattern(line)
        except PatternError as exc:
            raise FormatError(str(exc), line_no) from None
        if p.name in seen:
            raise FormatError(f"duplicate pattern name {p.name!r}", line_no)
        seen.add(p.name)
        patterns.append(p)
    return patterns


def format_pattern(p: Pattern) -> str:
    def fmt(item):
        if isinstance(item, Literal):
            return item.tag
        if isinstance(item, Alternation):
            return "(" + "|".join(sorted(item.tags)) + ")"
        if isinstance(item, Wildcard):
            return "*"
        return f"{fmt(item.item)}{{{item.min},{item.max}}}"

    return f"{p.name}: " + " ".join(fmt(i) for i in p.items)


# --- matching ------------------------------------------------------------------


def tag_ids(tags: Sequence[str]) -> np.ndarray:
    return np.array([TAG_ID.get(t, UNKNOWN_TAG_ID) for t in tags], dtype=np.int64)


def select_spans(ends: Sequence[int]) -> list[tuple[int, int]]:
    """Greedy non-overlapping selection: longest first, earliest start on ties.

    ``ends[s]`` is the longest match end for start ``s`` (or -1). Spans are
    0-based and inclusive.
    """
    spans = [(s, int(e)) for s, e in enumerate(ends) if e >= 0]
    spans.sort(key=lambda se: (-(se[1] - se[0]), se[0]))
    taken = np.zeros(len(ends), dtype=bool)
    chosen = []
    for s, e in spans:
        if not taken[s : e + 1].any():
            taken[s : e + 1] = True
            chosen.append((s, e))
    chosen.sort()
    return chosen


class CompiledPatterns:
    """Patterns with their NFA tables built once for repeated matching."""

    def __init__(self, patterns: Iterable[Pattern]):
        self.patterns = list(patterns)
        self.tables = [p.compile() for p in self.patterns]

    def match(self, sentence: TaggedSentence) -> list[tuple[str, int, int]]:
        if not len(sentence):
            return []
        tags = tag_ids(sentence.pos_tags)
        found = []
        for order, (p, (masks, optional)) in enumerate(zip(self.patterns, self.tables)):
            ends = kernels.longest_match_ends(tags, masks, optional)
            for s, e in select_spans(ends):
                found.append((s, order, p.name, e))
        found.sort()
        return [(name, s + 1, e + 1) for s, _, name, e in found]


def match_patterns(patterns, sentence: TaggedSentence) -> list[tuple[str, int, int]]:
    """All matches as ``(pattern_name, start, end)`` with 1-based inclusive token indices.

    Per pattern, each start position takes its longest match; overlapping
    matches of one pattern keep the longest (earliest on ties). Matches of
    different patterns may overlap. Output is ordered by start, then by
    pattern order.
    """
    if not isinstance(patterns, CompiledPatterns):
        patterns = CompiledPatterns(patterns)
    return patterns.match(sentence)


# --- candidates ----------------------------------------------------------------


@dataclass
class MweCandidate:
    lemma_key: tuple[str, ...]
    surface: tuple[str, ...]
    pattern_name: str
    freq: int
    occurrences: list = None

    def __post_init__(self):
        self.lemma_key = tuple(self.lemma_key)
        self.surface = tuple(self.surface)
        if self.occurrences is None:
            self.occurrences = []
        if len(self.lemma_key) != len(self.surface):
            raise ValueError("lemma_key and surface lengths differ")
        if len(self.lemma_key) < 2:
            raise ValueError("a candidate spans at least 2 tokens")
        if self.freq < 1:
            raise ValueError("candidate frequency must be >= 1")
        # summary-only candidates (read from a dump without occurrences) are allowed
        if self.occurrences and len(self.occurrences) != self.freq:
            raise ValueError(f"freq {self.freq} != {len(self.occurrences)} occurrences")

    @property
    def surface_text(self) -> str:
        return " ".join(self.surface)

    @property
    def key_text(self) -> str:
        return "|".join(self.lemma_key)

    def sentence_ids(self) -> set:
        return {occ[0] for occ in self.occurrences}


def extract_candidates(patterns, corpus: Sequence[TaggedSentence], min_freq: int = 1) -> list[MweCandidate]:
    """Group pattern matches by lowercased lemma sequence.

    A span hit by several patterns counts once (first pattern names it).
    Result is sorted by frequency descending, then lemma key.
    """
    if min_freq < 1:
        raise ValueError("min_freq must be >= 1")
    compiled = patterns if isinstance(patterns, CompiledPatterns) else CompiledPatterns(patterns)
    groups: dict[tuple, list] = defaultdict(list)
    first: dict[tuple, tuple] = {}
    for sent in corpus:
        seen_spans = set()
        for name, start, end in compiled.match(sent):
            if (start, end) in seen_spans:
                continue
            seen_spans.add((start, end))
            toks = sent.tokens[start - 1 : end]
            key = tuple(t.lemma.lower() for t in toks)
            if key not in first:
                first[key] = (tuple(t.form for t in toks), name)
            groups[key].append((sent.id, start, end))
    cands = [
        MweCandidate(key, first[key][0], first[key][1], len(occ), occ)
        for key, occ in groups.items()
        if len(occ) >= min_freq
    ]
    cands.sort(key=lambda c: (-c.freq, c.lemma_key))
    return cands


def dice_score(freq_a: int, freq_b: int, cooc: int) -> float:
    if freq_a < 1 or freq_b < 1:
        raise ValueError("frequencies must be >= 1")
    if cooc < 0 or cooc > min(freq_a, freq_b):
        raise ValueError(f"co-occurrence {cooc} must lie in [0, min({freq_a}, {freq_b})]")
    return 2.0 * cooc / (freq_a + freq_b)


# --- candidate dump ------------------------------------------------------------


def _format_occurrences(occs) -> str:
    return ";".join(f"{sid}:{s}-{e}" for sid, s, e in occs)


def _parse_occurrences(text: str, line_no: int):
    occs = []
    for item in text.split(";"):
        sid, _, span = item.rpartition(":")
        s, _, e = span.partition("-")
        try:
            occs.append((sid, int(s), int(e)))
        except ValueError:
            raise FormatError(f"bad occurrence {item!r}", line_no) from None
    return occs


def write_candidates(cands: Iterable[MweCandidate], occurrences: bool = True) -> str:
    """TSV: lemma key (``|``-joined), surface, pattern name, freq[, occurrences]."""
    rows = []
    for c in cands:
        cols = [c.key_text, c.surface_text, c.pattern_name, str(c.freq)]
        if occurrences and c.occurrences:
            cols.append(_format_occurrences(c.occurrences))
        rows.append("\t".join(cols) + "\n")
    return "".join(rows)


def read_candidates(text: str) -> list[MweCandidate]:
    cands = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        cols = line.split("\t")
        if len(cols) not in (4, 5):
            raise FormatError(f"expected 4 or 5 columns, got {len(cols)}", line_no)
        try:
            freq = int(cols[3])
        except ValueError:
            raise FormatError(f"frequency {cols[3]!r} is not an integer", line_no) from None
        occs = _parse_occurrences(cols[4], line_no) if len(cols) == 5 else []
        try:
            cands.append(MweCandidate(tuple(cols[0].split("|")), tuple(cols[1].split(" ")), cols[2], freq, occs))
        except ValueError as exc:
            raise FormatError(str(exc), line_no) from None
    return cands
