"""Readers and writers for the external data formats.

CoNLL-U tagged corpora, line-aligned parallel text, the bilingual MWE
lexicon TSV and attention dumps in JSON Lines.
"""

from __future__ import annotations

import json
import unicodedata
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

ROW_SUM_TOL = 1e-4


class FormatError(ValueError):
    """Malformed input; ``line`` is 1-based when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class AttentionValidationError(ValueError):
    pass


class AttentionDimensionError(AttentionValidationError):
    pass


def nfc(text: str) -> str:
    return unicodedata.normalize("NFC", text)


@dataclass(frozen=True)
class Token:
    form: str
    lemma: str
    pos: str
    index: int

    def __post_init__(self):
        if not self.form or not self.pos:
            raise ValueError(f"token {self.index}: form and pos must be non-empty")
        if self.index < 1:
            raise ValueError(f"token index must be >= 1, got {self.index}")


@dataclass(frozen=True)
class TaggedSentence:
    id: str
    tokens: tuple[Token, ...]

    def __post_init__(self):
        for expected, tok in enumerate(self.tokens, start=1):
            if tok.index != expected:
                raise ValueError(
                    f"sentence {self.id}: token indices must be 1..{len(self.tokens)} contiguous"
                )

    def __len__(self):
        return len(self.tokens)

    @property
    def pos_tags(self) -> list[str]:
        return [t.pos for t in self.tokens]

    @property
    def lemmas(self) -> list[str]:
        return [t.lemma for t in self.tokens]


@dataclass(frozen=True)
class ParallelCorpus:
    source: tuple[str, ...] = ()
    target: tuple[str, ...] = ()

    def __post_init__(self):
        if len(self.source) != len(self.target):
            raise ValueError(
                f"parallel corpus sides differ: {len(self.source)} source vs {len(self.target)} target lines"
            )

    def __len__(self):
        return len(self.source)

    def pairs(self):
        return zip(self.source, self.target)

    def select(self, indices: Iterable[int]) -> "ParallelCorpus":
        idx = list(indices)
        return ParallelCorpus(tuple(self.source[i] for i in idx), tuple(self.target[i] for i in idx))


@dataclass(frozen=True, eq=False)
class AttentionRecord:
    """One sentence of attention: ``matrix[t, s]`` is P(source unit s | target unit t)."""

    id: str
    src_units: tuple[str, ...]
    trg_units: tuple[str, ...]
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        validate_attention(self.id, self.src_units, self.trg_units, self.matrix)

    def __eq__(self, other):
        if not isinstance(other, AttentionRecord):
            return NotImplemented
        return (
            self.id == other.id
            and self.src_units == other.src_units
            and self.trg_units == other.trg_units
            and np.array_equal(self.matrix, other.matrix)
        )


def validate_attention(rec_id, src_units, trg_units, matrix, tol=ROW_SUM_TOL):
    m = np.asarray(matrix)
    if m.ndim != 2 or m.shape != (len(trg_units), len(src_units)):
        raise AttentionDimensionError(
            f"record {rec_id}: matrix shape {m.shape} does not match "
            f"{len(trg_units)} target x {len(src_units)} source units"
        )
    if not np.all(np.isfinite(m)) or np.any(m < 0.0) or np.any(m > 1.0):
        raise AttentionValidationError(f"record {rec_id}: probabilities must lie in [0, 1]")
    if m.shape[1]:
        dev = np.abs(m.sum(axis=1) - 1.0)
        bad = np.flatnonzero(dev > tol)
        if bad.size:
            row = int(bad[0])
            raise AttentionValidationError(
                f"record {rec_id}: row {row} sums to {m[row].sum():.6f}, not 1 within {tol:g}"
            )


# --- CoNLL-U -------------------------------------------------------------------


def parse_conllu(text: str) -> list[TaggedSentence]:
    """Parse CoNLL-U text, keeping ID/FORM/LEMMA/UPOS.

    Multiword-token ranges (``1-2``) and empty nodes (``1.1``) are skipped.
    A ``# sent_id = X`` comment names the sentence; otherwise the id is the
    1-based block ordinal. A lemma of ``_`` falls back to the form.
    """
    sentences = []
    block_no = 0
    sent_id = None
    tokens: list[Token] = []
    in_block = False

    def flush():
        nonlocal sent_id, tokens, in_block
        if in_block:
            sid = sent_id if sent_id is not None else str(block_no)
            try:
                sentences.append(TaggedSentence(sid, tuple(tokens)))
            except ValueError as exc:
                raise FormatError(str(exc), start_line) from None
        sent_id, tokens, in_block = None, [], False

    start_line = 0
    for line_no, raw in enumerate(text.split("\n"), start=1):
        line = raw.rstrip("\r")
        if not line.strip():
            flush()
            continue
        if not in_block:
            in_block = True
            block_no += 1
            start_line = line_no
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("sent_id"):
                key, _, value = body.partition("=")
                if key.strip() == "sent_id" and value.strip():
                    sent_id = value.strip()
            continue
        cols = line.split("\t")
        if len(cols) < 4:
            raise FormatError(f"expected at least 4 tab-separated columns, got {len(cols)}", line_no)
        tok_id = cols[0]
        if "-" in tok_id or "." in tok_id:
            continue
        try:
            index = int(tok_id)
        except ValueError:
            raise FormatError(f"token id {tok_id!r} is not an integer", line_no) from None
        form = nfc(cols[1])
        lemma = nfc(cols[2])
        if lemma == "_":
            lemma = form
        try:
            tokens.append(Token(form, lemma, cols[3].strip().upper(), index))
        except ValueError as exc:
            raise FormatError(str(exc), line_no) from None
    flush()
    return sentences


def write_conllu(sentences: Sequence[TaggedSentence]) -> str:
    out = []
    for sent in sentences:
        out.append(f"# sent_id = {sent.id}")
        for t in sent.tokens:
            out.append("\t".join([str(t.index), t.form, t.lemma, t.pos] + ["_"] * 6))
        out.append("")
    return "\n".join(out) + ("\n" if out else "")


# --- parallel text -------------------------------------------------------------


def _lines(text: str) -> list[str]:
    if not text:
        return []
    lines = text.split("\n")
    if lines[-1] == "":
        lines.pop()
    return [nfc(line.rstrip("\r")) for line in lines]


def read_parallel(src_text: str, trg_text: str) -> ParallelCorpus:
    src = _lines(src_text)
    trg = _lines(trg_text)
    if len(src) != len(trg):
        raise FormatError(f"line count mismatch: source has {len(src)}, target has {len(trg)}")
    return ParallelCorpus(tuple(src), tuple(trg))


def write_lines(lines: Iterable[str]) -> str:
    return "".join(f"{line}\n" for line in lines)


# --- MWE lexicon ---------------------------------------------------------------

LEXICON_COLUMNS = ("src_surface", "trg_surface", "score", "src_freq", "trg_freq", "cooc_freq")


@dataclass(frozen=True)
class LexiconEntry:
    """One row of the bilingual MWE lexicon."""

    src_surface: str
    trg_surface: str
    score: float
    src_freq: int
    trg_freq: int
    cooc: int


def _as_entry(pair) -> LexiconEntry:
    if isinstance(pair, LexiconEntry):
        return pair
    return pair.to_entry()


def write_mwe_lexicon(pairs) -> str:
    """Serialise MwePair or LexiconEntry objects; scores carry 6 decimals."""
    rows = []
    for pair in pairs:
        e = _as_entry(pair)
        for text in (e.src_surface, e.trg_surface):
            if "\t" in text or "\n" in text:
                raise ValueError(f"surface {text!r} contains a tab or newline")
        rows.append(
            f"{e.src_surface}\t{e.trg_surface}\t{e.score:.6f}\t{e.src_freq}\t{e.trg_freq}\t{e.cooc}\n"
        )
    return "".join(rows)


def read_mwe_lexicon(text: str) -> list[LexiconEntry]:
    entries = []
    for line_no, line in enumerate(_lines(text), start=1):
        if not line.strip():
            continue
        cols = line.split("\t")
        if len(cols) != len(LEXICON_COLUMNS):
            raise FormatError(f"expected {len(LEXICON_COLUMNS)} columns, got {len(cols)}", line_no)
        try:
            entries.append(
                LexiconEntry(cols[0], cols[1], float(cols[2]), int(cols[3]), int(cols[4]), int(cols[5]))
            )
        except ValueError as exc:
            raise FormatError(str(exc), line_no) from None
    return entries


# --- attention dumps -----------------------------------------------------------


def parse_attention_record(obj: dict) -> AttentionRecord:
    missing = {"id", "src", "trg", "attn"} - obj.keys()
    if missing:
        raise AttentionValidationError(f"record missing keys: {sorted(missing)}")
    rec_id = str(obj["id"])
    src = tuple(nfc(u) for u in obj["src"])
    trg = tuple(nfc(u) for u in obj["trg"])
    rows = obj["attn"]
    if not isinstance(rows, list) or any(not isinstance(r, list) for r in rows):
        raise AttentionDimensionError(f"record {rec_id}: attn must be a list of rows")
    widths = {len(r) for r in rows}
    if len(widths) > 1:
        raise AttentionDimensionError(f"record {rec_id}: ragged attention matrix, row widths {sorted(widths)}")
    matrix = np.array(rows, dtype=np.float64).reshape(len(rows), widths.pop() if widths else len(src))
    return AttentionRecord(rec_id, src, trg, matrix)


def read_attention_jsonl(text: str) -> list[AttentionRecord]:
    records = []
    for line_no, line in enumerate(text.split("\n"), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise FormatError(f"invalid JSON: {exc.msg}", line_no) from None
        records.append(parse_attention_record(obj))
    return records


def write_attention_jsonl(records: Iterable[AttentionRecord]) -> str:
    out = []
    for r in records:
        obj = {"id": r.id, "src": list(r.src_units), "trg": list(r.trg_units), "attn": r.matrix.tolist()}
        out.append(json.dumps(obj, ensure_ascii=False))
    return "".join(line + "\n" for line in out)
