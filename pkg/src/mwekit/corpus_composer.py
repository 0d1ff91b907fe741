"""Synthetic training-corpus composition.

Two layouts:

* ``sentences``: the baseline is shuffled once, cut into consecutive chunks
  and interleaved with blocks of MWE-bearing sentence pairs. Each block copy
  is shuffled on its own derived seed.
* ``phrases``: the same segments are concatenated and the whole result is
  shuffled. Unshuffled blocks of short phrase pairs are refused.

All shuffles permute pair indices; source and target never move apart.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import kernels
from .corpus_io import FormatError, ParallelCorpus

MODES = ("phrases", "sentences")
UINT64_MASK = (1 << 64) - 1


@dataclass(frozen=True)
class Baseline:
    fraction: Fraction

    def __post_init__(self):
        value = self.fraction
        # floats go through their repr so 0.1 means 1/10, not the binary approximation
        frac = Fraction(repr(value)) if isinstance(value, float) else Fraction(value)
        object.__setattr__(self, "fraction", frac)
        if not 0 <= self.fraction <= 1:
            raise ValueError(f"baseline fraction {self.fraction} outside [0, 1]")


@dataclass(frozen=True)
class MweBlock:
    copies: int

    def __post_init__(self):
        if self.copies < 1:
            raise ValueError("an MWE block holds at least one copy")


@dataclass(frozen=True)
class LayoutSpec:
    mode: str
    segments: tuple = ()
    seed: int = 1
    baseline_limit: int | None = None
    global_shuffle: bool | None = field(default=None)

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        object.__setattr__(self, "segments", tuple(self.segments))
        if not 0 <= self.seed <= UINT64_MASK:
            raise ValueError("seed must be an unsigned 64-bit integer")
        if self.baseline_limit is not None and self.baseline_limit < 0:
            raise ValueError("baseline_limit must be non-negative")
        expected = self.mode == "phrases"
        if self.global_shuffle is None:
            object.__setattr__(self, "global_shuffle", expected)
        elif self.global_shuffle != expected:
            if self.mode == "phrases":
                raise ValueError("phrases mode requires a global shuffle; unshuffled phrase layouts are refused")
            raise ValueError("sentences mode shuffles only the baseline; global shuffle is not available")
        fractions = [s.fraction for s in self.segments if isinstance(s, Baseline)]
        if not fractions or sum(fractions) != 1:
            raise ValueError(f"baseline fractions must sum to 1, got {sum(fractions)}")
        if self.total_copies < 1:
            raise ValueError("layout needs at least one MWE copy")

    @property
    def total_copies(self) -> int:
        return sum(s.copies for s in self.segments if isinstance(s, MweBlock))

    def replace(self, **changes) -> "LayoutSpec":
        values = dict(mode=self.mode, segments=self.segments, seed=self.seed,
                      baseline_limit=self.baseline_limit)
        values.update(changes)
        return LayoutSpec(**values)


def default_layout(mode: str, seed: int = 1, baseline_limit: int | None = None) -> LayoutSpec:
    """Four baseline quarters interleaved with 1x, 2x, 1x, 1x MWE blocks (five copies)."""
    q = Fraction(1, 4)
    segments = (Baseline(q), MweBlock(1), Baseline(q), MweBlock(2), Baseline(q), MweBlock(1), Baseline(q), MweBlock(1))
    return LayoutSpec(mode, segments, seed, baseline_limit)


def parse_layout(text: str, mode: str, seed: int = 1, baseline_limit: int | None = None) -> LayoutSpec:
    """Read ``base 0.25`` / ``mwe 2`` lines (``#`` comments allowed)."""
    segments = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2 or parts[0] not in ("base", "mwe"):
            raise FormatError(f"expected 'base FRACTION' or 'mwe COPIES', got {line!r}", line_no)
        try:
            if parts[0] == "base":
                segments.append(Baseline(Fraction(parts[1])))
            else:
                segments.append(MweBlock(int(parts[1])))
        except ValueError as exc:
            raise FormatError(str(exc), line_no) from None
    return LayoutSpec(mode, tuple(segments), seed, baseline_limit)


def format_layout(layout: LayoutSpec) -> str:
    lines = []
    for seg in layout.segments:
        if isinstance(seg, Baseline):
            lines.append(f"base {seg.fraction}")
        else:
            lines.append(f"mwe {seg.copies}")
    return "\n".join(lines) + "\n"


def seeded_shuffle(n: int, seed: int) -> np.ndarray:
    """Deterministic permutation of ``0..n-1`` (SplitMix64-driven Fisher-Yates)."""
    if n < 0:
        raise ValueError("n must be non-negative")
    return kernels.fisher_yates(n, seed & UINT64_MASK)


def chunk_sizes(n: int, layout: LayoutSpec) -> list[int]:
    """Baseline chunk lengths; the last baseline segment absorbs rounding."""
    fracs = [s.fraction for s in layout.segments if isinstance(s, Baseline)]
    sizes = [int(f * n) for f in fracs[:-1]]
    sizes.append(n - sum(sizes))
    return sizes


def composed_size(baseline_count: int, mwe_count: int, layout: LayoutSpec) -> int:
    """Number of output pairs, without materialising anything."""
    used = baseline_count if layout.baseline_limit is None else layout.baseline_limit
    if used > baseline_count:
        raise ValueError(f"baseline_limit {used} exceeds baseline size {baseline_count}")
    return used + layout.total_copies * mwe_count


def compose_plan(baseline_count: int, mwe_count: int, layout: LayoutSpec) -> np.ndarray:
    """Index plan for the composed corpus.

    Values ``< baseline_count`` index the baseline; values ``>= baseline_count``
    index ``mwe_units`` at ``value - baseline_count``.
    """
    if layout.total_copies and mwe_count == 0:
        raise ValueError("layout has MWE blocks but no MWE units were given")
    used = baseline_count if layout.baseline_limit is None else layout.baseline_limit
    composed_size(baseline_count, mwe_count, layout)
    seed = layout.seed
    mwe_idx = np.arange(baseline_count, baseline_count + mwe_count, dtype=np.int64)

    if layout.global_shuffle:
        parts = []
        for seg in layout.segments:
            if isinstance(seg, MweBlock):
                parts.extend([mwe_idx] * seg.copies)
        plan = np.concatenate([np.arange(used, dtype=np.int64)] + parts)
        return plan[seeded_shuffle(len(plan), seed)]

    base = seeded_shuffle(used, seed)
    sizes = iter(chunk_sizes(used, layout))
    parts = []
    pos = 0
    ordinal = 0
    for seg in layout.segments:
        if isinstance(seg, Baseline):
            size = next(sizes)
            parts.append(base[pos : pos + size])
            pos += size
        else:
            for _ in range(seg.copies):
                ordinal += 1
                parts.append(mwe_idx[seeded_shuffle(mwe_count, (seed + ordinal) & UINT64_MASK)])
    return np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)


def compose(baseline: ParallelCorpus, mwe_units: ParallelCorpus, layout: LayoutSpec) -> ParallelCorpus:
    plan = compose_plan(len(baseline), len(mwe_units), layout)
    src = baseline.source + mwe_units.source
    trg = baseline.target + mwe_units.target
    return ParallelCorpus(tuple(src[i] for i in plan.tolist()), tuple(trg[i] for i in plan.tolist()))


def phrase_units(pairs: Sequence) -> ParallelCorpus:
    """Each aligned MWE pair as its own sentence pair."""
    return ParallelCorpus(tuple(p.src_surface for p in pairs), tuple(p.trg_surface for p in pairs))
