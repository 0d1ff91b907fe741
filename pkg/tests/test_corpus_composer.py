from collections import Counter
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from mwekit.corpus_composer import (
    Baseline,
    LayoutSpec,
    MweBlock,
    chunk_sizes,
    compose,
    compose_plan,
    composed_size,
    default_layout,
    format_layout,
    parse_layout,
    seeded_shuffle,
)
from mwekit.corpus_io import FormatError, ParallelCorpus

# SplitMix64(42) + Fisher-Yates, traced with plain Python ints (tests/oracles.py)
GOLDEN_N5_SEED42 = [1, 2, 0, 4, 3]


def corpus(n, tag):
    return ParallelCorpus(tuple(f"{tag}-src-{i}" for i in range(n)), tuple(f"{tag}-trg-{i}" for i in range(n)))


class TestShuffle:
    def test_degenerate(self):
        assert seeded_shuffle(0, 7).tolist() == []
        assert seeded_shuffle(1, 7).tolist() == [0]

    def test_golden(self):
        assert oracles.fisher_yates(5, 42) == GOLDEN_N5_SEED42
        assert seeded_shuffle(5, 42).tolist() == GOLDEN_N5_SEED42

    @given(st.integers(0, 300), st.integers(0, 2**64 - 1))
    def test_bijection_and_deterministic(self, n, seed):
        p = seeded_shuffle(n, seed)
        assert sorted(p.tolist()) == list(range(n))
        assert np.array_equal(p, seeded_shuffle(n, seed))

    def test_negative(self):
        with pytest.raises(ValueError):
            seeded_shuffle(-1, 0)


class TestLayout:
    def test_default(self):
        for mode in ("phrases", "sentences"):
            lay = default_layout(mode)
            assert lay.total_copies == 5
            assert sum(s.fraction for s in lay.segments if isinstance(s, Baseline)) == 1
            assert [s.copies for s in lay.segments if isinstance(s, MweBlock)] == [1, 2, 1, 1]
        assert default_layout("phrases").global_shuffle is True
        assert default_layout("sentences").global_shuffle is False
        assert default_layout("phrases").segments == default_layout("sentences").segments

    def test_refuses_unshuffled_phrases(self):
        with pytest.raises(ValueError, match="global shuffle"):
            LayoutSpec("phrases", default_layout("phrases").segments, global_shuffle=False)

    def test_fraction_sum(self):
        with pytest.raises(ValueError):
            LayoutSpec("sentences", (Baseline(0.5), MweBlock(1), Baseline(0.4)))
        LayoutSpec("sentences", (Baseline(0.1), Baseline(0.2), Baseline(0.7), MweBlock(1)))

    def test_needs_copies(self):
        with pytest.raises(ValueError):
            LayoutSpec("sentences", (Baseline(1),))
        with pytest.raises(ValueError):
            MweBlock(0)

    def test_file_round_trip(self):
        lay = default_layout("sentences", seed=9)
        text = format_layout(lay)
        assert text.splitlines()[:2] == ["base 1/4", "mwe 1"]
        assert parse_layout(text, "sentences", 9) == lay
        assert parse_layout("base 0.25\nmwe 1\nbase 0.25\nmwe 2\nbase 0.25\nmwe 1\nbase 0.25\nmwe 1\n",
                            "sentences", 9) == lay

    def test_file_errors(self):
        with pytest.raises(FormatError, match="line 2"):
            parse_layout("base 1\nblock 2\n", "sentences")

    def test_chunk_remainder(self):
        lay = LayoutSpec("sentences", (Baseline(Fraction(1, 3)), MweBlock(1), Baseline(Fraction(1, 3)),
                                       MweBlock(1), Baseline(Fraction(1, 3))))
        assert chunk_sizes(10, lay) == [3, 3, 4]


class TestSizes:
    def test_paper_scale_en_cs(self):
        lay = default_layout("sentences", baseline_limit=15_000_000)
        assert composed_size(49_000_000, 400_000, lay) == 17_000_000

    def test_paper_scale_en_lv(self):
        assert composed_size(4_500_000, 60_000, default_layout("phrases")) == 4_800_000

    def test_limit_too_large(self):
        with pytest.raises(ValueError):
            composed_size(10, 1, default_layout("sentences", baseline_limit=11))


def expected_multiset(base, mwe, limit, copies):
    b = base.select(range(limit if limit is not None else len(base)))
    return Counter(b.pairs()) + Counter({k: v * copies for k, v in Counter(mwe.pairs()).items()})


class TestCompose:
    @pytest.mark.parametrize("mode", ["phrases", "sentences"])
    def test_toy_conservation(self, mode):
        base, mwe = corpus(1000, "b"), corpus(40, "m")
        out = compose(base, mwe, default_layout(mode, seed=3))
        assert len(out) == 1200
        assert Counter(out.pairs()) == expected_multiset(base, mwe, None, 5)

    def test_pairs_never_split(self):
        base, mwe = corpus(50, "b"), corpus(7, "m")
        for mode in ("phrases", "sentences"):
            out = compose(base, mwe, default_layout(mode, seed=5))
            for s, t in out.pairs():
                assert s.replace("src", "trg") == t

    def test_sentences_baseline_order(self):
        base, mwe = corpus(101, "b"), corpus(6, "m")
        lay = default_layout("sentences", seed=11)
        out = compose(base, mwe, lay)
        from_base = [s for s in out.source if s.startswith("b-")]
        assert from_base == [base.source[i] for i in seeded_shuffle(101, 11)]

    def test_sentences_block_structure(self):
        base, mwe = corpus(100, "b"), corpus(4, "m")
        lay = default_layout("sentences", seed=2)
        plan = compose_plan(100, 4, lay)
        kinds = "".join("b" if i < 100 else "m" for i in plan)
        assert kinds == "b" * 25 + "m" * 4 + "b" * 25 + "m" * 8 + "b" * 25 + "m" * 4 + "b" * 25 + "m" * 4
        # each block copy is reshuffled on seed + copy ordinal
        first_copy = (plan[25:29] - 100).tolist()
        assert first_copy == seeded_shuffle(4, 3).tolist()
        second_copy = (plan[54:58] - 100).tolist()
        assert second_copy == seeded_shuffle(4, 4).tolist()

    def test_baseline_limit_is_prefix(self):
        base, mwe = corpus(30, "b"), corpus(3, "m")
        out = compose(base, mwe, default_layout("sentences", seed=1, baseline_limit=10))
        assert len(out) == 25
        assert {s for s in out.source if s.startswith("b-")} == set(base.source[:10])

    def test_phrases_is_global_shuffle(self):
        plan = compose_plan(20, 2, default_layout("phrases", seed=8))
        unshuffled = np.concatenate([np.arange(20)] + [np.arange(20, 22)] * 5)
        assert plan.tolist() == unshuffled[seeded_shuffle(30, 8)].tolist()

    def test_empty_mwe_units(self):
        with pytest.raises(ValueError, match="no MWE units"):
            compose(corpus(5, "b"), corpus(0, "m"), default_layout("sentences"))

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 60), st.integers(1, 8), st.integers(0, 2**64 - 1), st.sampled_from(["phrases", "sentences"]))
    def test_conservation_property(self, nb, nm, seed, mode):
        base, mwe = corpus(nb, "b"), corpus(nm, "m")
        out = compose(base, mwe, default_layout(mode, seed=seed))
        assert Counter(out.pairs()) == expected_multiset(base, mwe, None, 5)
        assert out == compose(base, mwe, default_layout(mode, seed=seed))
