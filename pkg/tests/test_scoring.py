import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from minkdecode import ValidationError, WerReport, align_and_score, corpus_wer

tokens = st.lists(st.sampled_from("abcdefg"), max_size=12)
nonempty_tokens = st.lists(st.sampled_from("abcdefg"), min_size=1, max_size=12)


def reference_levenshtein(a, b):
    """Independent two-row Levenshtein DP."""
    if len(a) < len(b):
        a, b = b, a
    prev = list(range(len(b) + 1))
    for i, x in enumerate(a, start=1):
        cur = [i]
        for j, y in enumerate(b, start=1):
            cur.append(min(prev[j] + 1, cur[-1] + 1, prev[j - 1] + (x != y)))
        prev = cur
    return prev[-1]


class TestAlignAndScore:
    def test_identity(self):
        rep = align_and_score(["a", "b", "c"], ["a", "b", "c"])
        assert (rep.substitutions, rep.deletions, rep.insertions) == (0, 0, 0)
        assert rep.wer == 0.0

    def test_single_deletion(self):
        rep = align_and_score(["a", "b", "c"], ["a", "c"])
        assert rep.deletions == 1
        assert rep.num_errors == 1
        assert rep.wer == pytest.approx(1 / 3)

    def test_single_insertion(self):
        rep = align_and_score(["a", "b"], ["x", "a", "b"])
        assert rep.insertions == 1
        assert rep.wer == 0.5

    def test_substitution_preferred_on_tie(self):
        rep = align_and_score(["a"], ["b"])
        assert (rep.substitutions, rep.deletions, rep.insertions) == (1, 0, 0)

    def test_wer_can_exceed_one(self):
        rep = align_and_score(["a"], ["x", "y", "z"])
        assert rep.num_errors == 3
        assert rep.wer == 3.0

    def test_empty_reference_rejected(self):
        with pytest.raises(ValidationError, match="non-empty"):
            align_and_score([], ["a"])

    def test_empty_hypothesis_all_deletions(self):
        rep = align_and_score(["a", "b", "c"], [])
        assert rep.deletions == 3
        assert rep.wer == 1.0

    @given(nonempty_tokens, tokens)
    @settings(max_examples=300)
    def test_counts_sum_to_levenshtein(self, ref, hyp):
        rep = align_and_score(ref, hyp)
        assert rep.num_errors == reference_levenshtein(ref, hyp)

    @given(nonempty_tokens, tokens)
    @settings(max_examples=300)
    def test_count_invariants(self, ref, hyp):
        rep = align_and_score(ref, hyp)
        assert rep.substitutions + rep.deletions <= rep.ref_length
        # alignment bookkeeping: hyp length = matches + subs + insertions
        matches = rep.ref_length - rep.substitutions - rep.deletions
        assert matches + rep.substitutions + rep.insertions == len(hyp)

    def test_random_pairs_against_oracle(self, rng):
        vocab = [f"tok{i}" for i in range(8)]
        for _ in range(200):
            ref = list(rng.choice(vocab, size=rng.integers(1, 51)))
            hyp = list(rng.choice(vocab, size=rng.integers(0, 51)))
            assert align_and_score(ref, hyp).num_errors == reference_levenshtein(ref, hyp)


class TestCorpusWer:
    def test_identical_pairs(self):
        pairs = [(["a", "b"], ["a", "b"])] * 2
        assert corpus_wer(pairs).wer == 0.0

    def test_pooling_is_not_mean_of_rates(self):
        pairs = [(["a", "b"], ["a", "x"]), (["c", "d"], ["c", "d"])]
        rep = corpus_wer(pairs)
        assert rep.wer == pytest.approx(0.25)  # (1+0)/(2+2)

    def test_empty_corpus_rejected(self):
        with pytest.raises(ValidationError):
            corpus_wer([])

    def test_additivity_against_per_pair_counts(self, rng):
        vocab = list("abcde")
        pairs = []
        for _ in range(100):
            ref = list(rng.choice(vocab, size=rng.integers(1, 20)))
            hyp = list(rng.choice(vocab, size=rng.integers(0, 20)))
            pairs.append((ref, hyp))
        pooled = corpus_wer(pairs)
        per = [align_and_score(r, h) for r, h in pairs]
        assert pooled.substitutions == sum(p.substitutions for p in per)
        assert pooled.deletions == sum(p.deletions for p in per)
        assert pooled.insertions == sum(p.insertions for p in per)
        assert pooled.ref_length == sum(p.ref_length for p in per)

    def test_relative_reduction_arithmetic(self):
        # reporting convention: (baseline - new) / baseline
        baseline, improved = 5.04, 4.78
        assert (baseline - improved) / baseline == pytest.approx(0.0516, abs=1e-4)


class TestWerReport:
    def test_validation(self):
        with pytest.raises(ValidationError):
            WerReport(0, 0, 0, 0)
        with pytest.raises(ValidationError):
            WerReport(2, 2, 0, 3)  # S + D > ref
        with pytest.raises(ValidationError):
            WerReport(-1, 0, 0, 3)
