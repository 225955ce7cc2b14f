"""Word-error-rate scoring by Levenshtein alignment.

WER = (substitutions + deletions + insertions) / reference length, with the
counts decomposed from one minimum-edit-distance alignment. Corpus WER
pools the counts over utterance pairs (it is not the mean of per-utterance
rates).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import ValidationError

__all__ = ["WerReport", "align_and_score", "corpus_wer"]


@dataclass(frozen=True)
class WerReport:
    substitutions: int
    deletions: int
    insertions: int
    ref_length: int

    def __post_init__(self):
        if self.ref_length < 1:
            raise ValidationError("reference length must be >= 1")
        if min(self.substitutions, self.deletions, self.insertions) < 0:
            raise ValidationError("error counts must be nonnegative")
        if self.substitutions + self.deletions > self.ref_length:
            raise ValidationError("S + D cannot exceed the reference length")

    @property
    def num_errors(self) -> int:
        return self.substitutions + self.deletions + self.insertions

    @property
    def wer(self) -> float:
        return self.num_errors / self.ref_length


def align_and_score(reference: Sequence[str], hypothesis: Sequence[str]) -> WerReport:
    """Align hypothesis to reference with unit costs and count S/D/I.

    When several moves cost the same, the backtrace prefers substitution
    over insertion over deletion, fixing one reproducible decomposition.
    """
    ref = list(reference)
    hyp = list(hypothesis)
    if not ref:
        raise ValidationError("reference must be non-empty")
    R, H = len(ref), len(hyp)
    dist = [[0] * (H + 1) for _ in range(R + 1)]
    for i in range(1, R + 1):
        dist[i][0] = i
    for j in range(1, H + 1):
        dist[0][j] = j
    for i in range(1, R + 1):
        ri = ref[i - 1]
        row = dist[i]
        prev = dist[i - 1]
        for j in range(1, H + 1):
            sub = prev[j - 1] + (ri != hyp[j - 1])
            ins = row[j - 1] + 1
            dele = prev[j] + 1
            row[j] = min(sub, ins, dele)
    subs = dels = ins = 0
    i, j = R, H
    while i > 0 or j > 0:
        cur = dist[i][j]
        if i > 0 and j > 0 and cur == dist[i - 1][j - 1] + (ref[i - 1] != hyp[j - 1]):
            if ref[i - 1] != hyp[j - 1]:
                subs += 1
            i, j = i - 1, j - 1
        elif j > 0 and cur == dist[i][j - 1] + 1:
            ins += 1
            j -= 1
        else:
            dels += 1
            i -= 1
    return WerReport(subs, dels, ins, R)


def corpus_wer(pairs: Iterable[tuple[Sequence[str], Sequence[str]]]) -> WerReport:
    """Pool S/D/I counts over (reference, hypothesis) pairs."""
    subs = dels = ins = ref_len = 0
    count = 0
    for reference, hypothesis in pairs:
        rep = align_and_score(reference, hypothesis)
        subs += rep.substitutions
        dels += rep.deletions
        ins += rep.insertions
        ref_len += rep.ref_length
        count += 1
    if count == 0:
        raise ValidationError("corpus must contain at least one pair")
    return WerReport(subs, dels, ins, ref_len)
