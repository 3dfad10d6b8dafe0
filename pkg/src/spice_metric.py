"""
SPICE-style similarity between two premise sets.

Tuples match on exact canonical form (no synonym expansion); each reference
tuple can be consumed by at most one generated tuple, so matching reduces to
clipped multiset counts.
"""

from collections import Counter
from dataclasses import dataclass
from typing import Iterable

from .schemas import Premise


@dataclass(frozen=True)
class TupleMatch:
    """Counts from matching generated tuples against reference tuples."""

    matched: int
    gen_total: int
    ref_total: int

    @property
    def precision(self) -> float:
        return self.matched / self.gen_total if self.gen_total else 0.0

    @property
    def recall(self) -> float:
        return self.matched / self.ref_total if self.ref_total else 0.0


def match_tuples(gen: Iterable[Premise], ref: Iterable[Premise]) -> TupleMatch:
    """Greedy exact matching; equivalent to clipped counts over canonical forms."""
    gen_counts = Counter(premise.canonical() for premise in gen)
    ref_counts = Counter(premise.canonical() for premise in ref)
    matched = sum(min(count, ref_counts[key]) for key, count in gen_counts.items())
    return TupleMatch(
        matched=matched,
        gen_total=sum(gen_counts.values()),
        ref_total=sum(ref_counts.values()),
    )


def spice_f1(gen: Iterable[Premise], ref: Iterable[Premise]) -> float:
    """Harmonic mean of tuple precision and recall.

    Both sets empty scores 1.0, exactly one empty scores 0.0.
    """
    match = match_tuples(gen, ref)
    if match.gen_total == 0 and match.ref_total == 0:
        return 1.0
    if match.matched == 0:
        return 0.0
    precision, recall = match.precision, match.recall
    return 2 * precision * recall / (precision + recall)
