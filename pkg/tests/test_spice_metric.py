"""Tests for the spice_metric module."""

import pytest

from src.schemas import Premise
from src.spice_metric import match_tuples, spice_f1


def P(*parts):
    return Premise.of(*parts)


class TestSpiceF1:
    """Tests for tuple F1."""

    def test_identical_sets(self):
        premises = [P("man"), P("racket"), P("man", "holding", "racket")]
        assert spice_f1(premises, premises) == 1.0

    def test_both_empty(self):
        assert spice_f1([], []) == 1.0

    def test_one_empty(self):
        assert spice_f1([P("dog")], []) == 0.0
        assert spice_f1([], [P("dog")]) == 0.0

    def test_partial_overlap(self):
        gen = [P("dog"), P("dog", "red")]
        ref = [P("dog"), P("cat"), P("dog", "big"), P("dog", "red")]
        # precision 2/2, recall 2/4
        assert spice_f1(gen, ref) == pytest.approx(2 / 3)

    def test_symmetric(self):
        a = [P("dog"), P("car")]
        b = [P("dog"), P("tree"), P("sky")]
        assert spice_f1(a, b) == pytest.approx(spice_f1(b, a))

    def test_no_synonym_matching(self):
        assert spice_f1([P("puppy")], [P("dog")]) == 0.0


class TestMatchTuples:
    """Tests for clipped tuple matching."""

    def test_reference_consumed_once(self):
        match = match_tuples([P("dog"), P("dog")], [P("dog")])
        assert match.matched == 1
        assert match.precision == 0.5
        assert match.recall == 1.0

    def test_empty_totals(self):
        match = match_tuples([], [])
        assert match.precision == 0.0
        assert match.recall == 0.0
