"""Tests for the premise_extraction module."""

import pytest

from src.errors import EmptyQuestionError, PremiseArityError
from src.premise_extraction import (
    classify_question,
    extract_premises,
    filter_premises,
    is_existence_query,
    parse_premise,
    parse_scene_graph,
    question_words,
    tokenize_and_tag,
)
from src.schemas import Premise, Question, QuestionClass, TokenTag


def P(*parts):
    return Premise.of(*parts)


class TestTokenizeAndTag:
    """Tests for tokenization and tagging."""

    def test_possessive_split(self, resources):
        tokens = tokenize_and_tag("What color is the cat's tie?", resources.lexicon)
        assert [t.lemma for t in tokens] == ["what", "color", "is", "the", "cat", "'s", "tie"]
        assert tokens[5].tag == TokenTag.POSS

    def test_contracted_copula_after_wh(self, resources):
        tokens = tokenize_and_tag("What's on the table?", resources.lexicon)
        assert tokens[1].lemma == "is"
        assert tokens[1].tag == TokenTag.VERB

    def test_negation_expanded(self, resources):
        tokens = tokenize_and_tag("Isn't the dog big?", resources.lexicon)
        assert [t.lemma for t in tokens[:2]] == ["is", "not"]

    @pytest.mark.parametrize("text", ["", "   ", "?!"])
    def test_empty(self, resources, text):
        with pytest.raises(EmptyQuestionError):
            tokenize_and_tag(text, resources.lexicon)

    def test_question_words(self):
        assert question_words("Where is the RED car?") == ["where", "is", "the", "red", "car"]

    def test_non_ascii_words_kept_whole(self, resources):
        assert question_words("Where is the café?") == ["where", "is", "the", "café"]
        tokens = tokenize_and_tag("Where is the café?", resources.lexicon)
        assert tokens[-1].surface == "café"
        assert tokens[-1].lemma == "café"


class TestClassifyQuestion:
    """Tests for question classification."""

    @pytest.mark.parametrize(
        "text,expected",
        [
            ("How many giraffes are in the image?", QuestionClass.COUNTING),
            ("How much water is there?", QuestionClass.COUNTING),
            ("Is the dog big?", QuestionClass.EXISTENTIAL),
            ("Does the man have a hat?", QuestionClass.EXISTENTIAL),
            ("What is the man holding?", QuestionClass.OTHER),
            ("Why is the big red dog old?", QuestionClass.OTHER),
        ],
    )
    def test_classes(self, resources, text, expected):
        assert classify_question(tokenize_and_tag(text, resources.lexicon)) == expected

    def test_existence_queries(self, resources):
        def tags(text):
            return tokenize_and_tag(text, resources.lexicon)

        assert is_existence_query(tags("Is there a kite?"))
        assert is_existence_query(tags("Can you see a dog?"))
        assert not is_existence_query(tags("Is the dog big?"))


class TestExtractPremises:
    """Tests for end-to-end premise extraction."""

    @pytest.mark.parametrize(
        "text,expected",
        [
            (
                "What brand of racket is the man holding?",
                [P("man"), P("racket"), P("man", "holding", "racket")],
            ),
            (
                "What kind of building is the large white building?",
                [P("building"), P("building", "large"), P("building", "white")],
            ),
            ("What color is the cat's tie?", [P("cat"), P("tie"), P("cat", "has", "tie")]),
            (
                "Why is the big red dog old?",
                [P("dog"), P("dog", "big"), P("dog", "red"), P("dog", "old")],
            ),
            ("Where is the red car?", [P("car"), P("car", "red")]),
            ("What color is the car?", [P("car")]),
            ("Where is the kite?", [P("kite")]),
            ("Where is the fluffy dog?", [P("dog"), P("dog", "fluffy")]),
            ("Where is the colorful kite?", [P("kite"), P("kite", "colorful")]),
            (
                "What color is the shirt of the man riding the horse?",
                [P("shirt"), P("man"), P("horse"), P("man", "riding", "horse")],
            ),
            (
                "What color is the hat of the boy sitting on the bench?",
                [P("hat"), P("boy"), P("bench"), P("boy", "sitting on", "bench")],
            ),
            (
                "What is the little girl's shirt color?",
                [P("girl"), P("shirt"), P("girl", "little"), P("girl", "has", "shirt")],
            ),
        ],
    )
    def test_strict(self, resources, text, expected):
        assert extract_premises(text, resources=resources) == expected

    def test_accepts_question_model(self, resources):
        question = Question(question_id=1, image_id=1, text="Where is the bird?")
        assert extract_premises(question, resources=resources) == [P("bird")]

    @pytest.mark.parametrize(
        "text", ["How many giraffes are in the image?", "Is there a kite?", "Is the dog big?"]
    )
    def test_strict_skips_existential_and_counting(self, resources, text):
        assert extract_premises(text, strict=True, resources=resources) == []

    def test_non_strict_keeps_existence_objects(self, resources):
        assert extract_premises("Is there a kite?", strict=False, resources=resources) == [
            P("kite")
        ]

    def test_non_strict_drops_polar_predicate(self, resources):
        premises = extract_premises(
            "Is the man holding a racket?", strict=False, resources=resources
        )
        assert premises == [P("man"), P("racket")]

    def test_stoplist_drops_image_words(self, resources):
        premises = extract_premises("What color is the dog in the photo?", resources=resources)
        assert premises == [P("dog")]

    def test_first_order_before_higher_orders(self, resources):
        premises = extract_premises("What brand of racket is the man holding?", resources=resources)
        orders = [int(p.order) for p in premises]
        assert orders == sorted(orders)


class TestExtractionProperties:
    """Properties that hold for every extracted premise."""

    QUESTIONS = [
        "What brand of racket is the man holding?",
        "What color is the cat's tie?",
        "Why is the big red dog old?",
        "What color is the hat of the boy sitting on the bench?",
        "What is the woman holding in her hand?",
        "Where is the parked car?",
        "How many giraffes are in the image?",
        "Is the man holding a racket?",
        "What is the little girl's shirt color?",
    ]

    @pytest.mark.parametrize("text", QUESTIONS)
    @pytest.mark.parametrize("strict", [True, False])
    def test_premise_words_come_from_question(self, resources, text, strict):
        tokens = tokenize_and_tag(text, resources.lexicon)
        allowed = {t.lemma for t in tokens} | {t.surface.lower() for t in tokens} | {"has"}
        for premise in extract_premises(text, strict=strict, resources=resources):
            assert set(premise.words()) <= allowed, premise

    @pytest.mark.parametrize("text", QUESTIONS)
    def test_canonical_form_parses_back(self, resources, text):
        for premise in extract_premises(text, strict=False, resources=resources):
            assert parse_premise(premise.canonical()) == premise

    @pytest.mark.parametrize("text", QUESTIONS)
    def test_deterministic(self, resources, text):
        first = extract_premises(text, strict=False, resources=resources)
        assert extract_premises(text, strict=False, resources=resources) == first
        assert len(set(first)) == len(first)


class TestSceneGraph:
    """Tests for scene graph construction."""

    def test_objects_are_shared(self, resources):
        tokens = tokenize_and_tag("Why is the big red dog old?", resources.lexicon)
        graph = parse_scene_graph(tokens, resources)
        assert graph.object_lemmas == ["dog"]
        assert graph.attribute_pairs() == [("dog", "big"), ("dog", "red"), ("dog", "old")]

    def test_empty_tokens(self, resources):
        assert parse_scene_graph([], resources).objects == []


class TestFilterPremises:
    """Tests for premise filtering."""

    def test_drops_stop_words_and_repeats(self):
        premises = [P("dog"), P("photo"), P("dog"), P("dog", "in", "photo")]
        assert filter_premises(premises, {"photo"}) == [P("dog")]


class TestParsePremise:
    """Tests for canonical premise parsing."""

    def test_parse(self):
        assert parse_premise("<man, holding, racket>") == P("man", "holding", "racket")
        assert parse_premise(" <tennis racket> ") == P("tennis racket")

    def test_canonical_form(self):
        assert P("car", "red").canonical() == "<car, red>"

    def test_too_many_parts(self):
        with pytest.raises(PremiseArityError):
            parse_premise("<a, b, c, d>")

    def test_not_bracketed(self):
        with pytest.raises(ValueError):
            parse_premise("dog")
