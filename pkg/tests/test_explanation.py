"""Tests for the explanation module."""

import numpy as np
import pytest

from src.errors import UnsupportedPremiseOrderError
from src.explanation import explain_premise, explain_question
from src.relevance_nn import MlpModel
from src.schemas import EncodingSpec, Premise, Question


def P(*parts):
    return Premise.of(*parts)


class TestExplainPremise:
    """Tests for single-premise sentences."""

    def test_missing_object(self):
        assert explain_premise(P("dog")).sentence == "There is no dog in the image."

    def test_wrong_attribute(self):
        assert explain_premise(P("car", "red")).sentence == "The car is not red."

    def test_third_order(self):
        with pytest.raises(UnsupportedPremiseOrderError):
            explain_premise(P("man", "holding", "racket"))


class TestExplainWithAnnotations:
    """Tests for ground-truth explanations."""

    def test_relevant_image(self, toy_a, resources):
        result = explain_question(
            "Why is the big red dog old?", image_id=1, store=toy_a.store, resources=resources
        )
        assert result.relevant
        assert result.to_lines() == ["relevant"]

    def test_every_false_premise_listed(self, toy_a, resources):
        result = explain_question(
            "Why is the big red dog old?", image_id=5, store=toy_a.store, resources=resources
        )
        assert result.to_lines() == ["The dog is not big.", "The dog is not old."]

    def test_missing_object(self, toy_a, resources):
        result = explain_question(
            "Why is the big red dog old?", image_id=6, store=toy_a.store, resources=resources
        )
        assert [e.premise for e in result.explanations] == [P("dog")]

    def test_relation_premises_not_explained(self, toy_a, resources):
        result = explain_question(
            "What color is the cat's tie?", image_id=1, store=toy_a.store, resources=resources
        )
        assert result.to_lines() == [
            "There is no cat in the image.",
            "There is no tie in the image.",
        ]

    def test_question_model_supplies_image(self, toy_a, resources):
        question = Question(question_id=1, image_id=6, text="Where is the red car?")
        result = explain_question(question, store=toy_a.store, resources=resources)
        assert result.image_id == 6
        assert result.to_lines() == ["There is no car in the image."]

    def test_needs_image_id(self, toy_a):
        with pytest.raises(ValueError, match="image id"):
            explain_question("Where is the dog?", store=toy_a.store)


class TestExplainWithDetector:
    """Tests for model-driven explanations."""

    @pytest.fixture
    def detector(self):
        # Fires for <dog> only when the first image component is on.
        spec = EncodingSpec(premise_vocab_1=["dog"], image_dim=2)
        model = MlpModel([np.array([[5.0], [5.0], [0.0]])], [np.array([-7.5])])
        return model, spec

    def test_grounded(self, detector, resources):
        model, spec = detector
        result = explain_question(
            "Where is the dog?",
            image=np.array([1.0, 0.0]),
            model=model,
            spec=spec,
            resources=resources,
        )
        assert result.relevant

    def test_not_grounded(self, detector, resources):
        model, spec = detector
        result = explain_question(
            "Where is the dog?",
            image=np.array([0.0, 1.0]),
            model=model,
            spec=spec,
            resources=resources,
        )
        assert result.to_lines() == ["There is no dog in the image."]

    def test_needs_store_or_model(self):
        with pytest.raises(ValueError, match="annotation store or a model"):
            explain_question("Where is the dog?", image_id=1)
