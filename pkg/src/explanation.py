"""
Templated explanations for false premises.
"""

import logging
from typing import List, Optional, Union

import numpy as np

from .annotation_store import AnnotationStore
from .errors import UnsupportedPremiseOrderError
from .lexicon import Resources
from .premise_extraction import extract_premises
from .relevance_nn import MlpModel, fpd_predict
from .schemas import (
    EncodingSpec,
    Explanation,
    ExplanationResult,
    Premise,
    PremiseOrder,
    Question,
    TruthValue,
)

logger = logging.getLogger(__name__)

MISSING_OBJECT_TEMPLATE = "There is no {x} in the image."
MISSING_ATTRIBUTE_TEMPLATE = "The {x} is not {a}."


def explain_premise(premise: Premise) -> Explanation:
    if premise.order == PremiseOrder.FIRST:
        sentence = MISSING_OBJECT_TEMPLATE.format(x=premise.parts[0])
    elif premise.order == PremiseOrder.SECOND:
        sentence = MISSING_ATTRIBUTE_TEMPLATE.format(x=premise.parts[0], a=premise.parts[1])
    else:
        raise UnsupportedPremiseOrderError(int(premise.order), "unsupported")
    return Explanation(premise=premise, sentence=sentence)


def explain_question(
    question: Union[Question, str],
    image_id: Optional[int] = None,
    image: Optional[np.ndarray] = None,
    model: Optional[MlpModel] = None,
    spec: Optional[EncodingSpec] = None,
    store: Optional[AnnotationStore] = None,
    threshold: float = 0.5,
    resources: Optional[Resources] = None,
) -> ExplanationResult:
    """Explain every first- and second-order premise judged false.

    With a store, ground truth decides (only False counts as false). Without
    one, the false-premise detector decides from the image feature.

    Returns:
        A result that is ``relevant`` when no premise is false, otherwise
        one explanation per false premise in premise order.
    """
    text = question.text if isinstance(question, Question) else question
    if image_id is None and isinstance(question, Question):
        image_id = question.image_id
    if store is not None and image_id is None:
        raise ValueError("ground-truth explanations need an image id")
    if store is None and (model is None or spec is None or image is None):
        raise ValueError("explanations need an annotation store or a model, spec and image feature")

    explanations: List[Explanation] = []
    for premise in extract_premises(text, strict=True, resources=resources):
        if premise.order == PremiseOrder.THIRD:
            continue
        if store is not None:
            false = store.premise_holds(premise, image_id) == TruthValue.FALSE
        else:
            false = not fpd_predict(model, spec, premise, image, threshold)
        if false:
            explanations.append(explain_premise(premise))
    logger.debug("%d false premises in %r", len(explanations), text)
    return ExplanationResult(question=text, image_id=image_id, explanations=explanations)
