"""
Templated question generation from premises.

Each premise yields one or two question-answer pairs whose answer is known
from the premise alone, so no pair is ever answered "no". Pairs generated
for a source question are deduplicated against it by text and, for
existence questions, by SPICE similarity of the premise sets.
"""

import logging
import zlib
from typing import Iterable, List, Optional

from .errors import PremiseArityError
from .lexicon import Resources, load_resources
from .premise_extraction import extract_premises, is_existence_query, tokenize_and_tag
from .schemas import AnswerType, Premise, PremiseOrder, QAPair, Question, answer_type_of
from .spice_metric import spice_f1

logger = logging.getLogger(__name__)

EXISTENCE_TEMPLATE = "Is there {article} {x}?"
EXISTENCE_IN_IMAGE_TEMPLATE = "Is there {article} {x} in the image?"
COLOR_TEMPLATE = "What is the color of the {x}?"
ACTIVITY_TEMPLATE = "What is the {x} doing?"
ATTRIBUTE_TEMPLATE = "Is the {x} {a}?"
OBJECT_TEMPLATE = "What is the {s} {r}?"
SUBJECT_TEMPLATE = "{wh} is {r} the {o}?"
POSSESSED_TEMPLATE = "What does the {s} have?"
POSSESSOR_TEMPLATE = "{wh} has the {o}?"


def article_for(word: str) -> str:
    return "an" if word[:1].lower() in "aeiou" else "a"


def _pair(question: str, answer: str, premise: Premise) -> QAPair:
    return QAPair(
        question=question,
        answer=answer,
        answer_type=answer_type_of(answer),
        premise=premise,
    )


def generate_qa(premise: Premise, resources: Optional[Resources] = None) -> List[QAPair]:
    """Instantiate the templates for one premise.

    Raises:
        PremiseArityError: If the premise does not have 1 to 3 non-empty parts.
    """
    parts = tuple(premise.parts)
    if not 1 <= len(parts) <= 3 or any(not part for part in parts):
        raise PremiseArityError(f"{len(parts)} parts")
    resources = resources or load_resources()

    if len(parts) == 1:
        (x,) = parts
        return [_pair(EXISTENCE_TEMPLATE.format(article=article_for(x), x=x), "yes", premise)]

    if len(parts) == 2:
        x, a = parts
        if resources.is_color(a):
            return [_pair(COLOR_TEMPLATE.format(x=x), a, premise)]
        if resources.is_verbal(a):
            return [_pair(ACTIVITY_TEMPLATE.format(x=x), a, premise)]
        return [_pair(ATTRIBUTE_TEMPLATE.format(x=x, a=a), "yes", premise)]

    s, r, o = parts
    wh = "Who" if resources.is_animate(s) else "What"
    if r == "has":
        return [
            _pair(POSSESSED_TEMPLATE.format(s=s), o, premise),
            _pair(POSSESSOR_TEMPLATE.format(wh=wh, o=o), s, premise),
        ]
    return [
        _pair(OBJECT_TEMPLATE.format(s=s, r=r), o, premise),
        _pair(SUBJECT_TEMPLATE.format(wh=wh, r=r, o=o), s, premise),
    ]


def existence_question(premise: Premise) -> str:
    """Pick the plain or "in the image" existence wording by a stable hash.

    The CRC32 of the object lemma decides: odd gives "in the image".
    """
    (x,) = premise.parts
    template = (
        EXISTENCE_IN_IMAGE_TEMPLATE
        if zlib.crc32(x.encode("utf-8")) % 2
        else EXISTENCE_TEMPLATE
    )
    return template.format(article=article_for(x), x=x)


def _same_text(a: str, b: str) -> bool:
    return " ".join(a.lower().split()) == " ".join(b.lower().split())


def generate_for_question(
    question: Question,
    threshold: float = 0.9,
    resources: Optional[Resources] = None,
) -> List[QAPair]:
    """Generate deduplicated QA pairs for one source question.

    Args:
        question: The source question.
        threshold: SPICE F1 at or above which an existence rewrite of an
            existence question counts as a restatement.
        resources: Parser resources; the bundled set when omitted.

    Returns:
        Pairs in premise order, tagged with the source question and image ids.
    """
    if not 0.0 <= threshold <= 1.0:
        raise ValueError(f"threshold must be in [0, 1], got {threshold}")
    resources = resources or load_resources()

    source_premises = extract_premises(question, strict=False, resources=resources)
    source_is_existence = is_existence_query(tokenize_and_tag(question.text, resources.lexicon))

    pairs: List[QAPair] = []
    for premise in source_premises:
        for pair in generate_qa(premise, resources):
            if premise.order == PremiseOrder.FIRST:
                pair = pair.model_copy(update={"question": existence_question(premise)})
            if _same_text(pair.question, question.text):
                logger.debug(
                    "Dropped restatement %r of question %d", pair.question, question.question_id
                )
                continue
            if source_is_existence and premise.order == PremiseOrder.FIRST:
                generated = extract_premises(pair.question, strict=False, resources=resources)
                if spice_f1(generated, source_premises) >= threshold:
                    logger.debug("Dropped near-duplicate %r", pair.question)
                    continue
            pairs.append(
                pair.model_copy(
                    update={
                        "source_question_id": question.question_id,
                        "image_id": question.image_id,
                    }
                )
            )
    return pairs


def generate_for_corpus(
    questions: Iterable[Question],
    threshold: float = 0.9,
    resources: Optional[Resources] = None,
) -> List[QAPair]:
    """Apply generate_for_question to every question, in corpus order."""
    resources = resources or load_resources()
    pairs: List[QAPair] = []
    for question in questions:
        pairs.extend(generate_for_question(question, threshold, resources))
    no_count = sum(1 for pair in pairs if pair.answer_type == AnswerType.NO)
    if no_count:
        logger.warning("%d generated pairs are answered 'no'", no_count)
    return pairs
