"""
Training-set augmentation with generated premise questions.

A strategy selects which generated QA pairs are added to a source VQA
training set; the selected pairs are merged behind the source questions
with fresh question ids and provenance.
"""

import logging
from collections import Counter
from typing import Dict, Iterable, List, Optional, Sequence, Set

from .errors import IdCollisionError
from .schemas import (
    AnswerType,
    AnswerTypeCounts,
    MergedRecord,
    Provenance,
    QAPair,
    Question,
    Strategy,
)

logger = logging.getLogger(__name__)

BINARY = frozenset({AnswerType.YES, AnswerType.NO})
TOP_ANSWERS = 1000


def _normalize_answer(answer: str) -> str:
    return " ".join(answer.lower().split())


def source_answers(questions: Iterable[Question], split: str = "train") -> List[str]:
    """Answers of the training questions.

    When no question carries a split label every answered question counts.
    """
    answered = [q for q in questions if q.answer is not None]
    if any(q.split is not None for q in answered):
        answered = [q for q in answered if q.split == split]
    return [q.answer for q in answered if q.answer is not None]


def top_answers(answers: Iterable[str], k: int = TOP_ANSWERS) -> Set[str]:
    """The k most frequent answers; frequency ties are broken lexicographically."""
    counts = Counter(_normalize_answer(a) for a in answers)
    ranked = sorted(counts.items(), key=lambda item: (-item[1], item[0]))
    return {answer for answer, _ in ranked[:k]}


def apply_strategy(
    generated: Sequence[QAPair],
    answers: Iterable[str],
    strategy: Strategy,
    k: int = TOP_ANSWERS,
) -> List[QAPair]:
    """Select generated pairs for one augmentation strategy, keeping input order.

    Args:
        generated: Generated QA pairs.
        answers: Source training answers as a multiset; used by comm-other
            and top1k-a.
        strategy: Which subset to keep.
        k: Answer pool size for top1k-a.
    """
    if strategy == Strategy.BASELINE:
        return []
    if strategy == Strategy.ALL:
        return list(generated)
    if strategy == Strategy.ONLY_BINARY:
        return [p for p in generated if p.answer_type in BINARY]
    if strategy == Strategy.NO_OTHER:
        return [p for p in generated if p.answer_type != AnswerType.OTHER]
    if strategy == Strategy.NO_BINARY:
        return [p for p in generated if p.answer_type not in BINARY]
    if strategy == Strategy.COMM_OTHER:
        pool = {_normalize_answer(a) for a in answers}
        return [
            p
            for p in generated
            if p.answer_type in BINARY or _normalize_answer(p.answer) in pool
        ]
    if strategy == Strategy.TOP1K_A:
        pool = top_answers(answers, k)
        return [
            p
            for p in generated
            if p.answer_type in BINARY
            or (p.answer_type == AnswerType.OTHER and _normalize_answer(p.answer) in pool)
        ]
    raise ValueError(f"unknown strategy: {strategy}")


def answer_type_distribution(pairs: Iterable[QAPair]) -> AnswerTypeCounts:
    counts = Counter(p.answer_type for p in pairs)
    return AnswerTypeCounts(
        other=counts[AnswerType.OTHER],
        number=counts[AnswerType.NUMBER],
        yes=counts[AnswerType.YES],
        no=counts[AnswerType.NO],
        total=sum(counts.values()),
    )


def merge_training_set(
    source: Sequence[Question],
    augment: Sequence[QAPair],
    start_id: Optional[int] = None,
) -> List[MergedRecord]:
    """Source questions followed by generated pairs with fresh ids.

    Generated records inherit their source question's split and carry
    ``provenance`` (source question id and premise).

    Args:
        source: Source training questions.
        augment: Generated pairs, each with ``source_question_id`` and ``image_id``.
        start_id: First fresh id; one past the largest source id when omitted.

    Raises:
        IdCollisionError: If source ids repeat or a fresh id is already taken.
    """
    merged: List[MergedRecord] = []
    used: Set[int] = set()
    by_id: Dict[int, Question] = {}
    for question in source:
        if question.question_id in used:
            raise IdCollisionError(question.question_id)
        used.add(question.question_id)
        by_id[question.question_id] = question
        merged.append(MergedRecord(**question.model_dump()))

    next_id = start_id if start_id is not None else max(used, default=-1) + 1
    for pair in augment:
        if pair.source_question_id is None or pair.image_id is None:
            raise ValueError(f"generated pair {pair.question!r} has no source question or image")
        if next_id in used:
            raise IdCollisionError(next_id)
        used.add(next_id)
        origin = by_id.get(pair.source_question_id)
        merged.append(
            MergedRecord(
                question_id=next_id,
                image_id=pair.image_id,
                text=pair.question,
                answer=pair.answer,
                split=origin.split if origin is not None else None,
                provenance=Provenance(
                    source_question_id=pair.source_question_id, premise=pair.premise
                ),
            )
        )
        next_id += 1

    logger.info("Merged %d source and %d generated questions", len(source), len(augment))
    return merged
