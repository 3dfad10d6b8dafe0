"""
Question Relevance Prediction and Explanation (QRPE) tuple construction.

For every source (image, question) pair and every first- or second-order
premise of the question, the builder looks for images on which that premise
is false while every other checked premise still holds, and keeps the one
visually closest to the source image. The result is a tuple
(relevant image, question, falsified premise, irrelevant image, distance).
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Set, Tuple

import numpy as np
import pandas as pd

from .annotation_store import AnnotationStore
from .errors import EmptyDatasetError, NoNegativeFoundError, UnsupportedPremiseOrderError
from .features import EmbeddingTable, FeatureStore
from .lexicon import Resources, load_resources
from .premise_extraction import extract_premises, question_words
from .schemas import (
    DatasetStats,
    DistanceHistogram,
    Premise,
    PremiseOrder,
    QrpeTuple,
    Question,
    RelevanceExample,
    TruthValue,
)

logger = logging.getLogger(__name__)

CHECKED_ORDERS = (PremiseOrder.FIRST, PremiseOrder.SECOND)


def _checks_for(premises: Sequence[Premise], target: Premise) -> List[Premise]:
    """Premises that must be true on a candidate falsifying ``target``."""
    head = target.parts[0]
    checks: List[Premise] = []
    for premise in premises:
        if premise == target or premise.order not in CHECKED_ORDERS:
            continue
        # <x> false implies every premise about x is false too.
        if target.order == PremiseOrder.FIRST and head in premise.parts:
            continue
        checks.append(premise)
    if target.order == PremiseOrder.SECOND:
        anchor = Premise.of(head)
        if anchor not in checks:
            checks.insert(0, anchor)
    return checks


def find_candidates(
    store: AnnotationStore,
    premises: Sequence[Premise],
    target: Premise,
    exclude: Optional[int] = None,
) -> Set[int]:
    """Images on which ``target`` is false and every other checked premise is true.

    Args:
        store: Annotation store answering premise-truth queries.
        premises: All premises of the question, ``target`` included.
        target: The first- or second-order premise to falsify.
        exclude: Image to leave out, normally the relevant image.

    Raises:
        UnsupportedPremiseOrderError: If ``target`` is third order.
    """
    if target.order not in CHECKED_ORDERS:
        raise UnsupportedPremiseOrderError(int(target.order))
    checks = _checks_for(premises, target)
    candidates: Set[int] = set()
    for image_id in store.image_ids:
        if image_id == exclude:
            continue
        if store.premise_holds(target, image_id) != TruthValue.FALSE:
            continue
        if all(store.premise_holds(p, image_id) == TruthValue.TRUE for p in checks):
            candidates.add(image_id)
    return candidates


def select_negative(
    candidates: Iterable[int], pos_image: int, features: FeatureStore
) -> Tuple[int, float]:
    """Nearest candidate to ``pos_image`` by Euclidean distance; ties go to the smallest id.

    Raises:
        NoNegativeFoundError: If there are no candidates.
        MissingFeatureError: If a candidate or the positive image has no vector.
    """
    ordered = sorted(candidates)
    if not ordered:
        raise NoNegativeFoundError()
    distances = features.distances(pos_image, ordered)
    best = int(np.argmin(distances))
    return ordered[best], float(distances[best])


def tuples_for_question(
    question: Question,
    store: AnnotationStore,
    features: FeatureStore,
    strict: bool = True,
    resources: Optional[Resources] = None,
) -> List[QrpeTuple]:
    """At most one tuple per checked premise of one question, in premise order."""
    premises = extract_premises(question, strict=strict, resources=resources)
    checked = [p for p in premises if p.order in CHECKED_ORDERS]
    pos_image = question.image_id

    if any(store.premise_holds(p, pos_image) == TruthValue.FALSE for p in checked):
        logger.debug("Question %d has a false premise on its own image", question.question_id)
        return []

    tuples: List[QrpeTuple] = []
    for target in checked:
        candidates = find_candidates(store, premises, target, exclude=pos_image)
        try:
            neg_image, distance = select_negative(candidates, pos_image, features)
        except NoNegativeFoundError:
            logger.debug("No negative for question %d premise %s", question.question_id, target)
            continue
        tuples.append(
            QrpeTuple(
                pos_image=pos_image,
                question_id=question.question_id,
                premise=target,
                neg_image=neg_image,
                distance=distance,
            )
        )
    return tuples


def build_dataset(
    questions: Iterable[Question],
    store: AnnotationStore,
    features: FeatureStore,
    strict: bool = True,
    workers: int = 1,
    resources: Optional[Resources] = None,
    on_question: Optional[Callable[[Question], None]] = None,
) -> List[QrpeTuple]:
    """Build QRPE tuples for a corpus of relevant (image, question) pairs.

    Output is ordered by question id, then image id, then premise order,
    whatever the number of workers.

    Args:
        questions: Source questions, each relevant to its own image.
        store: Annotation store.
        features: Image feature vectors.
        strict: Extract premises in strict mode.
        workers: Threads used to process questions.
        resources: Parser resources; the bundled set when omitted.
        on_question: Called once per finished question (progress reporting).
    """
    if workers < 1:
        raise ValueError(f"workers must be at least 1, got {workers}")
    resources = resources or load_resources()
    ordered = sorted(questions, key=lambda q: (q.question_id, q.image_id))

    def run(question: Question) -> List[QrpeTuple]:
        result = tuples_for_question(question, store, features, strict, resources)
        if on_question is not None:
            on_question(question)
        return result

    if workers == 1:
        per_question = [run(question) for question in ordered]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            per_question = list(pool.map(run, ordered))

    tuples = [t for batch in per_question for t in batch]
    logger.info("Built %d tuples from %d questions", len(tuples), len(ordered))
    return tuples


def dataset_stats(
    tuples: Sequence[QrpeTuple], questions: Optional[Iterable[Question]] = None
) -> DatasetStats:
    """Counts over a tuple set; train/val counts need questions with split labels."""
    if not tuples:
        return DatasetStats()
    df = pd.DataFrame(
        {
            "question_id": [t.question_id for t in tuples],
            "premise": [t.premise.canonical() for t in tuples],
            "order": [int(t.premise.order) for t in tuples],
        }
    )
    splits: Dict[int, Optional[str]] = {}
    for question in questions or ():
        splits[question.question_id] = question.split
    df["split"] = df["question_id"].map(lambda qid: splits.get(qid))

    order_counts = df["order"].value_counts()
    split_counts = df["split"].value_counts()
    return DatasetStats(
        total_tuples=len(df),
        unique_premises=int(df["premise"].nunique()),
        unique_questions=int(df["question_id"].nunique()),
        first_order=int(order_counts.get(1, 0)),
        second_order=int(order_counts.get(2, 0)),
        train=int(split_counts.get("train", 0)),
        val=int(split_counts.get("val", 0)),
    )


def pair_distance_histogram(
    pairs: Iterable[Tuple[int, int]], features: FeatureStore, bucket_width: float
) -> DistanceHistogram:
    """Histogram of Euclidean distances between image pairs.

    Pairs with an image lacking a vector are left out and the image ids
    are reported in ``missing``.
    """
    if bucket_width <= 0:
        raise ValueError(f"bucket_width must be positive, got {bucket_width}")
    distances: List[float] = []
    missing: Set[int] = set()
    for a, b in pairs:
        absent = [image_id for image_id in (a, b) if image_id not in features]
        if absent:
            missing.update(absent)
            continue
        distances.append(features.distance(a, b))
    if missing:
        logger.warning("%d images have no feature vector", len(missing))
    if not distances:
        return DistanceHistogram(bucket_width=bucket_width, missing=sorted(missing))

    values = np.asarray(distances)
    buckets = np.floor(values / bucket_width).astype(np.int64)
    counts = np.bincount(buckets)
    return DistanceHistogram(
        bucket_width=bucket_width,
        counts=[int(c) for c in counts],
        mean=float(values.mean()),
        pair_count=len(distances),
        missing=sorted(missing),
    )


def tuple_pairs(tuples: Iterable[QrpeTuple]) -> List[Tuple[int, int]]:
    return [(t.pos_image, t.neg_image) for t in tuples]


def random_pairs(
    tuples: Iterable[QrpeTuple], image_ids: Iterable[int], seed: int = 0
) -> List[Tuple[int, int]]:
    """Pair each relevant image with a seeded random other image.

    This is the random-pairing baseline the builder's nearest negatives are
    compared against.
    """
    rng = np.random.default_rng(seed)
    pool = sorted(set(image_ids))
    pairs: List[Tuple[int, int]] = []
    for t in tuples:
        others = [image_id for image_id in pool if image_id != t.pos_image]
        if not others:
            continue
        pairs.append((t.pos_image, others[int(rng.integers(len(others)))]))
    return pairs


def _cosine(a: np.ndarray, b: np.ndarray) -> float:
    norm = float(np.linalg.norm(a) * np.linalg.norm(b))
    if norm == 0.0:
        return 0.0
    return float(np.dot(a, b) / norm)


def nearest_question(
    question: Question, corpus: Iterable[Question], embeddings: EmbeddingTable
) -> int:
    """Corpus question id with the most similar mean word embedding.

    Ties go to the smallest question id.

    Raises:
        EmptyDatasetError: If the corpus is empty.
    """
    query = embeddings.mean_vector(question_words(question.text))
    best_id: Optional[int] = None
    best_score = -np.inf
    for candidate in sorted(corpus, key=lambda q: q.question_id):
        score = _cosine(query, embeddings.mean_vector(question_words(candidate.text)))
        if score > best_score:
            best_id, best_score = candidate.question_id, score
    if best_id is None:
        raise EmptyDatasetError()
    return best_id


def relevance_examples(
    tuples: Iterable[QrpeTuple], captions: Optional[Mapping[int, str]] = None
) -> List[RelevanceExample]:
    """One relevant and one irrelevant example per tuple.

    Both carry the order of the falsified premise so accuracy can be broken
    down over balanced subsets.
    """
    captions = captions or {}
    examples: List[RelevanceExample] = []
    for t in tuples:
        order = int(t.premise.order)
        for image_id, label in ((t.pos_image, 1), (t.neg_image, 0)):
            examples.append(
                RelevanceExample(
                    question_id=t.question_id,
                    image_id=image_id,
                    label=label,
                    falsified_order=order,
                    caption=captions.get(image_id),
                )
            )
    return examples


def fpd_examples(tuples: Iterable[QrpeTuple]) -> List[RelevanceExample]:
    """Premise-grounding examples: the premise holds on I+ and not on I-."""
    examples: List[RelevanceExample] = []
    for t in tuples:
        order = int(t.premise.order)
        for image_id, label in ((t.pos_image, 1), (t.neg_image, 0)):
            examples.append(
                RelevanceExample(
                    question_id=t.question_id,
                    image_id=image_id,
                    label=label,
                    falsified_order=order,
                    premise=t.premise,
                )
            )
    return examples
