"""
Pydantic schemas shared by the premise-forge pipeline.

This module defines the data models that cross module and file boundaries:
tokens and scene graphs from the parser, premises, corpus questions,
generated QA pairs, QRPE tuples, classifier datasets and the reports
produced over them.

JSONL files are written with ``model_dump(mode="json")`` so keys appear in
the declared field order below.
"""

import re
from enum import Enum
from typing import Annotated, Any, List, Optional, Tuple

from pydantic import (
    BaseModel,
    BeforeValidator,
    ConfigDict,
    Field,
    PlainSerializer,
    field_validator,
    model_validator,
)

_CANONICAL_RE = re.compile(r"^<(.+)>$")

NUMBER_WORDS = {
    "zero", "one", "two", "three", "four", "five", "six", "seven", "eight",
    "nine", "ten", "eleven", "twelve", "thirteen", "fourteen", "fifteen",
    "sixteen", "seventeen", "eighteen", "nineteen", "twenty",
}


class TokenTag(str, Enum):
    """Coarse part-of-speech tags used by the shallow parser."""

    NOUN = "Noun"
    ADJ = "Adj"
    VERB = "Verb"
    PREP = "Prep"
    DET = "Det"
    WH = "Wh"
    NUM = "Num"
    POSS = "Poss"
    OTHER = "Other"


class Token(BaseModel):
    """A tagged question token."""

    model_config = ConfigDict(frozen=True)

    surface: str = Field(..., description="Token text as written")
    lemma: str = Field(..., min_length=1, description="Lowercase lemma")
    tag: TokenTag

    @field_validator("lemma")
    @classmethod
    def _lowercase_lemma(cls, value: str) -> str:
        if value != value.lower():
            raise ValueError(f"lemma must be lowercase: {value!r}")
        return value

    @property
    def premise_form(self) -> str:
        """Form used inside premises.

        Nouns contribute their lemma; verbs keep their inflected surface
        ("holding", not "hold") because premises are matched on exact words.
        """
        if self.tag == TokenTag.VERB:
            return self.surface.lower()
        return self.lemma


class PremiseOrder(int, Enum):
    FIRST = 1
    SECOND = 2
    THIRD = 3


class Premise(BaseModel):
    """A canonical semantic tuple: <object>, <object, attribute> or <subject, relation, object>."""

    model_config = ConfigDict(frozen=True)

    parts: Tuple[str, ...]

    @field_validator("parts")
    @classmethod
    def _check_parts(cls, value: Tuple[str, ...]) -> Tuple[str, ...]:
        if not 1 <= len(value) <= 3:
            raise ValueError(f"bad premise arity: {len(value)} parts")
        cleaned = tuple(" ".join(part.split()) for part in value)
        for part in cleaned:
            if not part or part != part.lower() or "," in part:
                raise ValueError(f"bad premise part: {part!r}")
        return cleaned

    @classmethod
    def of(cls, *parts: str) -> "Premise":
        return cls(parts=tuple(parts))

    @classmethod
    def from_canonical(cls, text: str) -> "Premise":
        """Parse ``<a>``, ``<a, b>`` or ``<a, b, c>``."""
        match = _CANONICAL_RE.match(text.strip())
        if not match:
            raise ValueError(f"not a canonical premise: {text!r}")
        return cls(parts=tuple(match.group(1).split(", ")))

    @property
    def order(self) -> PremiseOrder:
        return PremiseOrder(len(self.parts))

    def canonical(self) -> str:
        return "<" + ", ".join(self.parts) + ">"

    def words(self) -> List[str]:
        """Every whitespace-separated word across all parts."""
        return [word for part in self.parts for word in part.split()]

    def __str__(self) -> str:
        return self.canonical()


def _coerce_premise(value: Any) -> Any:
    if isinstance(value, str):
        return Premise.from_canonical(value)
    return value


# Premise fields read and write the canonical "<a, b>" string form.
CanonicalPremise = Annotated[
    Premise,
    BeforeValidator(_coerce_premise),
    PlainSerializer(lambda premise: premise.canonical(), return_type=str),
]


class QuestionClass(str, Enum):
    EXISTENTIAL = "Existential"
    COUNTING = "Counting"
    OTHER = "Other"


class ObjectNode(BaseModel):
    lemma: str
    position: int = Field(..., description="Token index used for canonical ordering")


class Attribute(BaseModel):
    object: int
    lemma: str
    position: int
    predicative: bool = Field(
        False, description="Comes from the main predicate, so it depends on the answer"
    )


class Relation(BaseModel):
    subject: int
    lemma: str
    object: int
    position: int
    possessive: bool = Field(False, description="Derived from NOUN's NOUN")
    predicative: bool = False


class SceneGraph(BaseModel):
    """Objects, attribute edges and relation edges parsed from one question."""

    objects: List[ObjectNode] = Field(default_factory=list)
    attributes: List[Attribute] = Field(default_factory=list)
    relations: List[Relation] = Field(default_factory=list)

    @model_validator(mode="after")
    def _check_indices(self) -> "SceneGraph":
        count = len(self.objects)
        for attribute in self.attributes:
            if not 0 <= attribute.object < count:
                raise ValueError(f"attribute index out of range: {attribute.object}")
        for relation in self.relations:
            if not (0 <= relation.subject < count and 0 <= relation.object < count):
                raise ValueError(
                    f"relation indices out of range: {relation.subject}, {relation.object}"
                )
        return self

    @property
    def object_lemmas(self) -> List[str]:
        return [node.lemma for node in self.objects]

    def attribute_pairs(self) -> List[Tuple[str, str]]:
        return [(self.objects[a.object].lemma, a.lemma) for a in self.attributes]


class Question(BaseModel):
    """A visual question from a corpus file."""

    question_id: int = Field(..., ge=0)
    image_id: int = Field(..., ge=0)
    text: str = Field(..., min_length=1)
    answer: Optional[str] = None
    split: Optional[str] = None

    @field_validator("text")
    @classmethod
    def _non_blank(cls, value: str) -> str:
        if not value.strip():
            raise ValueError("text must not be blank")
        return value


class AnswerType(str, Enum):
    YES = "Yes"
    NO = "No"
    NUMBER = "Number"
    OTHER = "Other"


def answer_type_of(answer: str) -> AnswerType:
    """Classify an answer string the way VQA answer types are assigned."""
    normalized = answer.strip().lower()
    if normalized == "yes":
        return AnswerType.YES
    if normalized == "no":
        return AnswerType.NO
    if normalized.isdigit() or normalized in NUMBER_WORDS:
        return AnswerType.NUMBER
    return AnswerType.OTHER


class QAPair(BaseModel):
    """A templated question-answer pair generated from one premise."""

    question: str = Field(..., min_length=1)
    answer: str = Field(..., min_length=1)
    answer_type: AnswerType
    premise: CanonicalPremise
    source_question_id: Optional[int] = None
    image_id: Optional[int] = None

    @model_validator(mode="after")
    def _check_answer_type(self) -> "QAPair":
        expected = answer_type_of(self.answer)
        if self.answer_type != expected:
            raise ValueError(
                f"answer_type {self.answer_type.value} inconsistent with answer {self.answer!r}"
            )
        return self


class TruthValue(str, Enum):
    TRUE = "True"
    FALSE = "False"
    UNKNOWN = "Unknown"


class QrpeTuple(BaseModel):
    """(relevant image, question, falsified premise, irrelevant image, visual distance)."""

    pos_image: int
    question_id: int
    premise: CanonicalPremise
    neg_image: int
    distance: float = Field(..., ge=0.0)

    @model_validator(mode="after")
    def _distinct_images(self) -> "QrpeTuple":
        if self.pos_image == self.neg_image:
            raise ValueError("pos_image and neg_image must differ")
        return self


class RelevanceExample(BaseModel):
    """One labelled classifier example (relevance or premise grounding)."""

    question_id: int
    image_id: int
    label: int = Field(..., ge=0, le=1)
    falsified_order: Optional[int] = Field(None, ge=1, le=2)
    caption: Optional[str] = None
    premise: Optional[CanonicalPremise] = None


class DatasetStats(BaseModel):
    total_tuples: int = 0
    unique_premises: int = 0
    unique_questions: int = 0
    first_order: int = 0
    second_order: int = 0
    train: int = 0
    val: int = 0


class DistanceHistogram(BaseModel):
    bucket_width: float = Field(..., gt=0.0)
    counts: List[int] = Field(default_factory=list)
    mean: float = 0.0
    pair_count: int = 0
    missing: List[int] = Field(default_factory=list, description="Image ids without vectors")

    def to_text(self) -> str:
        """Plot-ready text: one ``bucket_start<TAB>count`` line per bucket."""
        lines = [f"# pairs={self.pair_count} mean={self.mean:.6f}"]
        for index, count in enumerate(self.counts):
            lines.append(f"{index * self.bucket_width:.6f}\t{count}")
        return "\n".join(lines)


class ModelKind(str, Enum):
    REL_Q = "RelQ"
    REL_QP = "RelQP"
    CAP_QC = "CapQC"
    CAP_PC = "CapPC"
    CAP_QPC = "CapQPC"
    FPD = "FPD"


class EvaluationReport(BaseModel):
    overall: float
    first_order: Optional[float] = None
    second_order: Optional[float] = None
    count: int = 0
    first_order_count: int = 0
    second_order_count: int = 0


class TrainingLog(BaseModel):
    epoch_losses: List[float] = Field(default_factory=list)
    final_accuracy: float = 0.0


class Explanation(BaseModel):
    premise: CanonicalPremise
    sentence: str = Field(..., min_length=1)


class ExplanationResult(BaseModel):
    question: str
    image_id: Optional[int] = None
    explanations: List[Explanation] = Field(default_factory=list)

    @property
    def relevant(self) -> bool:
        return not self.explanations

    def to_lines(self) -> List[str]:
        if self.relevant:
            return ["relevant"]
        return [explanation.sentence for explanation in self.explanations]


class AnswerTypeCounts(BaseModel):
    other: int = 0
    number: int = 0
    yes: int = 0
    no: int = 0
    total: int = 0


class Strategy(str, Enum):
    BASELINE = "baseline"
    ALL = "all"
    ONLY_BINARY = "only-binary"
    NO_OTHER = "no-other"
    NO_BINARY = "no-binary"
    COMM_OTHER = "comm-other"
    TOP1K_A = "top1k-a"


class Provenance(BaseModel):
    source_question_id: int
    premise: CanonicalPremise


class MergedRecord(Question):
    """A training question; generated entries carry their provenance."""

    provenance: Optional[Provenance] = None


class PremiseRecord(BaseModel):
    """Extraction output for one question."""

    question_id: int
    image_id: int
    premises: List[CanonicalPremise] = Field(default_factory=list)


class ObjectRecord(BaseModel):
    """Object-presence annotation for one image."""

    image_id: int = Field(..., ge=0)
    classes: List[str] = Field(default_factory=list)


class AttributeRecord(BaseModel):
    """Object-attribute annotations for one image."""

    image_id: int = Field(..., ge=0)
    pairs: List[Tuple[str, str]] = Field(default_factory=list)


class CaptionRecord(BaseModel):
    image_id: int = Field(..., ge=0)
    caption: str


class EncoderMode(str, Enum):
    BAG_OF_WORDS = "bow"
    MEAN_EMBEDDING = "embedding"


class EncodingSpec(BaseModel):
    """Vocabularies and dimensions fixing a classifier's input layout."""

    question_mode: EncoderMode = EncoderMode.BAG_OF_WORDS
    vocab: List[str] = Field(default_factory=list, description="Bag-of-words vocabulary")
    embedding_dim: int = Field(0, ge=0)
    premise_vocab_1: List[str] = Field(default_factory=list)
    premise_vocab_2: List[Tuple[str, str]] = Field(default_factory=list)
    image_dim: int = Field(0, ge=0)
    caption_mode: Optional[EncoderMode] = None
    caption_vocab: List[str] = Field(default_factory=list)

    @field_validator("vocab", "premise_vocab_1", "premise_vocab_2", "caption_vocab")
    @classmethod
    def _deduplicated(cls, value: List[Any]) -> List[Any]:
        if len(set(value)) != len(value):
            raise ValueError("vocabulary entries must be unique")
        return value

    @model_validator(mode="after")
    def _check_modes(self) -> "EncodingSpec":
        uses_embedding = EncoderMode.MEAN_EMBEDDING in (self.question_mode, self.caption_mode)
        if uses_embedding and self.embedding_dim <= 0:
            raise ValueError("embedding mode needs a positive embedding_dim")
        return self


class ModelCard(BaseModel):
    """JSON sidecar stored next to a binary model file."""

    format_version: int = 1
    kind: ModelKind
    spec: EncodingSpec
    layer_sizes: List[int]
    seed: int = 0
    threshold: float = Field(0.5, ge=0.0, le=1.0)
