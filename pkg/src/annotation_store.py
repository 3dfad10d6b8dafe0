"""
Object and attribute annotations with premise-truth queries.

Object-presence annotations are treated as complete for classes in the
class vocabulary, so a missing class falsifies a first-order premise.
Attribute annotations are treated as incomplete: a missing pair proves
nothing, and a second-order premise is false only when the object carries
an explicitly annotated attribute that excludes it.
"""

import logging
from pathlib import Path
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple, Union

from .config import ResourceConfig
from .corpus_io import read_jsonl
from .errors import CorpusFormatError, UnsupportedPremiseOrderError
from .lexicon import read_word_list
from .schemas import AttributeRecord, ObjectRecord, Premise, PremiseOrder, TruthValue

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def normalize_lemma(text: str) -> str:
    return " ".join(text.lower().split())


class ExclusionLexicon:
    """Antonym pairs and sister groups of mutually exclusive attributes."""

    def __init__(
        self,
        antonyms: Iterable[Tuple[str, str]] = (),
        sisters: Iterable[Iterable[str]] = (),
    ):
        self._antonyms: Set[FrozenSet[str]] = set()
        for a, b in antonyms:
            a, b = normalize_lemma(a), normalize_lemma(b)
            if a != b:
                self._antonyms.add(frozenset((a, b)))
        self._groups: Dict[str, Set[int]] = {}
        for group_id, group in enumerate(sisters):
            for lemma in group:
                self._groups.setdefault(normalize_lemma(lemma), set()).add(group_id)

    @classmethod
    def load(cls, path: PathLike) -> "ExclusionLexicon":
        """Read ``ANTONYM a b`` and ``SISTER a b c ...`` lines."""
        path = Path(path)
        if not path.exists():
            raise FileNotFoundError(f"Exclusion lexicon not found: {path}")
        antonyms: List[Tuple[str, str]] = []
        sisters: List[List[str]] = []
        with open(path, encoding="utf-8") as f:
            for line_number, line in enumerate(f, start=1):
                fields = line.split()
                if not fields or fields[0].startswith("#"):
                    continue
                keyword = fields[0].upper()
                if keyword == "ANTONYM" and len(fields) == 3:
                    antonyms.append((fields[1], fields[2]))
                elif keyword == "SISTER" and len(fields) >= 3:
                    sisters.append(fields[1:])
                else:
                    raise CorpusFormatError(
                        path, line_number, "expected 'ANTONYM a b' or 'SISTER a b ...'"
                    )
        return cls(antonyms, sisters)

    def mutually_exclusive(self, a: str, b: str) -> bool:
        a, b = normalize_lemma(a), normalize_lemma(b)
        if a == b:
            return False
        if frozenset((a, b)) in self._antonyms:
            return True
        return bool(self._groups.get(a, set()) & self._groups.get(b, set()))


def mutually_exclusive(lexicon: ExclusionLexicon, a: str, b: str) -> bool:
    return lexicon.mutually_exclusive(a, b)


def read_aliases(path: PathLike) -> Dict[str, str]:
    """``alias canonical`` per line; the canonical class may span several words."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Alias file not found: {path}")
    aliases: Dict[str, str] = {}
    with open(path, encoding="utf-8") as f:
        for line_number, line in enumerate(f, start=1):
            fields = line.split()
            if not fields or fields[0].startswith("#"):
                continue
            if len(fields) < 2:
                raise CorpusFormatError(path, line_number, "expected 'alias canonical'")
            aliases[fields[0].lower()] = normalize_lemma(" ".join(fields[1:]))
    return aliases


class AnnotationStore:
    """Immutable per-image annotations answering premise-truth queries."""

    def __init__(
        self,
        class_vocab: Sequence[str],
        presence: Dict[int, FrozenSet[int]],
        attributes: Dict[int, FrozenSet[Tuple[str, str]]],
        exclusion: Optional[ExclusionLexicon] = None,
        aliases: Optional[Dict[str, str]] = None,
    ):
        self._class_vocab: Tuple[str, ...] = tuple(class_vocab)
        self._class_index = {name: index for index, name in enumerate(self._class_vocab)}
        for image_id, indices in presence.items():
            for index in indices:
                if not 0 <= index < len(self._class_vocab):
                    raise ValueError(f"class index {index} out of range for image {image_id}")
        self._presence = dict(presence)
        self._attributes = dict(attributes)
        self._attributes_by_object: Dict[int, Dict[str, FrozenSet[str]]] = {}
        for image_id, pairs in self._attributes.items():
            grouped: Dict[str, Set[str]] = {}
            for obj, attr in pairs:
                grouped.setdefault(obj, set()).add(attr)
            self._attributes_by_object[image_id] = {k: frozenset(v) for k, v in grouped.items()}
        self.exclusion = exclusion or ExclusionLexicon()
        self._aliases = dict(aliases or {})

    @property
    def class_vocab(self) -> Tuple[str, ...]:
        return self._class_vocab

    @property
    def image_ids(self) -> List[int]:
        return sorted(set(self._presence) | set(self._attributes))

    def classes_of(self, image_id: int) -> FrozenSet[str]:
        return frozenset(self._class_vocab[i] for i in self._presence.get(image_id, ()))

    def pairs_of(self, image_id: int) -> FrozenSet[Tuple[str, str]]:
        return self._attributes.get(image_id, frozenset())

    def canonical_class(self, lemma: str) -> Optional[str]:
        """Class-vocabulary name for a question lemma, via aliases; None if unmapped."""
        lemma = normalize_lemma(lemma)
        name = self._aliases.get(lemma, lemma)
        return name if name in self._class_index else None

    def premise_holds(self, premise: Premise, image_id: int) -> TruthValue:
        """Truth of a first- or second-order premise on one image.

        Raises:
            UnsupportedPremiseOrderError: For third-order premises.
        """
        if premise.order == PremiseOrder.FIRST:
            return self._object_holds(premise.parts[0], image_id)
        if premise.order == PremiseOrder.SECOND:
            return self._attribute_holds(premise.parts[0], premise.parts[1], image_id)
        raise UnsupportedPremiseOrderError(int(premise.order))

    def _object_holds(self, lemma: str, image_id: int) -> TruthValue:
        name = self.canonical_class(lemma)
        if name is not None:
            if image_id not in self._presence:
                return TruthValue.UNKNOWN
            present = self._class_index[name] in self._presence[image_id]
            return TruthValue.TRUE if present else TruthValue.FALSE
        # Outside the class vocabulary only attribute annotations give evidence.
        if lemma in self._attributes_by_object.get(image_id, {}):
            return TruthValue.TRUE
        return TruthValue.UNKNOWN

    def _attribute_holds(self, obj: str, attr: str, image_id: int) -> TruthValue:
        annotated = self._attributes_by_object.get(image_id, {}).get(obj, frozenset())
        exact = attr in annotated
        excluded = any(self.exclusion.mutually_exclusive(attr, other) for other in annotated)
        if exact and not excluded:
            return TruthValue.TRUE
        if excluded and not exact:
            return TruthValue.FALSE
        return TruthValue.UNKNOWN


def premise_holds(store: AnnotationStore, premise: Premise, image_id: int) -> TruthValue:
    return store.premise_holds(premise, image_id)


def load_annotations(
    objects_path: Optional[PathLike],
    attributes_path: Optional[PathLike],
    lexicon_path: Optional[PathLike] = None,
    aliases_path: Optional[PathLike] = None,
    classes_path: Optional[PathLike] = None,
) -> AnnotationStore:
    """Load annotation files into an AnnotationStore.

    Args:
        objects_path: JSONL ``{"image_id", "classes"}``; None for no object data.
        attributes_path: JSONL ``{"image_id", "pairs"}``; None for no attribute data.
        lexicon_path: Exclusion lexicon; the bundled one when omitted.
        aliases_path: Class aliases; the bundled list when omitted.
        classes_path: Class vocabulary; the bundled 80 classes when omitted.
            Classes seen in the objects file are appended in first-seen order.
    """
    resources = ResourceConfig()
    exclusion = ExclusionLexicon.load(lexicon_path or resources.exclusion)
    aliases = read_aliases(aliases_path or resources.aliases)

    vocab_path = Path(classes_path or resources.classes)
    if not vocab_path.exists():
        raise FileNotFoundError(f"Class vocabulary not found: {vocab_path}")
    with open(vocab_path, encoding="utf-8") as f:
        vocab = [
            normalize_lemma(line)
            for line in f
            if line.strip() and not line.strip().startswith("#")
        ]
    index = {name: i for i, name in enumerate(vocab)}

    presence: Dict[int, Set[int]] = {}
    if objects_path is not None:
        for record in read_jsonl(objects_path, ObjectRecord):
            indices = presence.setdefault(record.image_id, set())
            for name in record.classes:
                name = normalize_lemma(name)
                if name not in index:
                    index[name] = len(vocab)
                    vocab.append(name)
                indices.add(index[name])

    attributes: Dict[int, Set[Tuple[str, str]]] = {}
    if attributes_path is not None:
        for attribute_record in read_jsonl(attributes_path, AttributeRecord):
            pairs = attributes.setdefault(attribute_record.image_id, set())
            for obj, attr in attribute_record.pairs:
                pairs.add((normalize_lemma(obj), normalize_lemma(attr)))

    store = AnnotationStore(
        class_vocab=vocab,
        presence={k: frozenset(v) for k, v in presence.items()},
        attributes={k: frozenset(v) for k, v in attributes.items()},
        exclusion=exclusion,
        aliases=aliases,
    )
    logger.info(
        "Loaded annotations: %d images with objects, %d with attributes, %d classes",
        len(presence),
        len(attributes),
        len(vocab),
    )
    return store
