"""
Premise extraction from visual questions.

A question is tokenized and tagged against the bundled lexicon, classified
(existential, counting or other), parsed into a small scene graph by a
rule-based shallow parser, and converted into canonical premises:

- first order: <object>
- second order: <object, attribute>
- third order: <subject, relation, object>

Premises that mention image-referring words are dropped, as are wh-target
abstraction nouns such as "brand" in "What brand of racket ...".
"""

import logging
import re
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple, Union

from .errors import EmptyQuestionError, PremiseArityError
from .lexicon import AUXILIARIES, PRONOUNS, Resources, TagLexicon, load_resources
from .schemas import (
    Attribute,
    ObjectNode,
    Premise,
    Question,
    QuestionClass,
    Relation,
    SceneGraph,
    Token,
    TokenTag,
)

logger = logging.getLogger(__name__)

_TOKEN_RE = re.compile(r"[^\W_]+(?:-[^\W_]+)*|'[^\W\d_]+")

_CLITIC_VERBS = {"'re": "are", "'m": "am", "'ll": "will", "'ve": "have", "'d": "would"}

# Polar questions open with a copula or auxiliary.
EXISTENTIAL_OPENERS = frozenset(
    {
        "is", "are", "was", "were", "am", "do", "does", "did", "can", "could",
        "has", "have", "had", "will", "would", "should",
    }
)

_INTENSIFIERS = frozenset({"very", "really", "too", "so", "quite"})
_PREDICATE_LINKS = frozenset({"and", "or", "not"}) | _INTENSIFIERS
_BINDING_PREPOSITIONS = frozenset({"of"})


def _normalize(text: str) -> str:
    text = text.replace("’", "'").replace("‘", "'")
    text = re.sub(r"\bcan't\b", "can not", text, flags=re.IGNORECASE)
    text = re.sub(r"\bwon't\b", "will not", text, flags=re.IGNORECASE)
    return re.sub(r"n't\b", " not", text, flags=re.IGNORECASE)


def _clitic_token(surface: str, previous: Optional[Token]) -> Token:
    clitic = surface.lower()
    if clitic == "'s":
        if previous is not None and (previous.tag == TokenTag.WH or previous.lemma in PRONOUNS):
            return Token(surface=surface, lemma="is", tag=TokenTag.VERB)
        return Token(surface=surface, lemma="'s", tag=TokenTag.POSS)
    if clitic in _CLITIC_VERBS:
        return Token(surface=surface, lemma=_CLITIC_VERBS[clitic], tag=TokenTag.VERB)
    return Token(surface=surface, lemma=clitic, tag=TokenTag.OTHER)


def tokenize_and_tag(text: str, lexicon: Optional[TagLexicon] = None) -> List[Token]:
    """Split a question into tagged tokens.

    Punctuation is dropped and the possessive 's becomes its own token.

    Raises:
        EmptyQuestionError: If the text holds no words.
    """
    if text is None or not text.strip():
        raise EmptyQuestionError()
    lexicon = lexicon or load_resources().lexicon

    tokens: List[Token] = []
    for match in _TOKEN_RE.finditer(_normalize(text)):
        surface = match.group(0)
        if surface.startswith("'"):
            tokens.append(_clitic_token(surface, tokens[-1] if tokens else None))
            continue
        lemma, tag = lexicon.lookup(surface.lower())
        tokens.append(Token(surface=surface, lemma=lemma, tag=tag))

    if not tokens:
        raise EmptyQuestionError()
    return tokens


def question_words(text: str) -> List[str]:
    """Lowercase word tokens without tagging, for bag-of-words and embeddings."""
    return [match.group(0).lower() for match in _TOKEN_RE.finditer(_normalize(text))]


def classify_question(tokens: Sequence[Token]) -> QuestionClass:
    """Counting for "how many/much", Existential for polar questions, else Other."""
    if not tokens:
        return QuestionClass.OTHER
    first = tokens[0].lemma
    if first == "how" and len(tokens) > 1 and tokens[1].lemma in ("many", "much"):
        return QuestionClass.COUNTING
    if first in EXISTENTIAL_OPENERS:
        return QuestionClass.EXISTENTIAL
    return QuestionClass.OTHER


def is_existence_query(tokens: Sequence[Token]) -> bool:
    """True for "is/are/was/were there ..." and "can/do you see ..." questions."""
    lemmas = [token.lemma for token in tokens[:3]]
    if len(lemmas) >= 2 and lemmas[0] in ("is", "are", "was", "were") and lemmas[1] == "there":
        return True
    return (
        len(lemmas) == 3
        and lemmas[0] in ("can", "could", "do", "does", "did")
        and lemmas[1] == "you"
        and lemmas[2] == "see"
    )


@dataclass
class _Unit:
    kind: str  # np, verb, aux, prep, poss, adj, wh, other
    position: int
    text: str = ""
    obj: Optional[int] = None
    fronted: bool = False


class _GraphBuilder:
    """Builds one SceneGraph from a tagged token sequence."""

    def __init__(self, tokens: Sequence[Token], resources: Resources):
        self.tokens = list(tokens)
        self.resources = resources
        self.objects: List[ObjectNode] = []
        self.attributes: List[Attribute] = []
        self.relations: List[Relation] = []
        self._object_index: Dict[str, int] = {}
        self._attribute_keys: Set[Tuple[int, str]] = set()
        self._relation_keys: Set[Tuple[int, str, int]] = set()

    # -- graph primitives --------------------------------------------------

    def _object_for(self, lemma: str, position: int) -> int:
        index = self._object_index.get(lemma)
        if index is None:
            index = len(self.objects)
            self._object_index[lemma] = index
            self.objects.append(ObjectNode(lemma=lemma, position=position))
        elif position < self.objects[index].position:
            self.objects[index].position = position
        return index

    def _add_attribute(self, obj: int, lemma: str, position: int, predicative: bool) -> None:
        key = (obj, lemma)
        if key in self._attribute_keys:
            return
        self._attribute_keys.add(key)
        self.attributes.append(
            Attribute(object=obj, lemma=lemma, position=position, predicative=predicative)
        )

    def _add_relation(
        self,
        subject: int,
        lemma: str,
        obj: int,
        position: int,
        predicative: bool = False,
        possessive: bool = False,
    ) -> None:
        key = (subject, lemma, obj)
        if subject == obj or key in self._relation_keys:
            return
        self._relation_keys.add(key)
        self.relations.append(
            Relation(
                subject=subject,
                lemma=lemma,
                object=obj,
                position=position,
                predicative=predicative,
                possessive=possessive,
            )
        )

    # -- chunking ----------------------------------------------------------

    def _match_preposition(self, i: int) -> Optional[Tuple[str, ...]]:
        words = [token.surface.lower() for token in self.tokens]
        for phrase in self.resources.multiword_prepositions:
            if tuple(words[i : i + len(phrase)]) == phrase:
                return phrase
        return None

    def _chunk_np(self, i: int) -> Optional[Tuple[int, int, List[int]]]:
        """Det* (Adj|Num|participle)* Noun+ starting at i.

        Returns (first noun, end, modifier positions) or None.
        """
        tokens = self.tokens
        n = len(tokens)
        j = i
        while j < n and tokens[j].tag == TokenTag.DET:
            j += 1
        modifiers: List[int] = []
        while j < n:
            token = tokens[j]
            if token.tag in (TokenTag.ADJ, TokenTag.NUM) or token.lemma in _INTENSIFIERS:
                modifiers.append(j)
            elif (
                token.tag == TokenTag.VERB
                and token.lemma not in AUXILIARIES
                and j > i
                and j + 1 < n
                and tokens[j + 1].tag in (TokenTag.NOUN, TokenTag.ADJ)
            ):
                modifiers.append(j)  # "the parked car"
            else:
                break
            j += 1
        first_noun = j
        while j < n and tokens[j].tag == TokenTag.NOUN and self._match_preposition(j) is None:
            j += 1
        if j == first_noun:
            return None
        return first_noun, j, modifiers

    def _add_np(self, nouns: List[int], modifiers: Iterable[int]) -> int:
        # Compound nouns keep their modifier surfaces and lemmatize the head.
        parts = [self.tokens[j].surface.lower() for j in nouns[:-1]]
        parts.append(self.tokens[nouns[-1]].lemma)
        obj = self._object_for(" ".join(parts), nouns[0])
        for j in modifiers:
            token = self.tokens[j]
            if token.tag in (TokenTag.ADJ, TokenTag.VERB):
                self._add_attribute(obj, token.premise_form, j, predicative=False)
        return obj

    def _build_units(self) -> List[_Unit]:
        tokens = self.tokens
        n = len(tokens)
        wh_question = tokens[0].tag == TokenTag.WH
        units: List[_Unit] = []
        front_next = False
        i = 0
        while i < n:
            token = tokens[i]
            phrase = self._match_preposition(i)
            if phrase is not None:
                units.append(_Unit("prep", i, " ".join(phrase)))
                i += len(phrase)
                continue
            if token.tag == TokenTag.POSS:
                units.append(_Unit("poss", i))
                i += 1
                continue

            chunk = self._chunk_np(i)
            if chunk is not None:
                first_noun, end, modifiers = chunk
                nouns = list(range(first_noun, end))
                after_wh = i > 0 and tokens[i - 1].tag == TokenTag.WH
                head = tokens[nouns[0]]
                if (
                    wh_question
                    and len(nouns) > 1
                    and tokens[nouns[-1]].lemma in self.resources.abstraction
                ):
                    nouns = nouns[:-1]  # "the girl's shirt color"
                    head = tokens[nouns[0]]
                if wh_question and head.lemma in self.resources.abstraction:
                    if len(nouns) > 1 and after_wh:
                        nouns = nouns[1:]  # "what color shirt"
                    else:
                        following = tokens[end] if end < n else None
                        if following is None or following.tag == TokenTag.VERB:
                            i = end
                            continue
                        if following.lemma == "of":
                            front_next = after_wh
                            i = end + 1
                            continue
                obj = self._add_np(nouns, modifiers)
                units.append(_Unit("np", i, obj=obj, fronted=front_next or after_wh))
                front_next = False
                i = end
                continue

            if token.tag == TokenTag.VERB:
                kind = "aux" if token.lemma in AUXILIARIES else "verb"
            elif token.tag == TokenTag.PREP:
                kind = "prep"
            elif token.tag == TokenTag.ADJ:
                kind = "adj"
            elif token.tag == TokenTag.WH:
                kind = "wh"
            else:
                kind = "other"
            units.append(_Unit(kind, i, token.premise_form))
            i += 1
        return units

    # -- edges -------------------------------------------------------------

    @staticmethod
    def _subject_before(units: List[_Unit], k: int) -> Optional[_Unit]:
        j = k - 1
        while j >= 0:
            unit = units[j]
            if unit.kind == "np":
                # Skip the object of a preposition when a head noun precedes it;
                # "of" binds its noun to the head, so the verb takes the nearer one.
                if (
                    j >= 2
                    and units[j - 1].kind == "prep"
                    and units[j - 1].text not in _BINDING_PREPOSITIONS
                    and any(u.kind == "np" for u in units[: j - 1])
                ):
                    j -= 2
                    continue
                return unit
            j -= 1
        return None

    def _link(self, units: List[_Unit]) -> None:
        fronted = next((u for u in units if u.kind == "np" and u.fronted), None)
        for k, unit in enumerate(units):
            following = units[k + 1] if k + 1 < len(units) else None

            if unit.kind == "poss":
                if k > 0 and units[k - 1].kind == "np" and following and following.kind == "np":
                    self._add_relation(
                        units[k - 1].obj, "has", following.obj, unit.position, possessive=True
                    )

            elif unit.kind == "verb":
                subject = self._subject_before(units, k)
                if subject is None:
                    continue
                if (
                    following is not None
                    and following.kind == "np"
                    and following.obj != subject.obj
                ):
                    self._add_relation(
                        subject.obj, unit.text, following.obj, unit.position, predicative=True
                    )
                elif (
                    following is not None
                    and following.kind == "prep"
                    and k + 2 < len(units)
                    and units[k + 2].kind == "np"
                    and units[k + 2].obj != subject.obj
                ):
                    self._add_relation(
                        subject.obj,
                        f"{unit.text} {following.text}",
                        units[k + 2].obj,
                        unit.position,
                        predicative=True,
                    )
                elif fronted is not None and fronted.obj != subject.obj:
                    # The fronted wh phrase is this verb's object; order it here.
                    self._add_relation(
                        subject.obj, unit.text, fronted.obj, unit.position, predicative=True
                    )
                    self.objects[fronted.obj].position = unit.position
                    fronted = None
                else:
                    self._add_attribute(subject.obj, unit.text, unit.position, predicative=True)

            elif unit.kind == "prep":
                if unit.text == "of" or following is None or following.kind != "np":
                    continue
                j = k - 1
                copular = False
                while j >= 0 and (
                    units[j].kind == "aux" or (units[j].kind == "other" and units[j].text == "not")
                ):
                    copular = True
                    j -= 1
                if j >= 0 and units[j].kind == "np":
                    self._add_relation(
                        units[j].obj, unit.text, following.obj, unit.position, predicative=copular
                    )

            elif unit.kind == "adj":
                j = k - 1
                while j >= 0 and (
                    units[j].kind in ("aux", "adj")
                    or (units[j].kind == "other" and units[j].text in _PREDICATE_LINKS)
                ):
                    j -= 1
                if j >= 0 and units[j].kind == "np":
                    self._add_attribute(units[j].obj, unit.text, unit.position, predicative=True)

    def build(self) -> SceneGraph:
        self._link(self._build_units())
        return SceneGraph(
            objects=self.objects, attributes=self.attributes, relations=self.relations
        )


def parse_scene_graph(
    tokens: Sequence[Token], resources: Optional[Resources] = None
) -> SceneGraph:
    """Parse tagged tokens into objects, attribute edges and relation edges."""
    if not tokens:
        return SceneGraph()
    return _GraphBuilder(tokens, resources or load_resources()).build()


def graph_to_premises(graph: SceneGraph, drop_predicative: bool = False) -> List[Premise]:
    """Convert a scene graph into premises, first order first, each in token order."""
    objects = graph.objects
    first = [
        Premise.of(node.lemma)
        for _, node in sorted(enumerate(objects), key=lambda item: (item[1].position, item[0]))
    ]
    second = [
        Premise.of(objects[a.object].lemma, a.lemma)
        for a in sorted(graph.attributes, key=lambda a: a.position)
        if not (drop_predicative and a.predicative)
    ]
    third = [
        Premise.of(objects[r.subject].lemma, r.lemma, objects[r.object].lemma)
        for r in sorted(graph.relations, key=lambda r: r.position)
        if not (drop_predicative and r.predicative)
    ]
    return first + second + third


def filter_premises(premises: Iterable[Premise], stoplist: Iterable[str]) -> List[Premise]:
    """Drop premises mentioning a stoplist word and repeated premises."""
    stop = set(stoplist)
    seen: Set[Premise] = set()
    kept: List[Premise] = []
    for premise in premises:
        if premise in seen or any(word in stop for word in premise.words()):
            continue
        seen.add(premise)
        kept.append(premise)
    return kept


def extract_premises(
    question: Union[Question, str],
    strict: bool = True,
    resources: Optional[Resources] = None,
) -> List[Premise]:
    """Run the full pipeline on one question.

    Args:
        question: A Question or raw question text.
        strict: Return nothing for existential and counting questions. When
            False those questions are kept, but the answer-dependent predicate
            of a polar question ("moving" in "Is the girl moving?") is dropped.
        resources: Parser resources; the bundled set when omitted.

    Returns:
        Canonical premises, first order first, each in question token order.
    """
    resources = resources or load_resources()
    text = question.text if isinstance(question, Question) else question
    tokens = tokenize_and_tag(text, resources.lexicon)
    kind = classify_question(tokens)
    if strict and kind in (QuestionClass.EXISTENTIAL, QuestionClass.COUNTING):
        return []
    graph = parse_scene_graph(tokens, resources)
    premises = graph_to_premises(graph, drop_predicative=kind == QuestionClass.EXISTENTIAL)
    return filter_premises(premises, resources.stoplist)


def parse_premise(text: str) -> Premise:
    """Parse the canonical ``<a>`` / ``<a, b>`` / ``<a, b, c>`` form."""
    stripped = text.strip()
    if not (stripped.startswith("<") and stripped.endswith(">")):
        raise ValueError(f"not a canonical premise: {text!r}")
    parts = [part for part in stripped[1:-1].split(", ")]
    if not 1 <= len(parts) <= 3 or any(not part.strip() for part in parts):
        raise PremiseArityError(f"{len(parts)} parts in {text!r}")
    return Premise.from_canonical(stripped)
