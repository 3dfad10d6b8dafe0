"""
Tag lexicon and word-list resources for the shallow question parser.

Words are tagged from the bundled ``lemma<TAB>tag`` lexicon first; unknown
words are resolved with irregular-form tables and suffix rules, and whatever
is still unknown falls back to a tag guessed from its ending.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple, Union

from .config import ResourceConfig
from .errors import CorpusFormatError
from .schemas import TokenTag

logger = logging.getLogger(__name__)

AUXILIARIES = frozenset(
    {
        "is", "are", "was", "were", "am", "be", "been", "being",
        "do", "does", "did", "can", "could", "will", "would", "should",
        "shall", "may", "might", "must", "has", "have", "had",
    }
)

PRONOUNS = frozenset(
    {"it", "he", "she", "they", "we", "i", "you", "that", "this", "there", "here", "who"}
)

# Longest first so "on the side of" wins over "on".
MULTIWORD_PREPOSITIONS: Tuple[Tuple[str, ...], ...] = (
    ("on", "the", "side", "of"),
    ("in", "the", "middle", "of"),
    ("on", "top", "of"),
    ("in", "front", "of"),
    ("in", "back", "of"),
    ("on", "the", "back", "of"),
    ("next", "to"),
    ("close", "to"),
    ("inside", "of"),
    ("out", "of"),
)

IRREGULAR_PLURALS = {
    "men": "man",
    "women": "woman",
    "children": "child",
    "feet": "foot",
    "teeth": "tooth",
    "mice": "mouse",
    "geese": "goose",
    "knives": "knife",
    "leaves": "leaf",
    "shelves": "shelf",
    "wolves": "wolf",
    "loaves": "loaf",
    "calves": "calf",
    "halves": "half",
    "policemen": "policeman",
    "gentlemen": "gentleman",
    "oxen": "ox",
    "dice": "die",
}

IRREGULAR_VERBS = {
    "lying": "lie",
    "dying": "die",
    "tying": "tie",
    "held": "hold",
    "sat": "sit",
    "stood": "stand",
    "worn": "wear",
    "wore": "wear",
    "made": "make",
    "taken": "take",
    "took": "take",
    "eaten": "eat",
    "ate": "eat",
    "ridden": "ride",
    "rode": "ride",
    "thrown": "throw",
    "threw": "throw",
    "flown": "fly",
    "flew": "fly",
    "seen": "see",
    "saw": "see",
    "done": "do",
    "gone": "go",
    "went": "go",
    "hung": "hang",
    "caught": "catch",
    "bought": "buy",
    "sold": "sell",
    "led": "lead",
    "fed": "feed",
    "ran": "run",
    "drank": "drink",
    "drunk": "drink",
    "sang": "sing",
    "swam": "swim",
    "hid": "hide",
    "hidden": "hide",
    "bitten": "bite",
    "driven": "drive",
    "drove": "drive",
    "written": "write",
    "laid": "lay",
}

_INVARIANT_S_ENDINGS = ("ss", "us", "is", "os")


def _noun_candidates(word: str) -> List[str]:
    candidates: List[str] = []
    if word.endswith("ies") and len(word) > 4:
        candidates.append(word[:-3] + "y")
    if word.endswith("ves") and len(word) > 4:
        candidates.extend([word[:-3] + "f", word[:-3] + "fe"])
    if word.endswith("es") and len(word) > 3:
        candidates.append(word[:-2])
    if word.endswith("s") and not word.endswith(_INVARIANT_S_ENDINGS) and len(word) > 2:
        candidates.append(word[:-1])
    return candidates


def _verb_candidates(word: str) -> List[str]:
    candidates: List[str] = []
    for suffix in ("ing", "ed"):
        if word.endswith(suffix) and len(word) > len(suffix) + 1:
            stem = word[: -len(suffix)]
            candidates.append(stem)
            if len(stem) > 2 and stem[-1] == stem[-2]:
                candidates.append(stem[:-1])  # sitting -> sit
            candidates.append(stem + "e")  # riding -> ride
            if suffix == "ed" and stem.endswith("i"):
                candidates.append(stem[:-1] + "y")  # carried -> carry
    if word.endswith("ies") and len(word) > 4:
        candidates.append(word[:-3] + "y")
    if word.endswith("es") and len(word) > 3:
        candidates.append(word[:-2])
    if word.endswith("s") and not word.endswith("ss") and len(word) > 2:
        candidates.append(word[:-1])
    return candidates


def _comparative_candidates(word: str) -> List[str]:
    candidates: List[str] = []
    for suffix in ("est", "er"):
        if word.endswith(suffix) and len(word) > len(suffix) + 2:
            stem = word[: -len(suffix)]
            candidates.extend([stem, stem + "e"])
            if stem[-1] == stem[-2]:
                candidates.append(stem[:-1])  # bigger -> big
            if stem.endswith("i"):
                candidates.append(stem[:-1] + "y")  # happier -> happy
    return candidates


def _strip_plural(word: str) -> str:
    if word.endswith("ies") and len(word) > 4:
        return word[:-3] + "y"
    if word.endswith(("ses", "xes", "zes", "ches", "shes")):
        return word[:-2]
    if word.endswith("s") and not word.endswith(_INVARIANT_S_ENDINGS) and len(word) > 2:
        return word[:-1]
    return word


class TagLexicon:
    """Maps lemmas to coarse tags and resolves inflected forms."""

    def __init__(self, entries: Dict[str, TokenTag]):
        self._entries = dict(entries)

    @classmethod
    def load(cls, path: Union[str, Path]) -> "TagLexicon":
        path = Path(path)
        if not path.exists():
            raise FileNotFoundError(f"Lexicon file not found: {path}")
        entries: Dict[str, TokenTag] = {}
        with open(path, encoding="utf-8") as f:
            for line_number, line in enumerate(f, start=1):
                stripped = line.strip()
                if not stripped or stripped.startswith("#"):
                    continue
                parts = stripped.split("\t")
                if len(parts) != 2:
                    raise CorpusFormatError(path, line_number, "expected lemma<TAB>tag")
                lemma, tag_name = parts[0].strip().lower(), parts[1].strip()
                try:
                    tag = TokenTag(tag_name)
                except ValueError:
                    raise CorpusFormatError(path, line_number, f"unknown tag {tag_name!r}")
                entries.setdefault(lemma, tag)
        logger.debug("Loaded %d lexicon entries from %s", len(entries), path)
        return cls(entries)

    def __contains__(self, lemma: str) -> bool:
        return lemma in self._entries

    def __len__(self) -> int:
        return len(self._entries)

    def tag_of(self, lemma: str) -> Optional[TokenTag]:
        return self._entries.get(lemma)

    def _resolve(self, candidates: Iterable[str], tag: TokenTag) -> Optional[str]:
        for candidate in candidates:
            if self._entries.get(candidate) == tag:
                return candidate
        return None

    def lookup(self, word: str) -> Tuple[str, TokenTag]:
        """Return (lemma, tag) for a lowercase word.

        Order: exact entry, irregular plurals, irregular verb forms, plural
        suffixes against noun entries, verbal suffixes against verb entries,
        then the unresolved fallback.
        """
        word = word.lower()
        tag = self._entries.get(word)
        if tag is not None:
            return word, tag
        if word in IRREGULAR_PLURALS:
            return IRREGULAR_PLURALS[word], TokenTag.NOUN
        if word in IRREGULAR_VERBS:
            return IRREGULAR_VERBS[word], TokenTag.VERB

        noun = self._resolve(_noun_candidates(word), TokenTag.NOUN)
        if noun is not None:
            return noun, TokenTag.NOUN
        verb = self._resolve(_verb_candidates(word), TokenTag.VERB)
        if verb is not None:
            return verb, TokenTag.VERB
        # Comparatives keep their surface as lemma: "bigger" is not "big".
        if self._resolve(_comparative_candidates(word), TokenTag.ADJ) is not None:
            return word, TokenTag.ADJ

        if word.isdigit():
            return word, TokenTag.NUM
        if (word.endswith("ing") and len(word) > 4) or (word.endswith("ed") and len(word) > 3):
            return _verb_candidates(word)[0], TokenTag.VERB
        return _strip_plural(word), TokenTag.NOUN


def read_word_list(path: Union[str, Path]) -> FrozenSet[str]:
    """One lowercase entry per line; blank lines and ``#`` comments skipped."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Word list not found: {path}")
    words = set()
    with open(path, encoding="utf-8") as f:
        for line in f:
            stripped = line.strip()
            if stripped and not stripped.startswith("#"):
                words.add(" ".join(stripped.lower().split()))
    return frozenset(words)


@dataclass(frozen=True)
class Resources:
    """Immutable bundle of everything the parser and generator look up."""

    lexicon: TagLexicon
    stoplist: FrozenSet[str]
    abstraction: FrozenSet[str]
    colors: FrozenSet[str]
    animate: FrozenSet[str]
    multiword_prepositions: Tuple[Tuple[str, ...], ...] = MULTIWORD_PREPOSITIONS

    def is_color(self, lemma: str) -> bool:
        return lemma in self.colors

    def is_animate(self, lemma: str) -> bool:
        # Compounds take the animacy of their head noun.
        return lemma in self.animate or lemma.split()[-1] in self.animate

    def is_verbal(self, word: str) -> bool:
        return self.lexicon.lookup(word)[1] == TokenTag.VERB


@lru_cache(maxsize=8)
def _load_cached(
    lexicon: Path, stoplist: Path, abstraction: Path, colors: Path, animate: Path
) -> Resources:
    return Resources(
        lexicon=TagLexicon.load(lexicon),
        stoplist=read_word_list(stoplist),
        abstraction=read_word_list(abstraction),
        colors=read_word_list(colors),
        animate=read_word_list(animate),
    )


def load_resources(config: Optional[ResourceConfig] = None) -> Resources:
    """Load (once per set of paths) the parser resources."""
    config = config or ResourceConfig()
    return _load_cached(
        Path(config.lexicon),
        Path(config.stoplist),
        Path(config.abstraction),
        Path(config.colors),
        Path(config.animate),
    )
