"""Tests for the lexicon module."""

import pytest

from src.config import ResourceConfig
from src.errors import CorpusFormatError
from src.lexicon import TagLexicon, load_resources, read_word_list
from src.schemas import TokenTag


class TestTagLexicon:
    """Tests for word lookup."""

    @pytest.mark.parametrize(
        "word,expected",
        [
            ("dog", ("dog", TokenTag.NOUN)),
            ("dogs", ("dog", TokenTag.NOUN)),
            ("men", ("man", TokenTag.NOUN)),
            ("holding", ("hold", TokenTag.VERB)),
            ("sitting", ("sit", TokenTag.VERB)),
            ("riding", ("ride", TokenTag.VERB)),
            ("held", ("hold", TokenTag.VERB)),
            ("red", ("red", TokenTag.ADJ)),
            ("colorful", ("colorful", TokenTag.ADJ)),
            ("fluffy", ("fluffy", TokenTag.ADJ)),
            ("sleeping", ("sleep", TokenTag.VERB)),
            ("the", ("the", TokenTag.DET)),
            ("what", ("what", TokenTag.WH)),
        ],
    )
    def test_bundled_lookup(self, resources, word, expected):
        assert resources.lexicon.lookup(word) == expected

    def test_comparative_keeps_surface(self, resources):
        assert resources.lexicon.lookup("bigger") == ("bigger", TokenTag.ADJ)

    def test_unknown_words_fall_back(self, resources):
        assert resources.lexicon.lookup("zorbing") == ("zorb", TokenTag.VERB)
        assert resources.lexicon.lookup("widgets") == ("widget", TokenTag.NOUN)
        assert resources.lexicon.lookup("1234") == ("1234", TokenTag.NUM)

    def test_first_entry_wins(self, write_lines):
        path = write_lines("lexicon.tsv", ["# header", "walk\tVerb", "walk\tNoun"])
        lexicon = TagLexicon.load(path)
        assert lexicon.tag_of("walk") == TokenTag.VERB
        assert len(lexicon) == 1

    def test_unknown_tag(self, write_lines):
        path = write_lines("lexicon.tsv", ["walk\tAdverb"])
        with pytest.raises(CorpusFormatError, match="unknown tag"):
            TagLexicon.load(path)

    def test_missing_tab(self, write_lines):
        path = write_lines("lexicon.tsv", ["walk Verb"])
        with pytest.raises(CorpusFormatError, match=":1:"):
            TagLexicon.load(path)

    def test_bundled_size(self, resources):
        assert len(resources.lexicon) > 4500


class TestResources:
    """Tests for the bundled resource set."""

    def test_word_lists(self, resources):
        assert resources.is_color("red")
        assert not resources.is_color("big")
        assert resources.is_animate("man")
        assert resources.is_animate("tennis player")
        assert not resources.is_animate("car")
        assert resources.is_verbal("walking")
        assert not resources.is_verbal("red")
        assert "photo" in resources.stoplist
        assert "brand" in resources.abstraction

    def test_loaded_once_per_paths(self):
        assert load_resources() is load_resources(ResourceConfig())

    def test_read_word_list(self, write_lines):
        path = write_lines("words.txt", ["# comment", "Red", "", "light  blue"])
        assert read_word_list(path) == frozenset({"red", "light blue"})

    def test_missing_word_list(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            read_word_list(tmp_path / "absent.txt")
