"""Shared fixtures: bundled resources and the checked-in toy corpora."""

import json
from pathlib import Path
from typing import Dict, List

import pytest

from src.annotation_store import AnnotationStore, load_annotations
from src.corpus_io import read_jsonl, read_questions
from src.features import FeatureStore
from src.lexicon import Resources, load_resources
from src.schemas import QrpeTuple, Question

FIXTURES = Path(__file__).parent / "fixtures"


class ToyCorpus:
    """One fixture directory loaded into pipeline objects."""

    def __init__(self, name: str):
        self.root = FIXTURES / name
        self.questions_path = self.root / "questions.jsonl"
        self.objects_path = self.root / "objects.jsonl"
        self.attributes_path = self.root / "attributes.jsonl"
        self.expected_path = self.root / "expected_tuples.jsonl"
        self.questions: List[Question] = read_questions(self.questions_path)
        self.store: AnnotationStore = load_annotations(self.objects_path, self.attributes_path)
        with open(self.root / "features.json", encoding="utf-8") as f:
            raw: Dict[str, List[float]] = json.load(f)
        self.features = FeatureStore.from_dict({int(k): v for k, v in raw.items()})
        self.expected: List[QrpeTuple] = read_jsonl(self.expected_path, QrpeTuple)

    def write_features(self, directory: Path) -> Path:
        path = directory / f"{self.root.name}.pfv"
        self.features.save(path)
        return path


@pytest.fixture(scope="session")
def resources() -> Resources:
    return load_resources()


@pytest.fixture(scope="session")
def toy_a() -> ToyCorpus:
    return ToyCorpus("toy_a")


@pytest.fixture(scope="session")
def toy_b() -> ToyCorpus:
    return ToyCorpus("toy_b")


@pytest.fixture(scope="session")
def toy_c() -> ToyCorpus:
    return ToyCorpus("toy_c")


@pytest.fixture
def write_lines(tmp_path):
    """Write text lines to a file under tmp_path and return its path."""

    def _write(name: str, lines: List[str]) -> Path:
        path = tmp_path / name
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        return path

    return _write
