"""Tests for the features module."""

import numpy as np
import pytest

from src.errors import CorpusFormatError, FeatureFormatError, MissingFeatureError
from src.features import FEATURE_MAGIC, EmbeddingTable, FeatureStore


@pytest.fixture
def store():
    return FeatureStore.from_dict({3: [3.0, 4.0], 1: [0.0, 0.0], 2: [1.0, 0.0]})


class TestFeatureStore:
    """Tests for in-memory feature access."""

    def test_ids_sorted(self, store):
        assert store.image_ids == [1, 2, 3]
        assert store.dim == 2
        assert len(store) == 3
        assert 2 in store
        assert 9 not in store

    def test_distance(self, store):
        assert store.distance(1, 3) == pytest.approx(5.0)

    def test_distances_follow_input_order(self, store):
        np.testing.assert_allclose(store.distances(1, [3, 2]), [5.0, 1.0])

    def test_missing_vector(self, store):
        with pytest.raises(MissingFeatureError, match="image 9"):
            store.vector(9)

    def test_vectors_are_read_only(self, store):
        with pytest.raises(ValueError):
            store.vector(1)[0] = 7.0

    def test_rejects_non_finite(self):
        with pytest.raises(FeatureFormatError, match="non-finite"):
            FeatureStore.from_dict({1: [np.nan, 0.0]})

    def test_rejects_duplicate_ids(self):
        with pytest.raises(FeatureFormatError, match="duplicate"):
            FeatureStore([1, 1], np.zeros((2, 2)))

    def test_rejects_ragged_vectors(self):
        with pytest.raises(ValueError):
            FeatureStore.from_dict({1: [0.0, 1.0], 2: [0.0]})

    def test_normalized_keeps_zero_vectors(self, store):
        unit = store.normalized()
        np.testing.assert_allclose(unit.vector(3), [0.6, 0.8])
        np.testing.assert_allclose(unit.vector(1), [0.0, 0.0])


class TestFeatureFile:
    """Tests for the binary feature file format."""

    def test_save_and_load(self, store, tmp_path):
        path = tmp_path / "features.pfv"
        store.save(path)
        loaded = FeatureStore.load(path)
        assert loaded.image_ids == store.image_ids
        np.testing.assert_allclose(loaded.vector(3), [3.0, 4.0])

    def test_file_size(self, store, tmp_path):
        path = tmp_path / "features.pfv"
        store.save(path)
        # 12-byte header plus (8 + 2 * 4) bytes per record.
        assert path.stat().st_size == 12 + 3 * 16
        assert path.read_bytes()[:4] == FEATURE_MAGIC

    def test_load_normalized(self, store, tmp_path):
        path = tmp_path / "features.pfv"
        store.save(path)
        loaded = FeatureStore.load(path, normalize=True)
        assert np.linalg.norm(loaded.vector(3)) == pytest.approx(1.0)

    def test_bad_magic(self, store, tmp_path):
        path = tmp_path / "features.pfv"
        store.save(path)
        path.write_bytes(b"XXXX" + path.read_bytes()[4:])
        with pytest.raises(FeatureFormatError, match="bad magic"):
            FeatureStore.load(path)

    def test_truncated_payload(self, store, tmp_path):
        path = tmp_path / "features.pfv"
        store.save(path)
        path.write_bytes(path.read_bytes()[:-3])
        with pytest.raises(FeatureFormatError, match="expected"):
            FeatureStore.load(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            FeatureStore.load(tmp_path / "absent.pfv")


class TestEmbeddingTable:
    """Tests for word embeddings."""

    def test_mean_vector_ignores_unknown_tokens(self):
        table = EmbeddingTable({"dog": [1.0, 0.0], "cat": [0.0, 1.0]})
        np.testing.assert_allclose(table.mean_vector(["dog", "cat", "zebra"]), [0.5, 0.5])

    def test_all_unknown_gives_zeros(self):
        table = EmbeddingTable({"dog": [1.0, 0.0]})
        np.testing.assert_allclose(table.mean_vector(["zebra"]), [0.0, 0.0])

    def test_load_text_file(self, write_lines):
        path = write_lines("emb.txt", ["dog 1.0 2.0", "", "cat 0.5 -1.5"])
        table = EmbeddingTable.load(path)
        assert table.dim == 2
        assert len(table) == 2
        np.testing.assert_allclose(table.vector("cat"), [0.5, -1.5])

    def test_save_and_load(self, tmp_path):
        table = EmbeddingTable({"dog": [0.1, 0.2]})
        path = tmp_path / "emb.txt"
        table.save(path)
        np.testing.assert_array_equal(EmbeddingTable.load(path).vector("dog"), [0.1, 0.2])

    def test_inconsistent_dimension(self, write_lines):
        path = write_lines("emb.txt", ["dog 1.0 2.0", "cat 0.5"])
        with pytest.raises(CorpusFormatError, match=":2:"):
            EmbeddingTable.load(path)

    def test_non_numeric_entry(self, write_lines):
        path = write_lines("emb.txt", ["dog 1.0 two"])
        with pytest.raises(CorpusFormatError, match="non-numeric"):
            EmbeddingTable.load(path)

    def test_empty_file(self, write_lines):
        path = write_lines("emb.txt", [""])
        with pytest.raises(CorpusFormatError, match="empty"):
            EmbeddingTable.load(path)
