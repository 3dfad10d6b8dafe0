"""
Precomputed image features and word embeddings.

Feature file layout (little-endian):

    b"PFV1" | u32 dim | u32 count | count x (u64 image_id, dim x f32)

Embedding tables are UTF-8 text, one ``token v1 v2 ... vd`` line per token.
"""

import logging
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Union

import numpy as np

from .errors import CorpusFormatError, FeatureFormatError, MissingFeatureError

logger = logging.getLogger(__name__)

FEATURE_MAGIC = b"PFV1"
_HEADER = np.dtype([("magic", "S4"), ("dim", "<u4"), ("count", "<u4")])

PathLike = Union[str, Path]


def _record_dtype(dim: int) -> np.dtype:
    return np.dtype([("image_id", "<u8"), ("vector", "<f4", (dim,))])


class FeatureStore:
    """Image id to fixed-length vector, held as one float64 matrix."""

    def __init__(self, image_ids: Sequence[int], matrix: np.ndarray):
        matrix = np.asarray(matrix, dtype=np.float64)
        if matrix.ndim != 2 or matrix.shape[1] == 0:
            raise FeatureFormatError(f"expected a non-empty 2-D matrix, got shape {matrix.shape}")
        if len(image_ids) != matrix.shape[0]:
            raise FeatureFormatError(
                f"{len(image_ids)} image ids for {matrix.shape[0]} vectors"
            )
        if not np.all(np.isfinite(matrix)):
            raise FeatureFormatError("feature vectors contain non-finite values")
        self._rows: Dict[int, int] = {}
        for row, image_id in enumerate(image_ids):
            image_id = int(image_id)
            if image_id in self._rows:
                raise FeatureFormatError(f"duplicate feature vector for image {image_id}")
            self._rows[image_id] = row
        self._matrix = matrix
        self._matrix.setflags(write=False)

    @classmethod
    def from_dict(
        cls, vectors: Mapping[int, Sequence[float]], dim: Optional[int] = None
    ) -> "FeatureStore":
        ids = sorted(vectors)
        if not ids:
            if dim is None:
                raise FeatureFormatError("cannot infer dimension of an empty feature store")
            return cls([], np.zeros((0, dim)))
        return cls(ids, np.array([np.asarray(vectors[i], dtype=np.float64) for i in ids]))

    @classmethod
    def load(cls, path: PathLike, normalize: bool = False) -> "FeatureStore":
        path = Path(path)
        if not path.exists():
            raise FileNotFoundError(f"Feature file not found: {path}")
        data = path.read_bytes()
        if len(data) < _HEADER.itemsize:
            raise FeatureFormatError(f"{path}: truncated header")
        header = np.frombuffer(data, dtype=_HEADER, count=1)[0]
        if bytes(header["magic"]) != FEATURE_MAGIC:
            raise FeatureFormatError(f"{path}: bad magic {bytes(header['magic'])!r}")
        dim, count = int(header["dim"]), int(header["count"])
        if dim == 0:
            raise FeatureFormatError(f"{path}: dimension must be positive")
        records_dtype = _record_dtype(dim)
        expected = _HEADER.itemsize + count * records_dtype.itemsize
        if len(data) != expected:
            raise FeatureFormatError(
                f"{path}: expected {expected} bytes for {count} vectors of dim {dim}, "
                f"got {len(data)}"
            )
        records = np.frombuffer(data, dtype=records_dtype, count=count, offset=_HEADER.itemsize)
        matrix = records["vector"].astype(np.float64).reshape(count, dim)
        try:
            store = cls(records["image_id"].tolist(), matrix)
        except FeatureFormatError as e:
            raise FeatureFormatError(f"{path}: {e}") from e
        logger.info("Loaded %d feature vectors of dim %d from %s", count, dim, path)
        return store.normalized() if normalize else store

    def save(self, path: PathLike) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        header = np.zeros(1, dtype=_HEADER)
        header["magic"] = FEATURE_MAGIC
        header["dim"] = self.dim
        header["count"] = len(self)
        records = np.zeros(len(self), dtype=_record_dtype(self.dim))
        ids = self.image_ids
        records["image_id"] = ids
        records["vector"] = self._matrix[[self._rows[i] for i in ids]].astype(np.float32)
        with open(path, "wb") as f:
            f.write(header.tobytes())
            f.write(records.tobytes())

    @property
    def dim(self) -> int:
        return int(self._matrix.shape[1])

    @property
    def image_ids(self) -> List[int]:
        return sorted(self._rows)

    def __len__(self) -> int:
        return len(self._rows)

    def __contains__(self, image_id: object) -> bool:
        return image_id in self._rows

    def vector(self, image_id: int) -> np.ndarray:
        row = self._rows.get(image_id)
        if row is None:
            raise MissingFeatureError(image_id)
        return self._matrix[row]

    def distance(self, a: int, b: int) -> float:
        return float(np.linalg.norm(self.vector(a) - self.vector(b)))

    def distances(self, origin: int, others: Sequence[int]) -> np.ndarray:
        """Euclidean distances from one image to each of ``others``, in order."""
        anchor = self.vector(origin)
        if not others:
            return np.zeros(0)
        block = np.stack([self.vector(image_id) for image_id in others])
        return np.linalg.norm(block - anchor, axis=1)

    def normalized(self) -> "FeatureStore":
        """Copy with every vector scaled to unit L2 norm; zero vectors stay zero."""
        norms = np.linalg.norm(self._matrix, axis=1, keepdims=True)
        scaled = np.divide(self._matrix, norms, out=np.zeros_like(self._matrix), where=norms > 0)
        ids = sorted(self._rows, key=self._rows.__getitem__)
        return FeatureStore(ids, scaled)


class EmbeddingTable:
    """Word vectors for question encoding and similarity."""

    def __init__(self, vectors: Mapping[str, Sequence[float]], dim: Optional[int] = None):
        self._vectors: Dict[str, np.ndarray] = {}
        for token, values in vectors.items():
            array = np.asarray(values, dtype=np.float64)
            if dim is None:
                dim = int(array.shape[0])
            if array.shape != (dim,):
                raise ValueError(
                    f"embedding for {token!r} has shape {array.shape}, expected ({dim},)"
                )
            self._vectors[token] = array
        if dim is None or dim <= 0:
            raise ValueError("embedding dimension must be positive")
        self._dim = dim

    @classmethod
    def load(cls, path: PathLike) -> "EmbeddingTable":
        path = Path(path)
        if not path.exists():
            raise FileNotFoundError(f"Embedding file not found: {path}")
        vectors: Dict[str, List[float]] = {}
        dim: Optional[int] = None
        with open(path, encoding="utf-8") as f:
            for line_number, line in enumerate(f, start=1):
                fields = line.split()
                if not fields:
                    continue
                if len(fields) < 2:
                    raise CorpusFormatError(path, line_number, "expected 'token v1 ... vd'")
                try:
                    values = [float(v) for v in fields[1:]]
                except ValueError as e:
                    raise CorpusFormatError(path, line_number, "non-numeric vector entry") from e
                if dim is None:
                    dim = len(values)
                elif len(values) != dim:
                    raise CorpusFormatError(
                        path, line_number, f"expected {dim} values, found {len(values)}"
                    )
                vectors[fields[0]] = values
        if dim is None:
            raise CorpusFormatError(path, None, "embedding file is empty")
        logger.info("Loaded %d embeddings of dim %d from %s", len(vectors), dim, path)
        return cls(vectors, dim)

    def save(self, path: PathLike) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            for token in sorted(self._vectors):
                values = " ".join(repr(float(v)) for v in self._vectors[token])
                f.write(f"{token} {values}\n")

    @property
    def dim(self) -> int:
        return self._dim

    def __contains__(self, token: object) -> bool:
        return token in self._vectors

    def __len__(self) -> int:
        return len(self._vectors)

    def vector(self, token: str) -> Optional[np.ndarray]:
        return self._vectors.get(token)

    def mean_vector(self, tokens: Iterable[str]) -> np.ndarray:
        """Mean of in-vocabulary token vectors; all out-of-vocabulary gives zeros."""
        found = [self._vectors[token] for token in tokens if token in self._vectors]
        if not found:
            return np.zeros(self._dim)
        return np.mean(found, axis=0)
