"""
Exception types raised across the premise-forge pipeline.

Every error a caller can act on derives from PremiseForgeError, which is a
ValueError so plain ``except ValueError`` handlers keep working. The CLI maps
these to exit code 2 (data error).
"""

from pathlib import Path
from typing import Optional, Union


class PremiseForgeError(ValueError):
    """Base class for data and configuration errors."""


class ConfigError(PremiseForgeError):
    """Invalid configuration file, key or referenced path."""


class CorpusFormatError(PremiseForgeError):
    """A corpus or resource file contains a malformed record."""

    def __init__(
        self,
        path: Union[str, Path],
        line_number: Optional[int],
        message: str,
    ):
        self.path = str(path)
        self.line_number = line_number
        location = f"{self.path}:{line_number}" if line_number else self.path
        super().__init__(f"{location}: {message}")


class EmptyQuestionError(PremiseForgeError):
    def __init__(self) -> None:
        super().__init__("empty question")


class PremiseArityError(PremiseForgeError):
    def __init__(self, detail: str = "") -> None:
        message = "bad premise arity"
        super().__init__(f"{message}: {detail}" if detail else message)


class UnsupportedPremiseOrderError(PremiseForgeError):
    def __init__(self, order: int, message: str = "unsupported premise order") -> None:
        self.order = order
        super().__init__(f"{message}: {order}")


class FeatureFormatError(PremiseForgeError):
    """Feature file has a bad header, truncated payload or non-finite values."""


class MissingFeatureError(PremiseForgeError):
    def __init__(self, image_id: int) -> None:
        self.image_id = image_id
        super().__init__(f"missing feature vector for image {image_id}")


class MissingRecordError(PremiseForgeError):
    """A record refers to a question, caption or premise that is not there."""


class NoNegativeFoundError(PremiseForgeError):
    def __init__(self) -> None:
        super().__init__("no negative found")


class ModelFormatError(PremiseForgeError):
    """Model file or sidecar is unreadable or inconsistent."""


class DimensionMismatchError(PremiseForgeError):
    def __init__(self, expected: int, actual: int) -> None:
        self.expected = expected
        self.actual = actual
        super().__init__(f"input has {actual} features, model expects {expected}")


class EmptyDatasetError(PremiseForgeError):
    def __init__(self) -> None:
        super().__init__("dataset is empty")


class TrainingDivergedError(PremiseForgeError):
    def __init__(self, epoch: int, batch: int) -> None:
        self.epoch = epoch
        self.batch = batch
        super().__init__(
            f"loss became NaN at epoch {epoch}, batch {batch}; "
            "lower the learning rate or check inputs for non-finite values"
        )


class IdCollisionError(PremiseForgeError):
    def __init__(self, question_id: int) -> None:
        self.question_id = question_id
        super().__init__(f"question id {question_id} already in use")
