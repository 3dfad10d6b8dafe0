"""
JSONL corpus reading and writing.

Every record is validated against its pydantic schema on read; a bad line
raises CorpusFormatError naming the file and the 1-based line number.
Writes use ``model_dump(mode="json")`` so key order follows the schema.
"""

import json
import logging
from pathlib import Path
from typing import Dict, Iterable, List, Type, TypeVar, Union

from pydantic import BaseModel, ValidationError

from .errors import CorpusFormatError
from .schemas import CaptionRecord, Question

logger = logging.getLogger(__name__)

M = TypeVar("M", bound=BaseModel)


def _describe(error: ValidationError) -> str:
    first = error.errors()[0]
    location = ".".join(str(part) for part in first["loc"])
    return f"{location}: {first['msg']}" if location else first["msg"]


def read_jsonl(path: Union[str, Path], model: Type[M]) -> List[M]:
    """Read and validate a JSONL file, preserving line order.

    Blank lines are skipped. Unknown keys are ignored.

    Raises:
        FileNotFoundError: If the file does not exist.
        CorpusFormatError: On invalid JSON or a record failing validation.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Corpus file not found: {path}")

    records: List[M] = []
    with open(path, encoding="utf-8") as f:
        for line_number, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                data = json.loads(line)
            except json.JSONDecodeError as e:
                raise CorpusFormatError(path, line_number, f"invalid JSON: {e.msg}") from e
            if not isinstance(data, dict):
                raise CorpusFormatError(path, line_number, "expected a JSON object")
            try:
                records.append(model.model_validate(data))
            except ValidationError as e:
                raise CorpusFormatError(path, line_number, _describe(e)) from e

    logger.debug("Read %d %s records from %s", len(records), model.__name__, path)
    return records


def write_jsonl(path: Union[str, Path], records: Iterable[BaseModel]) -> int:
    """Write records one per line; returns the number written."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    count = 0
    with open(path, "w", encoding="utf-8") as f:
        for record in records:
            f.write(json.dumps(record.model_dump(mode="json"), ensure_ascii=False))
            f.write("\n")
            count += 1
    logger.debug("Wrote %d records to %s", count, path)
    return count


def read_questions(path: Union[str, Path]) -> List[Question]:
    return read_jsonl(path, Question)


def write_questions(path: Union[str, Path], questions: Iterable[Question]) -> int:
    return write_jsonl(path, questions)


def read_captions(path: Union[str, Path]) -> Dict[int, str]:
    """Map image id to caption; a later line for the same image wins."""
    return {record.image_id: record.caption for record in read_jsonl(path, CaptionRecord)}
