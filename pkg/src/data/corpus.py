import json
import logging
import os
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple

from validation import ValidationError

from .article import REQUIRED_FIELDS, ArticlePair

logger = logging.getLogger(__name__)


class ParseError(ValidationError):
    def __init__(self, message: str, line: int):
        super().__init__(message)
        self.line = line


class SchemaError(ValidationError):
    def __init__(self, message: str, line: int, field: Optional[str] = None):
        super().__init__(message)
        self.line = line
        self.field = field


def iter_records(path: str, required: Sequence[str] = REQUIRED_FIELDS) -> Iterator[Tuple[int, dict]]:
    """
    Yields (line number, record) for every non-blank line of a JSON-Lines file.

    Raises:
        FileNotFoundError: If the file does not exist.
        ParseError: If a line is not valid JSON.
        SchemaError: If a record is not an object or misses one of `required`.
    """
    if not os.path.exists(path):
        raise FileNotFoundError(f"Corpus not found: {path}")

    with open(path, "r", encoding="utf-8") as file:
        for number, line in enumerate(file, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as e:
                raise ParseError(f"{path}:{number}: invalid JSON ({e.msg})", line=number) from e

            if not isinstance(record, dict):
                raise SchemaError(f"{path}:{number}: record must be a JSON object", line=number)
            for field in required:
                if field not in record:
                    raise SchemaError(
                        f"{path}:{number}: missing required field '{field}'", line=number, field=field
                    )
            yield number, record


def load_corpus(path: str) -> List[ArticlePair]:
    """
    Reads a JSON-Lines corpus of article/summary records.

    Args:
        path (str): UTF-8 file with one JSON object per line. `text` and
            `summary` are required; `title`, `date` and `url` are optional.

    Returns:
        List[ArticlePair]: Records in file order. Blank lines are skipped.

    Raises:
        FileNotFoundError: If the file does not exist.
        ParseError: If a line is not valid JSON.
        SchemaError: If a record misses a required field or has a bad value.
    """
    pairs = []
    for number, record in iter_records(path):
        try:
            pairs.append(ArticlePair.from_dict(record))
        except (TypeError, ValidationError) as e:
            raise SchemaError(f"{path}:{number}: {e}", line=number) from e

    logger.info("Loaded %d records from %s", len(pairs), path)
    return pairs


def write_records(path: str, records: Iterable[dict]) -> int:
    """Writes `records` as UTF-8 JSON-Lines and returns how many were written."""
    count = 0
    with open(path, "w", encoding="utf-8", newline="\n") as file:
        for record in records:
            file.write(json.dumps(record, ensure_ascii=False) + "\n")
            count += 1
    return count


def write_corpus(path: str, pairs: Iterable[ArticlePair]) -> int:
    return write_records(path, (pair.dict for pair in pairs))
