from typing import Any, Dict

from dateutil.parser import isoparse

from validation import ValidationError

FIELDS = ("text", "summary", "title", "date", "url")
REQUIRED_FIELDS = ("text", "summary")


class ArticlePair:
    """
    An article body with its reference summary and optional metadata.
    """

    def __init__(
        self,
        text: str,
        summary: str,
        title: str = "",
        date: str = "",
        url: str = "",
    ):
        """
        Args:
            text: The article body.
            summary: The human-written reference summary.
            title: Article title, empty when unknown.
            date: ISO-8601 publication date, empty when unknown.
            url: Source URL, empty when unknown.
        """
        self.text = text
        self.summary = summary
        self.title = title
        self.date = date
        self.url = url

    def __repr__(self) -> str:
        return (
            f"ArticlePair("
            f"text={self.text[:30]!r}, "
            f"summary={self.summary[:30]!r}, "
            f"title={self.title!r}, "
            f"date={self.date!r}"
            f")"
        )

    def __eq__(self, other: object) -> bool:
        return isinstance(other, ArticlePair) and self.dict == other.dict

    __hash__ = None

    @property
    def dict(self) -> Dict[str, str]:
        return {
            "text": self.text,
            "summary": self.summary,
            "title": self.title,
            "date": self.date,
            "url": self.url,
        }

    @classmethod
    def from_dict(cls, record: Dict[str, Any]) -> "ArticlePair":
        """Builds a pair from a decoded record; extra keys are ignored."""
        return cls(**{field: record[field] for field in FIELDS if field in record})

    @staticmethod
    def _validate_text(value: Any, name: str) -> None:
        if not isinstance(value, str):
            raise TypeError(f"{name} must be a str, got {type(value).__name__}")

    @property
    def text(self) -> str:
        return self._text

    @text.setter
    def text(self, value: str) -> None:
        self._validate_text(value, "text")
        self._text = value

    @property
    def summary(self) -> str:
        return self._summary

    @summary.setter
    def summary(self, value: str) -> None:
        self._validate_text(value, "summary")
        self._summary = value

    @property
    def title(self) -> str:
        return self._title

    @title.setter
    def title(self, value: str) -> None:
        self._validate_text(value, "title")
        self._title = value

    @property
    def date(self) -> str:
        return self._date

    @date.setter
    def date(self, value: str) -> None:
        self._validate_text(value, "date")
        if value:
            try:
                isoparse(value)
            except ValueError as e:
                raise ValidationError(f"date is not ISO-8601: {value!r}") from e
        self._date = value

    @property
    def url(self) -> str:
        return self._url

    @url.setter
    def url(self, value: str) -> None:
        self._validate_text(value, "url")
        self._url = value
