"""Time-aligned transcripts: parsing, normalization and time<->word lookup.

The transcript is the coordinate system every other module works in. The
on-disk format is a small JSON document::

    { "video_id": str, "duration_s": number, "language": str,
      "words": [ { "text": str, "start_s": number, "end_s": number,
                   "pos": str|null } ] }

Word spans are half-open ``[start_s, end_s)``. A lookup that falls into the
gap between two words snaps to the next word, which keeps drag/drop
anchoring deterministic.
"""

from __future__ import annotations

import json
import unicodedata
from bisect import bisect_right
from dataclasses import dataclass, replace
from functools import cached_property
from importlib import resources
from typing import Iterable, Optional

from .errors import TimeOutOfRangeError, TranscriptFormatError

# Tolerance for float jitter in ASR word timings.
TIME_EPS = 1e-6


def normalize_token(text: str) -> str:
    """Lowercase and strip punctuation off both edges of a token.

    Internal characters are untouched, so contractions like "i'm" survive
    as a single token. Returns "" for punctuation-only tokens.
    """
    start, end = 0, len(text)
    while start < end and unicodedata.category(text[start]).startswith("P"):
        start += 1
    while end > start and unicodedata.category(text[end - 1]).startswith("P"):
        end -= 1
    return text[start:end].lower()


@dataclass(frozen=True)
class TimedWord:
    text: str
    norm: str
    start_s: float
    end_s: float
    index: int
    pos_tag: Optional[str] = None

    @property
    def midpoint_s(self) -> float:
        return 0.5 * (self.start_s + self.end_s)


@dataclass(frozen=True)
class TimedTranscript:
    video_id: str
    duration_s: float
    words: tuple[TimedWord, ...]
    language: str = "en"

    @cached_property
    def _starts(self) -> list[float]:
        return [w.start_s for w in self.words]

    @cached_property
    def _ends(self) -> list[float]:
        return [w.end_s for w in self.words]

    def word_at_time(self, time_s: float) -> Optional[int]:
        """Index of the word covering ``time_s``, snapping gaps forward.

        Returns None when ``time_s`` lies after the last word's end.
        Raises TimeOutOfRangeError outside [0, duration_s].
        """
        if time_s < 0 or time_s > self.duration_s:
            raise TimeOutOfRangeError(
                f"time {time_s} outside [0, {self.duration_s}]"
            )
        i = bisect_right(self._ends, time_s)
        if i >= len(self.words):
            return None
        return i

    def words_in_window(self, center_s: float, radius_s: float) -> range:
        """Indices of words whose span intersects [center-radius, center+radius]."""
        if radius_s <= 0:
            raise ValueError("radius_s must be positive")
        lo = center_s - radius_s
        hi = center_s + radius_s
        # first word with end > lo, then walk while start <= hi
        first = bisect_right(self._ends, lo)
        last = first
        while last < len(self.words) and self._starts[last] <= hi:
            last += 1
        return range(first, last)

    def norms(self) -> list[str]:
        return [w.norm for w in self.words]

    def with_pos_tags(self, tags: Iterable[Optional[str]]) -> "TimedTranscript":
        """Copy with pos_tag filled per word; None entries leave the word as-is."""
        new_words = tuple(
            w if tag is None else replace(w, pos_tag=tag)
            for w, tag in zip(self.words, tags)
        )
        return replace(self, words=new_words)


@dataclass(frozen=True)
class StopwordList:
    entries: frozenset[str]
    source_name: str = "custom"

    def __post_init__(self):
        if not self.entries:
            raise ValueError("stopword list must be non-empty")

    def __contains__(self, norm: str) -> bool:
        return norm in self.entries


def is_stopword(word: TimedWord, stops: StopwordList) -> bool:
    return word.norm in stops


def load_stopwords(path=None) -> StopwordList:
    """Load a stopword file (one entry per line); defaults to the shipped list."""
    if path is None:
        text = resources.files("cutaway.data").joinpath("stopwords_en.txt").read_text("utf-8")
        name = "builtin-en"
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
        name = str(path)
    entries = frozenset(
        normalize_token(line.strip()) for line in text.splitlines()
        if line.strip() and not line.startswith("#")
    )
    return StopwordList(entries=entries, source_name=name)


def _require(cond: bool, message: str):
    if not cond:
        raise TranscriptFormatError(message)


def parse_transcript(raw) -> TimedTranscript:
    """Parse and validate a transcript document (bytes, str or parsed dict).

    Punctuation-only tokens are dropped and the remaining words re-indexed.
    """
    if isinstance(raw, (bytes, bytearray)):
        raw = raw.decode("utf-8")
    if isinstance(raw, str):
        try:
            doc = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise TranscriptFormatError(f"not valid JSON: {exc}") from exc
    else:
        doc = raw
    _require(isinstance(doc, dict), "document must be a JSON object")
    for key in ("video_id", "duration_s", "words"):
        _require(key in doc, f"missing field {key!r}")
    video_id = doc["video_id"]
    duration = doc["duration_s"]
    language = doc.get("language", "en")
    _require(isinstance(video_id, str) and video_id != "", "video_id must be a non-empty string")
    _require(isinstance(duration, (int, float)) and duration > 0, "duration_s must be positive")
    _require(isinstance(doc["words"], list), "words must be a list")

    words: list[TimedWord] = []
    prev_end = 0.0
    prev_start = -1.0
    for i, entry in enumerate(doc["words"]):
        _require(isinstance(entry, dict), f"word {i}: must be an object")
        for key in ("text", "start_s", "end_s"):
            _require(key in entry, f"word {i}: missing field {key!r}")
        text = entry["text"]
        start = entry["start_s"]
        end = entry["end_s"]
        pos = entry.get("pos")
        _require(isinstance(text, str), f"word {i}: text must be a string")
        _require(isinstance(start, (int, float)) and isinstance(end, (int, float)),
                 f"word {i}: timings must be numbers")
        _require(start >= 0, f"word {i}: start {start} before 0")
        _require(end > start, f"word {i} ({text!r}): end before start")
        _require(end <= duration + TIME_EPS, f"word {i}: span ends at {end}, after duration {duration}")
        _require(start >= prev_start, f"word {i}: words not sorted by start time")
        _require(start >= prev_end - TIME_EPS, f"word {i}: span overlaps previous word")
        _require(pos is None or isinstance(pos, str), f"word {i}: pos must be a string or null")
        prev_start, prev_end = start, end
        norm = normalize_token(text)
        if not norm:
            continue  # punctuation-only token
        words.append(TimedWord(
            text=text, norm=norm, start_s=float(start), end_s=float(end),
            index=len(words), pos_tag=pos,
        ))
    return TimedTranscript(
        video_id=video_id, duration_s=float(duration),
        words=tuple(words), language=language,
    )


def serialize_transcript(t: TimedTranscript) -> dict:
    return {
        "video_id": t.video_id,
        "duration_s": t.duration_s,
        "language": t.language,
        "words": [
            {"text": w.text, "start_s": w.start_s, "end_s": w.end_s, "pos": w.pos_tag}
            for w in t.words
        ],
    }


def transcript_to_json(t: TimedTranscript) -> str:
    return json.dumps(serialize_transcript(t), ensure_ascii=False, indent=2)


def load_transcript(path) -> TimedTranscript:
    with open(path, "rb") as fh:
        return parse_transcript(fh.read())
