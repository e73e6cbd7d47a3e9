"""Edit session: transcript-anchored B-roll insertions over an A-roll video.

Insertions never overlap and keep durations inside [0.5, 8.0] s; operations
that cannot satisfy that are rejected whole, leaving the session unchanged.
Playback planning loops a too-short asset and cuts a too-long one, tiling
the timeline exactly while the audio stays one untouched A-roll span.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from typing import Optional

from .agreement import MAX_INSERTION_S, MIN_INSERTION_S
from .errors import (
    ArtifactFormatError,
    OverlapError,
    TimeOutOfRangeError,
    UnknownInsertionError,
)
from .transcript import TIME_EPS, TimedTranscript

STYLES = ("social_media", "professional")
ORIGIN_MANUAL = "manual"
ORIGIN_RECOMMENDATION_PREFIX = "recommendation:"

EDL_FORMAT = "cutaway-edl"
EDL_VERSION = 1
CSV_COLUMNS = ("start_s", "duration_s", "asset_id", "provider", "query_origin")


def recommendation_origin(source: str) -> str:
    return ORIGIN_RECOMMENDATION_PREFIX + source


def _check_origin(origin: str):
    if origin != ORIGIN_MANUAL and not origin.startswith(ORIGIN_RECOMMENDATION_PREFIX):
        raise ArtifactFormatError(
            f"origin must be {ORIGIN_MANUAL!r} or start with "
            f"{ORIGIN_RECOMMENDATION_PREFIX!r}, got {origin!r}"
        )


@dataclass(frozen=True)
class BRollAsset:
    asset_id: str
    provider: str
    style: str
    url: str
    natural_duration_s: float
    thumbnail_url: str = ""
    tags: tuple[str, ...] = ()

    def __post_init__(self):
        if self.style not in STYLES:
            raise ArtifactFormatError(f"unknown asset style {self.style!r}")
        if self.natural_duration_s <= 0:
            raise ArtifactFormatError("asset natural_duration_s must be positive")

    def to_dict(self) -> dict:
        return {
            "asset_id": self.asset_id,
            "provider": self.provider,
            "style": self.style,
            "url": self.url,
            "natural_duration_s": self.natural_duration_s,
            "thumbnail_url": self.thumbnail_url,
            "tags": list(self.tags),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "BRollAsset":
        try:
            return cls(
                asset_id=str(doc["asset_id"]),
                provider=str(doc.get("provider", "")),
                style=str(doc["style"]),
                url=str(doc.get("url", "")),
                natural_duration_s=float(doc["natural_duration_s"]),
                thumbnail_url=str(doc.get("thumbnail_url", "")),
                tags=tuple(str(t) for t in doc.get("tags", ())),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ArtifactFormatError(f"bad asset record: {exc}") from exc


@dataclass(frozen=True)
class BRollInsertion:
    insertion_id: str
    asset: BRollAsset
    start_s: float
    duration_s: float
    origin: str = ORIGIN_MANUAL

    def __post_init__(self):
        _check_origin(self.origin)

    @property
    def end_s(self) -> float:
        return self.start_s + self.duration_s

    def to_dict(self) -> dict:
        return {
            "insertion_id": self.insertion_id,
            "asset": self.asset.to_dict(),
            "start_s": self.start_s,
            "duration_s": self.duration_s,
            "origin": self.origin,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "BRollInsertion":
        try:
            return cls(
                insertion_id=str(doc["insertion_id"]),
                asset=BRollAsset.from_dict(doc["asset"]),
                start_s=float(doc["start_s"]),
                duration_s=float(doc["duration_s"]),
                origin=str(doc.get("origin", ORIGIN_MANUAL)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ArtifactFormatError(f"bad insertion record: {exc}") from exc


@dataclass(frozen=True)
class PlanSegment:
    source: str            # "aroll" or an asset_id
    source_in_s: float
    source_out_s: float
    timeline_in_s: float
    timeline_out_s: float

    def to_dict(self) -> dict:
        return {
            "source": self.source,
            "source_in_s": self.source_in_s,
            "source_out_s": self.source_out_s,
            "timeline_in_s": self.timeline_in_s,
            "timeline_out_s": self.timeline_out_s,
        }


@dataclass(frozen=True)
class PlaybackPlan:
    video: tuple[PlanSegment, ...]
    audio: PlanSegment  # the continuous A-roll track

    def to_dict(self) -> dict:
        return {
            "video": [seg.to_dict() for seg in self.video],
            "audio": self.audio.to_dict(),
        }


class EditSession:
    """Mutable editing state for one video; every successful mutation bumps
    ``revision`` by one and failed mutations change nothing."""

    def __init__(self, video_id: str, duration_s: float, session_id: str = "",
                 revision: int = 0, next_seq: int = 1):
        if duration_s <= 0:
            raise ArtifactFormatError("video duration must be positive")
        self.video_id = video_id
        self.duration_s = float(duration_s)
        self.session_id = session_id or video_id
        self.insertions: list[BRollInsertion] = []
        self.revision = revision
        self._next_seq = next_seq

    # -- read side ---------------------------------------------------------

    def get(self, insertion_id: str) -> BRollInsertion:
        for ins in self.insertions:
            if ins.insertion_id == insertion_id:
                return ins
        raise UnknownInsertionError(f"no insertion {insertion_id!r}")

    def _assert_free(self, start_s: float, duration_s: float,
                     ignore_id: Optional[str] = None):
        end_s = start_s + duration_s
        for other in self.insertions:
            if other.insertion_id == ignore_id:
                continue
            if start_s < other.end_s - TIME_EPS and end_s > other.start_s + TIME_EPS:
                raise OverlapError(
                    f"[{start_s:.3f}, {end_s:.3f}) overlaps insertion "
                    f"{other.insertion_id}"
                )

    # -- mutations ---------------------------------------------------------

    def _commit(self, insertions: list[BRollInsertion]):
        self.insertions = sorted(insertions, key=lambda i: i.start_s)
        self.revision += 1

    def insert(self, asset: BRollAsset, at_s: float,
               origin: str = ORIGIN_MANUAL) -> str:
        _check_origin(origin)
        if not 0 <= at_s < self.duration_s:
            raise TimeOutOfRangeError(
                f"insert position {at_s} outside [0, {self.duration_s})"
            )
        duration = min(max(asset.natural_duration_s, MIN_INSERTION_S), MAX_INSERTION_S)
        duration = min(duration, self.duration_s - at_s)
        if duration < MIN_INSERTION_S - TIME_EPS:
            raise TimeOutOfRangeError(
                f"no room for a {MIN_INSERTION_S} s clip at {at_s}"
            )
        self._assert_free(at_s, duration)
        insertion_id = f"ins-{self._next_seq:04d}"
        ins = BRollInsertion(insertion_id, asset, float(at_s), duration, origin)
        self._next_seq += 1
        self._commit(self.insertions + [ins])
        return insertion_id

    def insert_at_word(self, asset: BRollAsset, doc: TimedTranscript,
                       word_index: int, origin: str = ORIGIN_MANUAL) -> str:
        return self.insert(asset, doc.words[word_index].start_s, origin)

    def move(self, insertion_id: str, new_start_s: float):
        ins = self.get(insertion_id)
        start = max(0.0, float(new_start_s))
        if start >= self.duration_s:
            raise TimeOutOfRangeError(
                f"start {new_start_s} outside [0, {self.duration_s})"
            )
        duration = min(ins.duration_s, self.duration_s - start)
        if duration < MIN_INSERTION_S - TIME_EPS:
            raise TimeOutOfRangeError(
                f"no room for a {MIN_INSERTION_S} s clip at {start}"
            )
        self._assert_free(start, duration, ignore_id=insertion_id)
        moved = BRollInsertion(ins.insertion_id, ins.asset, start, duration, ins.origin)
        self._commit([moved if i.insertion_id == insertion_id else i
                      for i in self.insertions])

    def resize(self, insertion_id: str, new_duration_s: float):
        ins = self.get(insertion_id)
        duration = min(max(float(new_duration_s), MIN_INSERTION_S), MAX_INSERTION_S)
        duration = min(duration, self.duration_s - ins.start_s)
        for other in self.insertions:
            if other.start_s > ins.start_s + TIME_EPS:
                duration = min(duration, other.start_s - ins.start_s)
                break
        resized = BRollInsertion(ins.insertion_id, ins.asset, ins.start_s,
                                 duration, ins.origin)
        self._commit([resized if i.insertion_id == insertion_id else i
                      for i in self.insertions])

    def remove(self, insertion_id: str):
        self.get(insertion_id)
        self._commit([i for i in self.insertions
                      if i.insertion_id != insertion_id])

    # -- playback ----------------------------------------------------------

    def playback_plan(self) -> PlaybackPlan:
        segments: list[PlanSegment] = []
        cursor = 0.0
        for ins in self.insertions:
            if ins.start_s > cursor + TIME_EPS:
                segments.append(PlanSegment("aroll", cursor, ins.start_s,
                                            cursor, ins.start_s))
            natural = ins.asset.natural_duration_s
            loops = max(1, math.ceil(ins.duration_s / natural - 1e-9))
            t = ins.start_s
            for k in range(loops):
                seg_len = min(natural, ins.end_s - t)
                segments.append(PlanSegment(ins.asset.asset_id, 0.0, seg_len,
                                            t, t + seg_len))
                t += seg_len
            cursor = ins.end_s
        if cursor < self.duration_s - TIME_EPS or not segments:
            segments.append(PlanSegment("aroll", cursor, self.duration_s,
                                        cursor, self.duration_s))
        audio = PlanSegment("aroll", 0.0, self.duration_s, 0.0, self.duration_s)
        return PlaybackPlan(video=tuple(segments), audio=audio)

    # -- persistence -------------------------------------------------------

    def to_edl(self) -> dict:
        return {
            "format": EDL_FORMAT,
            "version": EDL_VERSION,
            "video_id": self.video_id,
            "duration_s": self.duration_s,
            "insertions": [
                {
                    "asset": ins.asset.to_dict(),
                    "start_s": ins.start_s,
                    "duration_s": ins.duration_s,
                    "origin": ins.origin,
                }
                for ins in self.insertions
            ],
            "revision": self.revision,
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for ins in self.insertions:
            writer.writerow([
                f"{ins.start_s:g}", f"{ins.duration_s:g}",
                ins.asset.asset_id, ins.asset.provider, ins.origin,
            ])
        return buf.getvalue()


def export_edl(session: EditSession) -> str:
    return json.dumps(session.to_edl(), indent=2)


def import_edl(document) -> EditSession:
    """Rebuild a session from an EDL; insertion ids are regenerated."""
    if isinstance(document, (bytes, str)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise ArtifactFormatError(f"EDL is not valid JSON: {exc}") from exc
    if not isinstance(document, dict) or document.get("format") != EDL_FORMAT:
        raise ArtifactFormatError("not an EDL document")
    if document.get("version") != EDL_VERSION:
        raise ArtifactFormatError(f"unsupported EDL version {document.get('version')}")
    try:
        session = EditSession(str(document["video_id"]), float(document["duration_s"]))
        rows = list(document.get("insertions", []))
    except (KeyError, TypeError, ValueError) as exc:
        raise ArtifactFormatError(f"bad EDL document: {exc}") from exc
    for row in rows:
        try:
            asset = BRollAsset.from_dict(row["asset"])
            start_s = float(row["start_s"])
            duration_s = float(row["duration_s"])
            origin = str(row.get("origin", ORIGIN_MANUAL))
        except (KeyError, TypeError, ValueError) as exc:
            raise ArtifactFormatError(f"bad EDL insertion: {exc}") from exc
        if not (MIN_INSERTION_S - TIME_EPS <= duration_s <= MAX_INSERTION_S + TIME_EPS):
            raise ArtifactFormatError(
                f"EDL insertion duration {duration_s} outside "
                f"[{MIN_INSERTION_S}, {MAX_INSERTION_S}]"
            )
        session._assert_free(start_s, duration_s)
        if start_s < 0 or start_s + duration_s > session.duration_s + TIME_EPS:
            raise ArtifactFormatError("EDL insertion outside the video")
        iid = f"ins-{session._next_seq:04d}"
        session._next_seq += 1
        session.insertions.append(
            BRollInsertion(iid, asset, start_s, duration_s, origin)
        )
    session.insertions.sort(key=lambda i: i.start_s)
    session.revision = int(document.get("revision", 0))
    return session
