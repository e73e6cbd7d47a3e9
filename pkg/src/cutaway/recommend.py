"""B-roll recommendation generation.

Three sources: the trained keyword classifier (2 s clips on predicted
words), aggregated expert edits (above-mean runs of the insertion
probability track), and a fixed-interval fallback. ``normalize`` makes any
mix of them displayable: sorted, non-overlapping, clamp law re-applied.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, replace
from typing import Optional, Sequence

from .agreement import (
    MAX_INSERTION_S,
    MIN_INSERTION_S,
    EditSet,
    ProbabilityTrack,
)
from .classifier import LinearModel, predict_keywords
from .features import FeatureSpace, SentimentLexicon, tag_pos
from .transcript import TIME_EPS, StopwordList, TimedTranscript

ALGORITHMIC_DURATION_S = 2.0
DEFAULT_PERIOD_S = 9.0

SOURCES = ("algorithmic", "expert", "interval")


@dataclass(frozen=True)
class Recommendation:
    start_s: float
    duration_s: float
    query: str
    source: str
    score: Optional[float] = None
    anchor_word_index: Optional[int] = None

    def __post_init__(self):
        if self.source not in SOURCES:
            raise ValueError(f"unknown recommendation source {self.source!r}")
        if not self.query:
            raise ValueError("recommendation query must be non-empty")
        if self.start_s < 0:
            raise ValueError("recommendation start must be >= 0")
        if not (MIN_INSERTION_S - TIME_EPS <= self.duration_s <= MAX_INSERTION_S + TIME_EPS):
            raise ValueError(
                f"recommendation duration {self.duration_s} outside "
                f"[{MIN_INSERTION_S}, {MAX_INSERTION_S}]"
            )

    @property
    def end_s(self) -> float:
        return self.start_s + self.duration_s

    def to_dict(self) -> dict:
        return {
            "start_s": self.start_s,
            "duration_s": self.duration_s,
            "query": self.query,
            "source": self.source,
            "score": self.score,
            "anchor_word_index": self.anchor_word_index,
        }


def _fit_at(start_s: float, duration_s: float, video_duration_s: float) -> Optional[float]:
    """Clamp a duration to the clip bounds and the video end; None if even
    the 0.5 s minimum does not fit."""
    dur = min(max(duration_s, MIN_INSERTION_S), MAX_INSERTION_S)
    dur = min(dur, video_duration_s - start_s)
    if dur < MIN_INSERTION_S - TIME_EPS:
        return None
    return dur


def recommend_algorithmic(
    model: LinearModel,
    doc: TimedTranscript,
    space: FeatureSpace,
    lexicon: SentimentLexicon,
    stops: StopwordList,
    max_n: Optional[int] = None,
) -> list[Recommendation]:
    """Two-second recommendations on the classifier's predicted keywords,
    strongest first by decision value, at most max_n of them."""
    doc = tag_pos(doc)
    hits = predict_keywords(model, doc, space, lexicon, stops)
    ranked = sorted(hits.items(), key=lambda kv: (-kv[1], kv[0]))
    if max_n is not None:
        ranked = ranked[:max_n]
    recs = []
    for idx, score in ranked:
        word = doc.words[idx]
        dur = _fit_at(word.start_s, ALGORITHMIC_DURATION_S, doc.duration_s)
        if dur is None:
            continue
        recs.append(Recommendation(
            start_s=word.start_s, duration_s=dur, query=word.norm,
            source="algorithmic", score=score, anchor_word_index=idx,
        ))
    return recs


def _above_mean_runs(track: ProbabilityTrack) -> list[tuple[int, int]]:
    """Maximal [lo, hi) bin runs with value strictly above the track mean."""
    values = track.values
    mean = float(values.mean())
    runs = []
    lo = None
    for i, v in enumerate(values):
        if v > mean:
            if lo is None:
                lo = i
        elif lo is not None:
            runs.append((lo, i))
            lo = None
    if lo is not None:
        runs.append((lo, len(values)))
    return runs


def recommend_expert(
    track: ProbabilityTrack,
    edits: Sequence[EditSet],
    doc: TimedTranscript,
) -> list[Recommendation]:
    """One recommendation per above-mean run of the probability track.

    The query is the most common query among insertions overlapping the run;
    on a tie the earliest-starting insertion's query wins.
    """
    if track.values.size == 0:
        raise ValueError("probability track is empty")
    recs = []
    for lo, hi in _above_mean_runs(track):
        start = lo * track.bin_s
        dur = _fit_at(start, (hi - lo) * track.bin_s, doc.duration_s)
        if dur is None:
            continue
        run_end = hi * track.bin_s
        overlapping = [
            ins
            for es in edits
            for ins in es.insertions
            if ins.start_s < run_end - TIME_EPS and ins.end_s > start + TIME_EPS
        ]
        overlapping = [ins for ins in overlapping if ins.query]
        if not overlapping:
            continue
        counts = Counter(ins.query for ins in overlapping)
        top = max(counts.values())
        modal = min(
            (ins for ins in overlapping if counts[ins.query] == top),
            key=lambda ins: ins.start_s,
        )
        recs.append(Recommendation(
            start_s=start, duration_s=dur, query=modal.query, source="expert",
            score=float(track.values[lo:hi].max()),
            anchor_word_index=doc.word_at_time(min(start, doc.duration_s)),
        ))
    return recs


def recommend_interval(
    doc: TimedTranscript,
    period_s: float = DEFAULT_PERIOD_S,
    duration_s: float = ALGORITHMIC_DURATION_S,
) -> list[Recommendation]:
    """Evenly spaced recommendations at period, 2*period, ... while a minimum
    clip still fits; slots where no word is spoken any more are skipped."""
    if period_s <= 0:
        raise ValueError("period_s must be positive")
    recs = []
    k = 1
    while True:
        t = k * period_s
        if t + MIN_INSERTION_S > doc.duration_s + TIME_EPS:
            break
        idx = doc.word_at_time(t)
        if idx is not None:
            dur = _fit_at(t, duration_s, doc.duration_s)
            if dur is not None:
                recs.append(Recommendation(
                    start_s=t, duration_s=dur, query=doc.words[idx].norm,
                    source="interval", anchor_word_index=idx,
                ))
        k += 1
    return recs


def normalize(recs: Sequence[Recommendation],
              video_duration_s: float) -> list[Recommendation]:
    """Display hygiene: re-clamp, drop overlaps (higher score wins, earlier
    start on ties or missing scores), and sort by start time."""
    clamped = []
    for rec in recs:
        dur = _fit_at(rec.start_s, rec.duration_s, video_duration_s)
        if dur is None:
            continue
        clamped.append(rec if dur == rec.duration_s else replace(rec, duration_s=dur))
    # missing scores rank below any scored recommendation
    order = sorted(
        range(len(clamped)),
        key=lambda i: (
            -(clamped[i].score if clamped[i].score is not None else float("-inf")),
            clamped[i].start_s,
            i,
        ),
    )
    kept: list[Recommendation] = []
    for i in order:
        cand = clamped[i]
        if all(
            cand.end_s <= other.start_s + TIME_EPS or other.end_s <= cand.start_s + TIME_EPS
            for other in kept
        ):
            kept.append(cand)
    return sorted(kept, key=lambda r: r.start_s)
