"""Inter-editor agreement analytics over B-roll edit sets.

Agreement between two editors' cuts of the same video is the Jaccard
coefficient of their covered time, discretized into fixed-width bins
(default 0.1 s). The module also provides a seeded Monte-Carlo random
baseline (same insertion counts and durations, placed uniformly without
overlap), per-bin insertion-probability tracks, corpus usage statistics,
and the query-locality measure (how often an insertion's search query is
spoken within one second of where it lands).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

import numpy as np

from . import accel
from .errors import EditSetFormatError, TimeOutOfRangeError, VideoMismatchError
from .transcript import TIME_EPS, TimedTranscript, normalize_token

MIN_INSERTION_S = 0.5
MAX_INSERTION_S = 8.0
DEFAULT_BIN_S = 0.1


@dataclass(frozen=True)
class AnnotatedInsertion:
    start_s: float
    duration_s: float
    query: str = ""

    def __post_init__(self):
        if self.start_s < 0:
            raise EditSetFormatError(f"insertion start {self.start_s} < 0")
        if not (MIN_INSERTION_S - TIME_EPS <= self.duration_s <= MAX_INSERTION_S + TIME_EPS):
            raise EditSetFormatError(
                f"insertion duration {self.duration_s} outside "
                f"[{MIN_INSERTION_S}, {MAX_INSERTION_S}]"
            )

    @property
    def end_s(self) -> float:
        return self.start_s + self.duration_s

    def to_dict(self) -> dict:
        return {"start_s": self.start_s, "duration_s": self.duration_s, "query": self.query}

    @classmethod
    def from_dict(cls, doc: dict) -> "AnnotatedInsertion":
        try:
            return cls(
                start_s=float(doc["start_s"]),
                duration_s=float(doc["duration_s"]),
                query=str(doc.get("query", "")),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise EditSetFormatError(f"bad insertion record: {exc}") from exc


@dataclass(frozen=True)
class EditSet:
    video_id: str
    insertions: tuple[AnnotatedInsertion, ...]
    editor_id: Optional[str] = None

    def __post_init__(self):
        starts = [ins.start_s for ins in self.insertions]
        if starts != sorted(starts):
            raise EditSetFormatError("insertions must be sorted by start_s")

    @property
    def durations(self) -> np.ndarray:
        return np.array([ins.duration_s for ins in self.insertions], dtype=np.float64)

    def check_in_video(self, duration_s: float):
        for ins in self.insertions:
            if ins.end_s > duration_s + TIME_EPS:
                raise TimeOutOfRangeError(
                    f"insertion [{ins.start_s}, {ins.end_s}) exceeds video "
                    f"duration {duration_s}"
                )

    def to_dict(self) -> dict:
        doc = {
            "video_id": self.video_id,
            "insertions": [ins.to_dict() for ins in self.insertions],
        }
        if self.editor_id is not None:
            doc["editor_id"] = self.editor_id
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "EditSet":
        if not isinstance(doc, dict) or "video_id" not in doc:
            raise EditSetFormatError("edit set needs a video_id")
        raw = doc.get("insertions", [])
        if not isinstance(raw, list):
            raise EditSetFormatError("insertions must be a list")
        insertions = sorted(
            (AnnotatedInsertion.from_dict(r) for r in raw),
            key=lambda ins: ins.start_s,
        )
        editor = doc.get("editor_id")
        return cls(
            video_id=str(doc["video_id"]),
            insertions=tuple(insertions),
            editor_id=None if editor is None else str(editor),
        )


def load_edit_sets(source) -> list[EditSet]:
    """Parse an edit-set corpus: a JSON list of edit-set objects."""
    if isinstance(source, (bytes, str)):
        doc = json.loads(source)
    else:
        doc = source
    if not isinstance(doc, list):
        raise EditSetFormatError("edit-set corpus must be a JSON list")
    return [EditSet.from_dict(d) for d in doc]


def read_edit_sets(path) -> list[EditSet]:
    with open(path, encoding="utf-8") as fh:
        return load_edit_sets(fh.read())


def save_edit_sets(edits: Sequence[EditSet], path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump([es.to_dict() for es in edits], fh, indent=2)


# ---------------------------------------------------------------------------
# binned coverage and Jaccard

def n_bins(duration_s: float, bin_s: float = DEFAULT_BIN_S) -> int:
    return max(1, math.ceil(duration_s / bin_s - 1e-9))


def coverage_bins(edit: EditSet, duration_s: float,
                  bin_s: float = DEFAULT_BIN_S) -> np.ndarray:
    """Boolean per-bin coverage; a bin counts as covered when any insertion
    overlaps it by more than a 1e-9 sliver (so touching boundaries do not
    bleed into the neighbouring bin)."""
    if bin_s <= 0:
        raise ValueError("bin_s must be positive")
    nb = n_bins(duration_s, bin_s)
    covered = np.zeros(nb, dtype=bool)
    for ins in edit.insertions:
        b0 = int(math.floor(ins.start_s / bin_s + 1e-9))
        b1 = int(math.ceil(ins.end_s / bin_s - 1e-9))
        covered[max(0, b0):min(nb, b1)] = True
    return covered


def jaccard(a: EditSet, b: EditSet, duration_s: float,
            bin_s: float = DEFAULT_BIN_S) -> float:
    """Intersection-over-union of two editors' covered bins; 1.0 when both
    editors inserted nothing."""
    if a.video_id != b.video_id:
        raise VideoMismatchError(
            f"edit sets are for different videos: {a.video_id!r} vs {b.video_id!r}"
        )
    ca = coverage_bins(a, duration_s, bin_s)
    cb = coverage_bins(b, duration_s, bin_s)
    union = int(np.sum(ca | cb))
    if union == 0:
        return 1.0
    return int(np.sum(ca & cb)) / union


@dataclass(frozen=True)
class AgreementSummary:
    mean: float
    sd: float
    n_pairs: int

    def to_dict(self) -> dict:
        return {"mean": self.mean, "sd": self.sd, "n_pairs": self.n_pairs}


def mean_pairwise_jaccard(edits: Sequence[EditSet], duration_s: float,
                          bin_s: float = DEFAULT_BIN_S) -> AgreementSummary:
    """Mean and population standard deviation over all unordered pairs."""
    if len(edits) < 2:
        raise ValueError("need at least 2 edit sets")
    values = [
        jaccard(edits[i], edits[j], duration_s, bin_s)
        for i in range(len(edits))
        for j in range(i + 1, len(edits))
    ]
    arr = np.array(values, dtype=np.float64)
    return AgreementSummary(mean=float(arr.mean()), sd=float(arr.std()),
                            n_pairs=len(values))


# ---------------------------------------------------------------------------
# random baseline

def random_pair_jaccard(
    durations_a: Sequence[float],
    durations_b: Sequence[float],
    video_duration_s: float,
    *,
    trials: int = 10_000,
    seed=0,
    bin_s: float = DEFAULT_BIN_S,
) -> float:
    """Expected Jaccard of two random edit sets with the given durations.

    Each trial places a set's insertions uniformly at random without overlap
    (sorted uniform offsets into the free space, durations assigned to slots
    by a random permutation). Deterministic per seed.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    dur_a = np.asarray(durations_a, dtype=np.float64)
    dur_b = np.asarray(durations_b, dtype=np.float64)
    free_a = video_duration_s - float(dur_a.sum())
    free_b = video_duration_s - float(dur_b.sum())
    if free_a < -TIME_EPS or free_b < -TIME_EPS:
        raise TimeOutOfRangeError("insertions do not fit in the video")
    rng = np.random.default_rng(seed)
    ka, kb = dur_a.shape[0], dur_b.shape[0]
    u_a = rng.random((trials, ka))
    u_b = rng.random((trials, kb))
    perm_a = np.empty((trials, ka), dtype=np.int64)
    perm_b = np.empty((trials, kb), dtype=np.int64)
    for tr in range(trials):
        perm_a[tr] = rng.permutation(ka)
        perm_b[tr] = rng.permutation(kb)
    return float(accel.mc_pair_jaccard(
        dur_a, dur_b, u_a, u_b, perm_a, perm_b,
        max(0.0, free_a), max(0.0, free_b),
        bin_s, n_bins(video_duration_s, bin_s),
    ))


def random_baseline_jaccard(
    edits: Sequence[EditSet],
    duration_s: float,
    *,
    trials: int = 10_000,
    seed=0,
    bin_s: float = DEFAULT_BIN_S,
) -> AgreementSummary:
    """Matched random baseline for :func:`mean_pairwise_jaccard`.

    For every unordered pair of edit sets, estimates the Jaccard expected if
    both editors had placed the same number/durations of insertions at
    random; pair trials use seeds derived from (seed, pair index).
    """
    if len(edits) < 2:
        raise ValueError("need at least 2 edit sets")
    values = []
    pair_index = 0
    for i in range(len(edits)):
        for j in range(i + 1, len(edits)):
            values.append(random_pair_jaccard(
                [ins.duration_s for ins in edits[i].insertions],
                [ins.duration_s for ins in edits[j].insertions],
                duration_s, trials=trials, seed=[seed, pair_index], bin_s=bin_s,
            ))
            pair_index += 1
    arr = np.array(values, dtype=np.float64)
    return AgreementSummary(mean=float(arr.mean()), sd=float(arr.std()),
                            n_pairs=len(values))


# ---------------------------------------------------------------------------
# probability tracks

@dataclass(frozen=True)
class ProbabilityTrack:
    bin_s: float
    values: np.ndarray  # per-bin fraction of edit sets covering the bin
    n_edits: int

    def to_dict(self) -> dict:
        return {
            "bin_s": self.bin_s,
            "values": self.values.tolist(),
            "n_edits": self.n_edits,
        }


def probability_track(edits: Sequence[EditSet], duration_s: float,
                      bin_s: float = DEFAULT_BIN_S) -> ProbabilityTrack:
    """Per-bin fraction of edit sets with B-roll covering that bin."""
    if not edits:
        raise ValueError("need at least 1 edit set")
    counts = np.zeros(n_bins(duration_s, bin_s), dtype=np.int64)
    for es in edits:
        counts += coverage_bins(es, duration_s, bin_s)
    return ProbabilityTrack(bin_s=bin_s, values=counts / len(edits),
                            n_edits=len(edits))


# ---------------------------------------------------------------------------
# usage statistics

@dataclass(frozen=True)
class BRollStats:
    n_edit_sets: int
    n_insertions: int
    duration_histogram: Mapping[str, int]  # "lo-hi" second buckets
    median_duration_s: float
    median_gap_s: Optional[float]          # None when no edit set has 2+ insertions
    mean_replaced_fraction: float
    median_count: float

    def to_dict(self) -> dict:
        return {
            "n_edit_sets": self.n_edit_sets,
            "n_insertions": self.n_insertions,
            "duration_histogram": dict(self.duration_histogram),
            "median_duration_s": self.median_duration_s,
            "median_gap_s": self.median_gap_s,
            "mean_replaced_fraction": self.mean_replaced_fraction,
            "median_count": self.median_count,
        }


def broll_stats(edits: Sequence[EditSet],
                video_durations: Mapping[str, float]) -> BRollStats:
    """Corpus usage statistics.

    Gaps run from one insertion's end to the next insertion's start within a
    single edit set; the replaced fraction is an edit set's covered time over
    its video's duration, averaged over edit sets.
    """
    if not edits:
        raise ValueError("need at least 1 edit set")
    durations: list[float] = []
    gaps: list[float] = []
    counts: list[int] = []
    fractions: list[float] = []
    for es in edits:
        video_dur = video_durations.get(es.video_id)
        if video_dur is None:
            raise VideoMismatchError(f"no duration for video {es.video_id!r}")
        counts.append(len(es.insertions))
        covered = 0.0
        for k, ins in enumerate(es.insertions):
            durations.append(ins.duration_s)
            covered += ins.duration_s
            if k > 0:
                gaps.append(ins.start_s - es.insertions[k - 1].end_s)
        fractions.append(covered / video_dur if video_dur > 0 else 0.0)
    edges = np.arange(0.0, MAX_INSERTION_S + 1.0, 1.0)
    hist, _ = np.histogram(durations, bins=edges) if durations else (np.zeros(8, int), edges)
    histogram = {
        f"{edges[i]:g}-{edges[i + 1]:g}": int(hist[i]) for i in range(len(hist))
    }
    return BRollStats(
        n_edit_sets=len(edits),
        n_insertions=len(durations),
        duration_histogram=histogram,
        median_duration_s=float(np.median(durations)) if durations else 0.0,
        median_gap_s=float(np.median(gaps)) if gaps else None,
        mean_replaced_fraction=float(np.mean(fractions)),
        median_count=float(np.median(counts)),
    )


# ---------------------------------------------------------------------------
# query locality

def query_tokens(query: str) -> list[str]:
    toks = [normalize_token(t) for t in query.split()]
    return [t for t in toks if t]


def _query_is_local(doc: TimedTranscript, ins: AnnotatedInsertion,
                    radius_s: float) -> bool:
    tokens = query_tokens(ins.query)
    if not tokens:
        return False
    window = doc.words_in_window(ins.start_s, radius_s)
    norms = doc.norms()
    for i in window:
        # multi-word queries must match a contiguous run starting in-window
        if norms[i:i + len(tokens)] == tokens:
            return True
    return False


def query_locality(
    edits: Sequence[EditSet],
    transcripts: Mapping[str, TimedTranscript],
    radius_s: float = 1.0,
) -> float:
    """Fraction of insertions whose query is spoken within ±radius_s of the
    insertion point. Insertions with empty queries count as non-local."""
    total = 0
    local = 0
    for es in edits:
        doc = transcripts.get(es.video_id)
        if doc is None:
            raise VideoMismatchError(f"no transcript for video {es.video_id!r}")
        for ins in es.insertions:
            total += 1
            if _query_is_local(doc, ins, radius_s):
                local += 1
    if total == 0:
        raise ValueError("no insertions to measure")
    return local / total
