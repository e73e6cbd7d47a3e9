"""Keyword classifier: weighted-hinge linear model over per-word features.

Training minimizes

    0.5*||w||^2 + C * sum_i class_weight(y_i) * max(0, 1 - y_i*(w.x_i + b))

by averaged stochastic subgradient descent (step 1/(lambda*t), lambda =
1/(C*n)); the heavy loop lives in :mod:`cutaway.accel`. Evaluation follows
the empty-set conventions documented on :func:`evaluate` so corpus-level
comparisons stay well defined.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np

from . import accel
from .agreement import EditSet
from .errors import (
    DataLeakageError,
    DimensionMismatchError,
    SingleClassError,
    ArtifactFormatError,
    ThresholdUnattainableError,
)
from .features import (
    DEFAULT_MAX_VOCAB,
    FeatureSpace,
    SentimentLexicon,
    WordFeatureVector,
    build_feature_space,
    featurize_doc,
    tag_pos,
)
from .transcript import StopwordList, TimedTranscript

MODEL_FORMAT = "cutaway-linear-model"
MODEL_VERSION = 1


@dataclass(frozen=True)
class TrainConfig:
    c: float = 0.01
    epochs: int = 30
    lr_scale: float = 1.0      # multiplier on the 1/(lambda*t) step
    bias_lr: float = 1.0       # extra damping on the (unregularized) bias step
    class_weight_pos: Optional[float] = None  # None = negatives/positives
    seed: int = 0

    def __post_init__(self):
        if self.c <= 0:
            raise ValueError("c must be positive")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if not 0 < self.lr_scale <= 1:
            raise ValueError("lr_scale must be in (0, 1]")

    def to_dict(self) -> dict:
        return {
            "c": self.c, "epochs": self.epochs, "lr_scale": self.lr_scale,
            "bias_lr": self.bias_lr, "class_weight_pos": self.class_weight_pos,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class LabeledExample:
    features: WordFeatureVector
    is_keyword: bool
    video_id: str
    word_index: int


@dataclass(frozen=True)
class LabeledDoc:
    """A transcript plus the word indices annotated as B-roll keywords."""

    doc: TimedTranscript
    keyword_indices: frozenset[int]


@dataclass
class LinearModel:
    weights: np.ndarray
    bias: float
    decision_threshold: float = 0.0
    feature_space_id: str = ""
    objective_history: tuple[float, ...] = ()

    @property
    def dim(self) -> int:
        return int(self.weights.shape[0])

    def to_dict(self, train_config: Optional[TrainConfig] = None,
                metrics: Optional[dict] = None) -> dict:
        nz = np.flatnonzero(self.weights)
        doc = {
            "format": MODEL_FORMAT,
            "version": MODEL_VERSION,
            "dim": self.dim,
            "weights": {
                "indices": nz.tolist(),
                "values": self.weights[nz].tolist(),
            },
            "bias": self.bias,
            "decision_threshold": self.decision_threshold,
            "feature_space_id": self.feature_space_id,
            "objective_history": list(self.objective_history),
        }
        if train_config is not None:
            doc["train_config"] = train_config.to_dict()
        if metrics is not None:
            doc["metrics"] = metrics
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "LinearModel":
        if doc.get("format") != MODEL_FORMAT:
            raise ArtifactFormatError("not a linear-model artifact")
        if doc.get("version") != MODEL_VERSION:
            raise ArtifactFormatError(f"unsupported model version {doc.get('version')}")
        weights = np.zeros(int(doc["dim"]), dtype=np.float64)
        idx = np.asarray(doc["weights"]["indices"], dtype=np.int64)
        if idx.size:
            weights[idx] = np.asarray(doc["weights"]["values"], dtype=np.float64)
        return cls(
            weights=weights,
            bias=float(doc["bias"]),
            decision_threshold=float(doc["decision_threshold"]),
            feature_space_id=doc.get("feature_space_id", ""),
            objective_history=tuple(doc.get("objective_history", ())),
        )

    def save(self, path, train_config: Optional[TrainConfig] = None,
             metrics: Optional[dict] = None):
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(train_config, metrics), fh)

    @classmethod
    def load(cls, path) -> "LinearModel":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


def examples_to_csr(examples: Sequence[LabeledExample]):
    """Stack sparse example vectors into CSR arrays plus a +/-1 label vector."""
    dim = examples[0].features.dim
    indptr = np.zeros(len(examples) + 1, dtype=np.int64)
    chunks_idx = []
    chunks_val = []
    for i, ex in enumerate(examples):
        if ex.features.dim != dim:
            raise DimensionMismatchError(
                f"example {i} has dim {ex.features.dim}, expected {dim}"
            )
        chunks_idx.append(ex.features.indices)
        chunks_val.append(ex.features.values)
        indptr[i + 1] = indptr[i] + ex.features.indices.shape[0]
    data = np.concatenate(chunks_val) if chunks_val else np.zeros(0)
    indices = np.concatenate(chunks_idx) if chunks_idx else np.zeros(0, dtype=np.int64)
    y = np.array([1.0 if ex.is_keyword else -1.0 for ex in examples], dtype=np.float64)
    return data.astype(np.float64), indices.astype(np.int64), indptr, y, dim


def hinge_objective(weights: np.ndarray, bias: float,
                    examples: Sequence[LabeledExample], cfg: TrainConfig) -> float:
    """The exact training objective at (weights, bias); shares train()'s class weights."""
    data, indices, indptr, y, dim = examples_to_csr(examples)
    cw = _class_weights(y, cfg)
    scores = accel.csr_dot(data, indices, indptr, weights, bias)
    slack = np.maximum(0.0, 1.0 - y * scores)
    return 0.5 * float(weights @ weights) + cfg.c * float(np.sum(cw * slack))


def _class_weights(y: np.ndarray, cfg: TrainConfig) -> np.ndarray:
    n_pos = int(np.sum(y > 0))
    n_neg = int(np.sum(y < 0))
    if n_pos == 0 or n_neg == 0:
        raise SingleClassError("training data must contain both classes")
    w_pos = cfg.class_weight_pos if cfg.class_weight_pos is not None else n_neg / n_pos
    return np.where(y > 0, w_pos, 1.0)


def train(examples: Sequence[LabeledExample], cfg: TrainConfig = TrainConfig(),
          feature_space_id: str = "") -> LinearModel:
    """Fit the linear model; deterministic (bitwise) for a fixed config seed."""
    if not examples:
        raise SingleClassError("no training examples")
    data, indices, indptr, y, dim = examples_to_csr(examples)
    cw = _class_weights(y, cfg)
    rng = np.random.default_rng(cfg.seed)
    n = len(examples)
    perm = np.empty((cfg.epochs, n), dtype=np.int64)
    for e in range(cfg.epochs):
        perm[e] = rng.permutation(n)
    w, b, history = accel.fit_linear_svm(
        data, indices, indptr, y, cw, perm, dim,
        cfg.c, cfg.lr_scale, cfg.bias_lr,
    )
    return LinearModel(
        weights=w, bias=float(b), decision_threshold=0.0,
        feature_space_id=feature_space_id,
        objective_history=tuple(float(v) for v in history),
    )


def decision_value(model: LinearModel, x: WordFeatureVector) -> float:
    if x.dim != model.dim:
        raise DimensionMismatchError(f"vector dim {x.dim} != model dim {model.dim}")
    return float(model.weights[x.indices] @ x.values) + model.bias


def predict_scores(
    model: LinearModel,
    doc: TimedTranscript,
    space: FeatureSpace,
    lexicon: SentimentLexicon,
    stops: StopwordList,
) -> dict[int, float]:
    """Decision value for every non-stopword word of the document."""
    if space.dim != model.dim:
        raise DimensionMismatchError(f"space dim {space.dim} != model dim {model.dim}")
    if model.feature_space_id and model.feature_space_id != space.space_id:
        raise DimensionMismatchError(
            f"model was trained on space {model.feature_space_id}, got {space.space_id}"
        )
    word_indices, vectors = featurize_doc(space, lexicon, doc, stops)
    if not word_indices:
        return {}
    data, indices, indptr, _, _ = examples_to_csr(
        [LabeledExample(v, False, doc.video_id, i) for i, v in zip(word_indices, vectors)]
    )
    scores = accel.csr_dot(data, indices, indptr, model.weights, model.bias)
    return dict(zip(word_indices, scores.tolist()))


def predict_keywords(
    model: LinearModel,
    doc: TimedTranscript,
    space: FeatureSpace,
    lexicon: SentimentLexicon,
    stops: StopwordList,
    threshold: Optional[float] = None,
) -> dict[int, float]:
    """Word indices scoring at or above the decision threshold."""
    cut = model.decision_threshold if threshold is None else threshold
    scores = predict_scores(model, doc, space, lexicon, stops)
    return {i: s for i, s in scores.items() if s >= cut}


# ---------------------------------------------------------------------------
# evaluation

@dataclass(frozen=True)
class EvalReport:
    precision: float
    recall: float
    f1: float
    tp: int
    fp: int
    fn: int
    per_video: Optional[Mapping[str, "EvalReport"]] = None

    def to_dict(self) -> dict:
        doc = {
            "precision": self.precision, "recall": self.recall, "f1": self.f1,
            "tp": self.tp, "fp": self.fp, "fn": self.fn,
        }
        if self.per_video is not None:
            doc["per_video"] = {k: v.to_dict() for k, v in self.per_video.items()}
        return doc


def f1_score(precision: float, recall: float) -> float:
    """Harmonic mean; 0 when both rates are 0."""
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


def report_from_counts(tp: int, fp: int, fn: int,
                       per_video: Optional[Mapping[str, EvalReport]] = None) -> EvalReport:
    # empty predictions count as perfectly precise, empty truth as fully recalled
    precision = tp / (tp + fp) if tp + fp > 0 else 1.0
    recall = tp / (tp + fn) if tp + fn > 0 else 1.0
    return EvalReport(
        precision=precision, recall=recall, f1=f1_score(precision, recall),
        tp=tp, fp=fp, fn=fn, per_video=per_video,
    )


def evaluate(predicted: set[int], truth: set[int]) -> EvalReport:
    """Precision/recall/F1 of a predicted index set against annotated truth."""
    tp = len(predicted & truth)
    return report_from_counts(tp, len(predicted) - tp, len(truth) - tp)


@dataclass(frozen=True)
class PRPoint:
    threshold: float
    precision: float
    recall: float


def pr_points(scores: Sequence[float], labels: Sequence[bool]) -> list[PRPoint]:
    """One (precision, recall) point per distinct score threshold, ascending.

    Predictions at threshold t are the scores >= t; a final sentinel above the
    maximum score pins the (precision 1.0, recall 0.0) end of the curve.
    """
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels, dtype=bool)
    if scores.shape != labels.shape:
        raise ValueError("scores and labels must align")
    n_pos = int(labels.sum())
    points = []
    for t in np.unique(scores):
        sel = scores >= t
        tp = int((labels & sel).sum())
        n_pred = int(sel.sum())
        precision = tp / n_pred if n_pred else 1.0
        recall = tp / n_pos if n_pos else 1.0
        points.append(PRPoint(float(t), precision, recall))
    points.append(PRPoint(float("inf"), 1.0, 0.0 if n_pos else 1.0))
    return points


def pr_curve(
    model: LinearModel,
    labeled_docs: Sequence[LabeledDoc],
    space: FeatureSpace,
    lexicon: SentimentLexicon,
    stops: StopwordList,
) -> list[PRPoint]:
    """Precision/recall over all candidate words of the labeled documents."""
    if not labeled_docs:
        raise ValueError("labeled_docs must be non-empty")
    scores: list[float] = []
    labels: list[bool] = []
    for ld in labeled_docs:
        doc_scores = predict_scores(model, ld.doc, space, lexicon, stops)
        for i, s in doc_scores.items():
            scores.append(s)
            labels.append(i in ld.keyword_indices)
    return pr_points(scores, labels)


def select_threshold(curve: Sequence[PRPoint], min_precision: float = 0.6) -> float:
    """Smallest threshold meeting the precision floor (max recall wins)."""
    if not curve:
        raise ValueError("curve must be non-empty")
    for point in sorted(curve, key=lambda p: p.threshold):
        if point.precision >= min_precision:
            return point.threshold
    raise ThresholdUnattainableError(
        f"no threshold reaches precision {min_precision}"
    )


# ---------------------------------------------------------------------------
# cross-validation over videos

@dataclass(frozen=True)
class CrossValidationResult:
    pooled: EvalReport
    per_video: Mapping[str, EvalReport]
    macro_precision: float
    macro_recall: float
    macro_f1: float

    def to_dict(self) -> dict:
        return {
            "pooled": self.pooled.to_dict(),
            "per_video": {k: v.to_dict() for k, v in self.per_video.items()},
            "macro_precision": self.macro_precision,
            "macro_recall": self.macro_recall,
            "macro_f1": self.macro_f1,
        }


def doc_examples(
    labeled: LabeledDoc,
    space: FeatureSpace,
    lexicon: SentimentLexicon,
    stops: StopwordList,
) -> list[LabeledExample]:
    """Candidate (non-stopword) words of a labeled doc as training examples."""
    word_indices, vectors = featurize_doc(space, lexicon, labeled.doc, stops)
    return [
        LabeledExample(vec, idx in labeled.keyword_indices, labeled.doc.video_id, idx)
        for idx, vec in zip(word_indices, vectors)
    ]


def _check_leakage(corpus: Sequence[LabeledDoc]):
    seen: dict[tuple, str] = {}
    for ld in corpus:
        key = tuple(w.norm for w in ld.doc.words)
        other = seen.get(key)
        if other is not None and other != ld.doc.video_id:
            raise DataLeakageError(
                f"videos {other!r} and {ld.doc.video_id!r} share an identical word sequence"
            )
        seen.setdefault(key, ld.doc.video_id)


def cross_validate(
    corpus: Sequence[LabeledDoc],
    cfg: TrainConfig,
    *,
    stops: StopwordList,
    lexicon: SentimentLexicon,
    tagset: Sequence[str],
    max_vocab: int = DEFAULT_MAX_VOCAB,
) -> CrossValidationResult:
    """Leave-one-video-out evaluation.

    Each fold rebuilds the feature space from the training videos only, so
    nothing from the held-out video (not even document frequencies) touches
    the model that scores it.
    """
    videos = sorted({ld.doc.video_id for ld in corpus})
    if len(videos) < 2:
        raise ValueError("cross-validation needs at least 2 videos")
    _check_leakage(corpus)
    tagged = [LabeledDoc(tag_pos(ld.doc), ld.keyword_indices) for ld in corpus]
    per_video: dict[str, EvalReport] = {}
    tp = fp = fn = 0
    for held_out in videos:
        train_docs = [ld for ld in tagged if ld.doc.video_id != held_out]
        test_docs = [ld for ld in tagged if ld.doc.video_id == held_out]
        space = build_feature_space([ld.doc for ld in train_docs], stops, tagset, max_vocab)
        examples = [ex for ld in train_docs for ex in doc_examples(ld, space, lexicon, stops)]
        model = train(examples, cfg, feature_space_id=space.space_id)
        v_tp = v_fp = v_fn = 0
        for ld in test_docs:
            predicted = set(predict_keywords(model, ld.doc, space, lexicon, stops))
            truth = {
                i for i in ld.keyword_indices
                if ld.doc.words[i].norm not in stops
            }
            report = evaluate(predicted, truth)
            v_tp += report.tp
            v_fp += report.fp
            v_fn += report.fn
        per_video[held_out] = report_from_counts(v_tp, v_fp, v_fn)
        tp += v_tp
        fp += v_fp
        fn += v_fn
    pooled = report_from_counts(tp, fp, fn, per_video=per_video)
    reports = list(per_video.values())
    return CrossValidationResult(
        pooled=pooled,
        per_video=per_video,
        macro_precision=float(np.mean([r.precision for r in reports])),
        macro_recall=float(np.mean([r.recall for r in reports])),
        macro_f1=float(np.mean([r.f1 for r in reports])),
    )


def label_keywords(
    transcripts: Mapping[str, TimedTranscript],
    edit_sets: Sequence[EditSet],
    min_experts: int = 2,
) -> list[LabeledDoc]:
    """Derive keyword labels from expert edits.

    A word is a keyword when at least ``min_experts`` insertions (across all
    editors of that video) start on it; an insertion's start word is resolved
    with the gap-snapping time lookup.
    """
    starts_per_word: dict[str, dict[int, int]] = {vid: {} for vid in transcripts}
    for es in edit_sets:
        doc = transcripts.get(es.video_id)
        if doc is None:
            continue
        for ins in es.insertions:
            if ins.start_s > doc.duration_s:
                continue
            idx = doc.word_at_time(ins.start_s)
            if idx is None:
                continue
            counts = starts_per_word[es.video_id]
            counts[idx] = counts.get(idx, 0) + 1
    return [
        LabeledDoc(
            doc=doc,
            keyword_indices=frozenset(
                i for i, c in starts_per_word[vid].items() if c >= min_experts
            ),
        )
        for vid, doc in transcripts.items()
    ]
