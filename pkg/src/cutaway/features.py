"""Per-word feature extraction: TF-IDF, sentiment, POS one-hot, prior occurrences.

A word's vector is the concatenation of four blocks, in this fixed column
order::

    [0 .. V-1]      TF-IDF   single nonzero at the word's vocabulary column
    [V]             sentiment  lexicon valence in [-1, 1]
    [V+1 .. V+T]    POS        one-hot over the tagset (all-zero if unknown)
    [V+T+1]         occurrence count of earlier occurrences of the same norm

so the total dimension is D = V + T + 2 for a vocabulary of size V and a
tagset of size T.
"""

from __future__ import annotations

import hashlib
import json
import math
import re
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources
from typing import Mapping, Optional, Sequence

import numpy as np

from .errors import ArtifactFormatError, StopwordInputError
from .transcript import StopwordList, TimedTranscript, TimedWord, normalize_token

FEATURE_SPACE_FORMAT = "cutaway-feature-space"
FEATURE_SPACE_VERSION = 1

DEFAULT_MAX_VOCAB = 50_000


# ---------------------------------------------------------------------------
# sentiment


@dataclass(frozen=True)
class SentimentLexicon:
    """Word -> valence map with scores in [-1, 1]."""

    scores: Mapping[str, float]
    name: str = "custom"

    def __post_init__(self):
        for word, score in self.scores.items():
            if not -1.0 <= score <= 1.0:
                raise ValueError(f"valence for {word!r} out of [-1, 1]: {score}")

    def valence(self, norm: str) -> float:
        return self.scores.get(norm, 0.0)


def load_sentiment_lexicon(path=None) -> SentimentLexicon:
    """Load a UTF-8 TSV of ``word<TAB>valence``; defaults to the shipped lexicon."""
    if path is None:
        text = resources.files("cutaway.data").joinpath("sentiment_lexicon.tsv").read_text("utf-8")
        name = "builtin-en"
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
        name = str(path)
    scores: dict[str, float] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise ValueError(f"{name}:{lineno}: expected word<TAB>valence")
        scores[normalize_token(parts[0])] = float(parts[1])
    return SentimentLexicon(scores=scores, name=name)


def sentiment(lex: SentimentLexicon, word: TimedWord) -> float:
    """Valence of the word's norm; 0.0 for words outside the lexicon."""
    return lex.valence(word.norm)


# ---------------------------------------------------------------------------
# part-of-speech tagging

_NUM_RE = re.compile(r"^\d+([.,:]\d+)*(st|nd|rd|th|s|%)?$")

# Checked in order; a rule only fires when the stem keeps at least 3 chars.
_SUFFIX_RULES = (
    ("tion", "NOUN"),
    ("sion", "NOUN"),
    ("ness", "NOUN"),
    ("ment", "NOUN"),
    ("ship", "NOUN"),
    ("able", "ADJ"),
    ("ible", "ADJ"),
    ("ical", "ADJ"),
    ("ing", "VERB"),
    ("ize", "VERB"),
    ("ise", "VERB"),
    ("ify", "VERB"),
    ("ity", "NOUN"),
    ("ism", "NOUN"),
    ("ous", "ADJ"),
    ("ful", "ADJ"),
    ("ive", "ADJ"),
    ("ed", "VERB"),
    ("ly", "ADV"),
)

DEFAULT_TAG = "NOUN"


def load_tagset(path=None) -> tuple[str, ...]:
    """Ordered POS tagset, one tag per line; defaults to the 17-tag universal set."""
    if path is None:
        text = resources.files("cutaway.data").joinpath("tagset_upos.txt").read_text("utf-8")
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    tags = tuple(line.strip() for line in text.splitlines() if line.strip() and not line.startswith("#"))
    if len(set(tags)) != len(tags):
        raise ValueError("tagset contains duplicates")
    return tags


def load_tag_lexicon(path=None) -> dict[str, str]:
    """word -> tag dictionary for the rule tagger; later duplicates win."""
    if path is None:
        text = resources.files("cutaway.data").joinpath("tag_lexicon.tsv").read_text("utf-8")
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    lex: dict[str, str] = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        word, tag = line.split("\t")
        lex[word] = tag
    return lex


_DEFAULT_TAG_LEXICON: Optional[dict[str, str]] = None


def _default_tag_lexicon() -> dict[str, str]:
    global _DEFAULT_TAG_LEXICON
    if _DEFAULT_TAG_LEXICON is None:
        _DEFAULT_TAG_LEXICON = load_tag_lexicon()
    return _DEFAULT_TAG_LEXICON


def tag_word(norm: str, lexicon: Optional[Mapping[str, str]] = None) -> str:
    if lexicon is None:
        lexicon = _default_tag_lexicon()
    if norm in lexicon:
        return lexicon[norm]
    if _NUM_RE.match(norm):
        return "NUM"
    for suffix, tag in _SUFFIX_RULES:
        if norm.endswith(suffix) and len(norm) >= len(suffix) + 3:
            return tag
    return DEFAULT_TAG


def tag_pos(doc: TimedTranscript, lexicon: Optional[Mapping[str, str]] = None) -> TimedTranscript:
    """Fill pos_tag for every untagged word; caller-supplied tags are kept."""
    tags = [None if w.pos_tag is not None else tag_word(w.norm, lexicon) for w in doc.words]
    return doc.with_pos_tags(tags)


def pos_onehot(tag: Optional[str], tagset: Sequence[str]) -> np.ndarray:
    """One-hot vector over the tagset; all-zero for an unknown or missing tag."""
    vec = np.zeros(len(tagset), dtype=np.float64)
    if tag is not None and tag in tagset:
        vec[list(tagset).index(tag)] = 1.0
    return vec


# ---------------------------------------------------------------------------
# corpus statistics

@dataclass(frozen=True)
class FeatureSpace:
    """Corpus-derived vocabulary, IDF table and tagset.

    The vocabulary maps word -> column index; columns are assigned in
    lexicographic word order so artifacts are reproducible.
    """

    vocabulary: Mapping[str, int]
    idf: np.ndarray           # aligned with vocabulary columns
    tagset: tuple[str, ...]
    corpus_doc_count: int
    space_id: str = field(default="")

    def __post_init__(self):
        if not self.space_id:
            object.__setattr__(self, "space_id", self._compute_id())

    def _compute_id(self) -> str:
        payload = json.dumps(
            [sorted(self.vocabulary.items(), key=lambda kv: kv[1]),
             [repr(v) for v in self.idf.tolist()],
             list(self.tagset), self.corpus_doc_count],
            ensure_ascii=False,
        ).encode("utf-8")
        return hashlib.sha256(payload).hexdigest()[:16]

    @property
    def vocab_size(self) -> int:
        return len(self.vocabulary)

    @property
    def dim(self) -> int:
        return len(self.vocabulary) + len(self.tagset) + 2

    @property
    def sentiment_col(self) -> int:
        return len(self.vocabulary)

    @property
    def pos_col0(self) -> int:
        return len(self.vocabulary) + 1

    @property
    def occurrence_col(self) -> int:
        return len(self.vocabulary) + 1 + len(self.tagset)

    def idf_of(self, norm: str) -> float:
        col = self.vocabulary.get(norm)
        return float(self.idf[col]) if col is not None else 0.0

    def to_dict(self) -> dict:
        words = [None] * len(self.vocabulary)
        for word, col in self.vocabulary.items():
            words[col] = word
        return {
            "format": FEATURE_SPACE_FORMAT,
            "version": FEATURE_SPACE_VERSION,
            "space_id": self.space_id,
            "corpus_doc_count": self.corpus_doc_count,
            "tagset": list(self.tagset),
            "vocabulary": words,
            "idf": self.idf.tolist(),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "FeatureSpace":
        if doc.get("format") != FEATURE_SPACE_FORMAT:
            raise ArtifactFormatError("not a feature-space artifact")
        if doc.get("version") != FEATURE_SPACE_VERSION:
            raise ArtifactFormatError(f"unsupported feature-space version {doc.get('version')}")
        vocab = {w: i for i, w in enumerate(doc["vocabulary"])}
        return cls(
            vocabulary=vocab,
            idf=np.asarray(doc["idf"], dtype=np.float64),
            tagset=tuple(doc["tagset"]),
            corpus_doc_count=int(doc["corpus_doc_count"]),
            space_id=doc.get("space_id", ""),
        )

    def save(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, ensure_ascii=False)

    @classmethod
    def load(cls, path) -> "FeatureSpace":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


def build_feature_space(
    corpus: Sequence[TimedTranscript],
    stops: StopwordList,
    tagset: Sequence[str],
    max_vocab: int = DEFAULT_MAX_VOCAB,
) -> FeatureSpace:
    """Collect vocabulary and smoothed IDF over a transcript corpus.

    idf(w) = ln((1 + N) / (1 + df(w))) + 1 with df = number of corpus
    documents containing w. Stopwords never enter the vocabulary. When the
    vocabulary exceeds ``max_vocab`` the most frequent words win, ties broken
    lexicographically.
    """
    if not corpus:
        raise ValueError("corpus must be non-empty")
    df: Counter = Counter()
    freq: Counter = Counter()
    for doc in corpus:
        norms = [w.norm for w in doc.words if w.norm not in stops]
        freq.update(norms)
        df.update(set(norms))
    words = sorted(freq, key=lambda w: (-freq[w], w))[:max_vocab]
    words.sort()
    n_docs = len(corpus)
    idf = np.array(
        [math.log((1 + n_docs) / (1 + df[w])) + 1.0 for w in words],
        dtype=np.float64,
    )
    vocabulary = {w: i for i, w in enumerate(words)}
    return FeatureSpace(
        vocabulary=vocabulary, idf=idf, tagset=tuple(tagset),
        corpus_doc_count=n_docs,
    )


def term_counts(doc: TimedTranscript) -> Counter:
    """Raw term frequency of every norm in the document."""
    return Counter(w.norm for w in doc.words)


def tfidf(
    space: FeatureSpace,
    doc: TimedTranscript,
    word_index: int,
    counts: Optional[Counter] = None,
) -> float:
    """tf(w, doc) * idf(w); 0 for out-of-vocabulary words.

    ``counts`` may carry a precomputed term_counts(doc) to avoid a rescan.
    """
    word = doc.words[word_index]
    col = space.vocabulary.get(word.norm)
    if col is None:
        return 0.0
    if counts is None:
        counts = term_counts(doc)
    return counts[word.norm] * float(space.idf[col])


def occurrence_count(doc: TimedTranscript, word_index: int) -> int:
    """Number of occurrences of the same norm strictly before word_index."""
    norm = doc.words[word_index].norm
    return sum(1 for w in doc.words[:word_index] if w.norm == norm)


# ---------------------------------------------------------------------------
# assembled per-word vectors

@dataclass(eq=False)
class WordFeatureVector:
    """Sparse feature vector (ascending column order) for one transcript word."""

    word_index: int
    dim: int
    indices: np.ndarray
    values: np.ndarray

    def __eq__(self, other):
        return (
            isinstance(other, WordFeatureVector)
            and self.word_index == other.word_index
            and self.dim == other.dim
            and np.array_equal(self.indices, other.indices)
            and np.array_equal(self.values, other.values)
        )

    def entries(self) -> list[tuple[int, float]]:
        return list(zip(self.indices.tolist(), self.values.tolist()))

    def to_dense(self) -> np.ndarray:
        dense = np.zeros(self.dim, dtype=np.float64)
        dense[self.indices] = self.values
        return dense


def featurize_word(
    space: FeatureSpace,
    lexicon: SentimentLexicon,
    doc: TimedTranscript,
    word_index: int,
    *,
    stops: Optional[StopwordList] = None,
    counts: Optional[Counter] = None,
    prior_occurrences: Optional[int] = None,
) -> WordFeatureVector:
    """Concatenated TF-IDF / sentiment / POS / occurrence vector for one word.

    Stopwords are rejected when a stopword list is supplied; zero-valued
    blocks are simply absent from the sparse entries.
    """
    word = doc.words[word_index]
    if stops is not None and word.norm in stops:
        raise StopwordInputError(f"word {word.norm!r} is a stopword")
    cols: list[int] = []
    vals: list[float] = []

    tfidf_value = tfidf(space, doc, word_index, counts=counts)
    col = space.vocabulary.get(word.norm)
    if col is not None and tfidf_value != 0.0:
        cols.append(col)
        vals.append(tfidf_value)

    val = lexicon.valence(word.norm)
    if val != 0.0:
        cols.append(space.sentiment_col)
        vals.append(val)

    if word.pos_tag is not None and word.pos_tag in space.tagset:
        cols.append(space.pos_col0 + space.tagset.index(word.pos_tag))
        vals.append(1.0)

    occ = prior_occurrences if prior_occurrences is not None else occurrence_count(doc, word_index)
    if occ > 0:
        cols.append(space.occurrence_col)
        vals.append(float(occ))

    return WordFeatureVector(
        word_index=word_index,
        dim=space.dim,
        indices=np.asarray(cols, dtype=np.int64),
        values=np.asarray(vals, dtype=np.float64),
    )


def featurize_doc(
    space: FeatureSpace,
    lexicon: SentimentLexicon,
    doc: TimedTranscript,
    stops: StopwordList,
) -> tuple[list[int], list[WordFeatureVector]]:
    """Vectors for every non-stopword word, with shared per-doc statistics."""
    counts = term_counts(doc)
    seen: Counter = Counter()
    indices: list[int] = []
    vectors: list[WordFeatureVector] = []
    for word in doc.words:
        occ = seen[word.norm]
        seen[word.norm] += 1
        if word.norm in stops:
            continue
        indices.append(word.index)
        vectors.append(featurize_word(
            space, lexicon, doc, word.index,
            counts=counts, prior_occurrences=occ,
        ))
    return indices, vectors
