"""Shared fixtures: lexicons, transcript builders, the planted-rule corpus."""

from pathlib import Path

import numpy as np
import pytest

from cutaway.classifier import LabeledDoc
from cutaway.features import load_sentiment_lexicon, load_tagset
from cutaway.transcript import load_stopwords, parse_transcript

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

# filled by tests/test_acceptance.py; echoed after the run so the pass/fail
# verdict per criterion survives output capture
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

# planted-rule vocabulary: these words are always keywords when they appear
HOT_WORDS = (
    "camera", "kitchen", "guitar", "ocean", "puppy", "coffee",
    "garden", "engine", "market", "temple", "window", "bridge",
)
_CONS = "bcdfglmnpr"
_FILLER = tuple(
    c1 + v + c2 + "a" for c1 in _CONS for v in "ae" for c2 in _CONS[:5]
)[:100]
_STOP_POOL = ("the", "and", "i", "was", "to", "a", "of", "it", "is", "that")


def make_transcript(tokens, *, video_id="t", word_s=0.35, stride_s=0.45,
                    start_s=0.25, duration_s=None, language="en"):
    """Evenly spaced transcript from a token list (or space-joined string)."""
    if isinstance(tokens, str):
        tokens = tokens.split()
    words = []
    t = start_s
    for tok in tokens:
        words.append({"text": tok, "start_s": round(t, 4),
                      "end_s": round(t + word_s, 4), "pos": None})
        t += stride_s
    if duration_s is None:
        duration_s = round(t + 1.0, 4)
    return parse_transcript({
        "video_id": video_id, "duration_s": duration_s,
        "language": language, "words": words,
    })


def planted_corpus(n_videos=8, n_words=400, seed=7):
    """Synthetic labeled videos where keyword-ness is a planted linear rule:
    a word is a keyword iff it belongs to HOT_WORDS."""
    rng = np.random.default_rng(seed)
    docs = []
    for v in range(n_videos):
        tokens = []
        for _ in range(n_words):
            r = rng.random()
            if r < 0.12:
                tokens.append(HOT_WORDS[rng.integers(len(HOT_WORDS))])
            elif r < 0.70:
                tokens.append(_FILLER[rng.integers(len(_FILLER))])
            else:
                tokens.append(_STOP_POOL[rng.integers(len(_STOP_POOL))])
        doc = make_transcript(tokens, video_id=f"v{v + 1:02d}")
        labels = frozenset(
            i for i, w in enumerate(doc.words) if w.norm in HOT_WORDS
        )
        docs.append(LabeledDoc(doc, labels))
    return docs


@pytest.fixture(scope="session")
def stops():
    return load_stopwords()


@pytest.fixture(scope="session")
def lexicon():
    return load_sentiment_lexicon()


@pytest.fixture(scope="session")
def tagset():
    return load_tagset()


@pytest.fixture(scope="session")
def planted():
    return planted_corpus()
