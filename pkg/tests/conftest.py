"""Shared corpus builders for the test suite.

The random generators here are intentionally plain: uniform draws over
small vocabularies, explicit BIO assembly, no reuse of library helpers
whose behavior the tests are meant to check.
"""

import numpy as np
import pytest

from segmix.corpus import RECorpus, RESample, Sentence, Span, TaggedCorpus

ENTITY_TYPES = ("PER", "LOC", "ORG", "MISC")
RELATIONS = (
    "Cause-Effect(e1,e2)",
    "Cause-Effect(e2,e1)",
    "Member-Group(e1,e2)",
    "Other",
)


def random_sentence(rng, min_len=2, max_len=12, p_entity=0.35, types=ENTITY_TYPES):
    n = int(rng.integers(min_len, max_len + 1))
    tokens, labels = [], []
    i = 0
    while i < n:
        if rng.random() < p_entity and i < n:
            etype = types[int(rng.integers(len(types)))]
            length = min(int(rng.integers(1, 4)), n - i)
            for j in range(length):
                tokens.append(f"e{int(rng.integers(60))}")
                labels.append(("B-" if j == 0 else "I-") + etype)
            i += length
        else:
            tokens.append(f"w{int(rng.integers(120))}")
            labels.append("O")
            i += 1
    return Sentence(tuple(tokens), tuple(labels))


def random_corpus(rng, n_sentences=8, **kw) -> TaggedCorpus:
    return TaggedCorpus.from_sentences(
        [random_sentence(rng, **kw) for _ in range(n_sentences)]
    )


def random_re_sample(rng, relations=RELATIONS) -> RESample:
    n = int(rng.integers(6, 14))
    tokens = tuple(f"t{int(rng.integers(90))}" for _ in range(n))
    len1 = int(rng.integers(1, 3))
    len2 = int(rng.integers(1, 3))
    start1 = int(rng.integers(0, n - len1 - len2))
    start2 = int(rng.integers(start1 + len1, n - len2 + 1))
    relation = relations[int(rng.integers(len(relations)))]
    return RESample(
        tokens,
        Span(start1, start1 + len1),
        Span(start2, start2 + len2),
        relation,
    )


def random_re_corpus(rng, n_samples=8) -> RECorpus:
    return RECorpus.from_samples([random_re_sample(rng) for _ in range(n_samples)])


@pytest.fixture
def hand_corpus() -> TaggedCorpus:
    """Three sentences with known mentions, incl. one all-O sentence."""
    return TaggedCorpus.from_sentences([
        Sentence(
            ("new", "york", "city", "is", "big"),
            ("B-LOC", "I-LOC", "I-LOC", "O", "O"),
        ),
        Sentence(
            ("marcello", "cuttitta", "visited", "rome"),
            ("B-PER", "I-PER", "O", "B-LOC"),
        ),
        Sentence(("nothing", "here"), ("O", "O")),
    ])


@pytest.fixture
def hand_re_corpus() -> RECorpus:
    return RECorpus.from_samples([
        RESample(
            ("the", "storm", "caused", "damage", "."),
            Span(1, 2), Span(3, 4), "Cause-Effect(e1,e2)",
        ),
        RESample(
            ("a", "wheel", "of", "the", "cart", "broke"),
            Span(1, 2), Span(4, 5), "Component-Whole(e1,e2)",
        ),
        RESample(
            ("one", "thing", "and", "another", "thing"),
            Span(1, 2), Span(3, 5), "Other",
        ),
    ])
