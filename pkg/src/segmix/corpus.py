"""Corpora for token tagging and relation classification.

Two on-disk formats are supported:

* NER: one ``<token>\\t<label>`` pair per line (a single space also works as
  the separator), blank line between sentences, ``-DOCSTART-`` lines skipped.
  Labels follow the BIO scheme: ``O``, ``B-<type>``, ``I-<type>``.
* RE: one sample per line, six tab-separated fields:
  ``tokens`` (space-joined), ``e1_start``, ``e1_end``, ``e2_start``,
  ``e2_end``, ``relation``. Span indices are token offsets, end-exclusive.

Parsed corpora are immutable; label and token vocabularies are kept in
first-occurrence order so one-hot indices stay stable when a corpus grows.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import Iterable, Iterator, TextIO, Union

from .rng import derive_rng


class CorpusFormatError(ValueError):
    """Malformed input line (field count, span arithmetic, bad label)."""


class BioValidationError(CorpusFormatError):
    """An I- label with no matching B-/I- of the same type before it."""


def split_bio(label: str) -> tuple[str, str | None]:
    """Split a BIO label into (kind, entity type): ``B-LOC`` -> ("B", "LOC")."""
    if label == "O":
        return "O", None
    if len(label) > 2 and label[1] == "-" and label[0] in ("B", "I"):
        return label[0], label[2:]
    raise CorpusFormatError(f"not a BIO label: {label!r}")


def bio_spans(labels: Iterable[str]) -> list[tuple[int, int, str]]:
    """Extract maximal mention spans as (start, end, type), end-exclusive.

    Assumes the sequence is BIO-valid; an I- run directly continues the
    mention opened by its B-.
    """
    labels = list(labels)
    spans = []
    start = None
    span_type = None
    for i, label in enumerate(labels):
        kind, etype = split_bio(label)
        if kind == "B":
            if start is not None:
                spans.append((start, i, span_type))
            start, span_type = i, etype
        elif kind == "I":
            continue
        else:
            if start is not None:
                spans.append((start, i, span_type))
                start, span_type = None, None
    if start is not None:
        spans.append((start, len(labels), span_type))
    return spans


def validate_bio(labels: Iterable[str], repair: bool = False) -> tuple[str, ...]:
    """Check BIO validity; optionally promote stray I-X to B-X.

    Returns the (possibly repaired) label tuple, or raises
    BioValidationError naming the offending position.
    """
    out = []
    prev_kind, prev_type = "O", None
    for i, label in enumerate(labels):
        kind, etype = split_bio(label)
        if kind == "I" and not (prev_kind in ("B", "I") and prev_type == etype):
            if repair:
                kind, label = "B", f"B-{etype}"
            else:
                raise BioValidationError(
                    f"I-{etype} at position {i} has no preceding B-{etype}/I-{etype}"
                )
        out.append(label)
        prev_kind, prev_type = kind, etype
    return tuple(out)


@dataclass(frozen=True)
class Sentence:
    """A tokenized sentence with one BIO label per token."""

    tokens: tuple[str, ...]
    labels: tuple[str, ...]

    def __post_init__(self):
        if len(self.tokens) != len(self.labels) or not self.tokens:
            raise CorpusFormatError(
                f"sentence needs equal, nonzero token/label counts "
                f"(got {len(self.tokens)}/{len(self.labels)})"
            )

    def __len__(self) -> int:
        return len(self.tokens)

    def mentions(self) -> list[tuple[int, int, str]]:
        return bio_spans(self.labels)


@dataclass(frozen=True)
class Span:
    """Token span, start inclusive, end exclusive."""

    start: int
    end: int

    def __post_init__(self):
        if not 0 <= self.start < self.end:
            raise CorpusFormatError(f"bad span ({self.start}, {self.end})")

    def __len__(self) -> int:
        return self.end - self.start

    def overlaps(self, other: "Span") -> bool:
        return self.start < other.end and other.start < self.end


@dataclass(frozen=True)
class RESample:
    """A sentence with two gold nominal spans and a directed relation label."""

    tokens: tuple[str, ...]
    e1: Span
    e2: Span
    relation: str

    def __post_init__(self):
        n = len(self.tokens)
        for name, span in (("e1", self.e1), ("e2", self.e2)):
            if span.end > n:
                raise CorpusFormatError(f"{name} span {span} exceeds {n} tokens")
        if self.e1.overlaps(self.e2):
            raise CorpusFormatError(f"overlapping nominal spans {self.e1} / {self.e2}")


def _first_occurrence(items: Iterable[str]) -> tuple[str, ...]:
    return tuple(dict.fromkeys(items))


@dataclass(frozen=True)
class TaggedCorpus:
    """BIO-labeled sentences plus deterministic label/token vocabularies."""

    sentences: tuple[Sentence, ...]
    label_vocab: tuple[str, ...] = field(default=())
    token_vocab: tuple[str, ...] = field(default=())

    @classmethod
    def from_sentences(cls, sentences: Iterable[Sentence]) -> "TaggedCorpus":
        sentences = tuple(sentences)
        labels = _first_occurrence(l for s in sentences for l in s.labels)
        if "O" not in labels:
            labels = labels + ("O",)
        tokens = _first_occurrence(t for s in sentences for t in s.tokens)
        return cls(sentences, labels, tokens)

    def __len__(self) -> int:
        return len(self.sentences)


@dataclass(frozen=True)
class RECorpus:
    """Relation samples plus relation and token vocabularies."""

    samples: tuple[RESample, ...]
    relation_vocab: tuple[str, ...] = field(default=())
    token_vocab: tuple[str, ...] = field(default=())

    @classmethod
    def from_samples(cls, samples: Iterable[RESample]) -> "RECorpus":
        samples = tuple(samples)
        return cls(
            samples,
            _first_occurrence(s.relation for s in samples),
            _first_occurrence(t for s in samples for t in s.tokens),
        )

    def __len__(self) -> int:
        return len(self.samples)


Corpus = Union[TaggedCorpus, RECorpus]


def _iter_lines(source: str | TextIO | Iterable[str]) -> Iterator[str]:
    if isinstance(source, str):
        yield from io.StringIO(source)
    else:
        yield from source


def parse_conll(source: str | TextIO | Iterable[str], repair_bio: bool = False) -> TaggedCorpus:
    """Parse NER data from a string, open file, or iterable of lines.

    ``repair_bio=True`` promotes stray I-X labels to B-X instead of
    rejecting the sentence (public corpora contain such noise).
    """
    sentences: list[Sentence] = []
    tokens: list[str] = []
    labels: list[str] = []

    def flush(lineno: int):
        if not tokens:
            return
        try:
            fixed = validate_bio(labels, repair=repair_bio)
        except BioValidationError as err:
            raise BioValidationError(
                f"sentence {len(sentences)} (ending line {lineno}): {err}"
            ) from None
        sentences.append(Sentence(tuple(tokens), fixed))
        tokens.clear()
        labels.clear()

    lineno = 0
    for lineno, raw in enumerate(_iter_lines(source), start=1):
        line = raw.rstrip("\n").rstrip("\r")
        if not line.strip():
            flush(lineno)
            continue
        fields = line.split()
        if fields[0] == "-DOCSTART-":
            continue
        if len(fields) != 2:
            raise CorpusFormatError(
                f"line {lineno}: expected '<token> <label>', got {len(fields)} fields"
            )
        token, label = fields
        split_bio(label)  # syntax check, raises CorpusFormatError
        tokens.append(token)
        labels.append(label)
    flush(lineno + 1)
    return TaggedCorpus.from_sentences(sentences)


def parse_re(source: str | TextIO | Iterable[str]) -> RECorpus:
    """Parse RE data (six-field TSV) from a string, file, or line iterable."""
    samples = []
    for lineno, raw in enumerate(_iter_lines(source), start=1):
        line = raw.rstrip("\n").rstrip("\r")
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) != 6:
            raise CorpusFormatError(f"line {lineno}: expected 6 fields, got {len(fields)}")
        text, *offsets, relation = fields
        tokens = tuple(text.split())
        try:
            s1, e1, s2, e2 = (int(x) for x in offsets)
        except ValueError:
            raise CorpusFormatError(f"line {lineno}: non-integer span offset") from None
        try:
            sample = RESample(tokens, Span(s1, e1), Span(s2, e2), relation)
        except CorpusFormatError as err:
            raise CorpusFormatError(f"line {lineno}: {err}") from None
        samples.append(sample)
    return RECorpus.from_samples(samples)


def write_corpus(corpus: Corpus, stream: TextIO) -> None:
    """Serialize a corpus so that parse(write(c)) == c."""
    if isinstance(corpus, TaggedCorpus):
        for i, sent in enumerate(corpus.sentences):
            if i:
                stream.write("\n")
            for token, label in zip(sent.tokens, sent.labels):
                stream.write(f"{token}\t{label}\n")
    elif isinstance(corpus, RECorpus):
        for s in corpus.samples:
            stream.write(
                "\t".join(
                    (
                        " ".join(s.tokens),
                        str(s.e1.start),
                        str(s.e1.end),
                        str(s.e2.start),
                        str(s.e2.end),
                        s.relation,
                    )
                )
                + "\n"
            )
    else:
        raise TypeError(f"not a corpus: {type(corpus).__name__}")


def corpus_to_text(corpus: Corpus) -> str:
    buf = io.StringIO()
    write_corpus(corpus, buf)
    return buf.getvalue()


def downsample(corpus: Corpus, size: int, seed: int) -> Corpus:
    """Uniform subsample without replacement; deterministic for a fixed seed.

    Vocabularies are rebuilt from the subset.
    """
    n = len(corpus)
    if not 0 <= size <= n:
        raise ValueError(f"size {size} out of range for corpus of {n}")
    rng = derive_rng(seed, "downsample")
    idx = rng.choice(n, size=size, replace=False)
    if isinstance(corpus, TaggedCorpus):
        return TaggedCorpus.from_sentences(corpus.sentences[i] for i in idx)
    return RECorpus.from_samples(corpus.samples[i] for i in idx)
