"""Segment-level interpolation: the augmentation engine.

An augmented example is built by embedding a sentence, drawing a mix
weight ``lam ~ Beta(alpha, alpha)``, picking a task-specific segment in
the sentence and a partner segment from a pool, padding the shorter of
the two with zero rows, and writing ``lam * a + (1 - lam) * b`` back over
the segment's row range, for both the embedding matrix and the one-hot
label matrix. ``lam = 1`` reproduces the original example; ``lam = 0`` is
plain replacement, which is also available directly in token space via
:func:`replacement_da`.

Randomness is counter-based: every generation slot gets its own stream
derived from (seed, "slot", index), so runs are reproducible and
order-independent regardless of scheduling.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Mapping, Sequence, Union

import numpy as np

from .corpus import RECorpus, RESample, Sentence, Span, TaggedCorpus, split_bio
from .pools import (
    EmptyPoolError,
    SegmentPool,
    SynonymLexicon,
    build_mention_pool,
    build_relation_pool,
    build_sequence_pool,
    build_token_pool,
)
from .rng import derive_rng

log = logging.getLogger(__name__)

NER_VARIANTS = ("mention", "token", "synonym", "whole_sequence")
RE_VARIANTS = ("relation",)
VARIANTS = NER_VARIANTS + RE_VARIANTS


def _stable_bucket(surface: str, n_buckets: int) -> int:
    import hashlib

    digest = hashlib.sha256(surface.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little") % n_buckets


class EmbeddingTable:
    """Dense vectors for a fixed vocabulary with hash-bucket fallback.

    Lookup is a pure function of (table, surface): known surfaces map to
    their vocabulary row, unknown surfaces map deterministically to one of
    ``n_buckets`` extra rows.
    """

    def __init__(self, tokens: Sequence[str], vectors: np.ndarray, n_buckets: int):
        if vectors.ndim != 2 or len(vectors) != len(tokens) + n_buckets:
            raise ValueError(
                f"need {len(tokens)} + {n_buckets} rows, got {vectors.shape}"
            )
        self.tokens = tuple(tokens)
        self.vectors = np.asarray(vectors, dtype=np.float64)
        self.n_buckets = n_buckets
        self._index = {t: i for i, t in enumerate(self.tokens)}

    @classmethod
    def random(
        cls,
        tokens: Sequence[str],
        dim: int,
        seed: int,
        n_buckets: int = 64,
    ) -> "EmbeddingTable":
        """Seeded unit-gaussian table over ``tokens`` plus unknown buckets."""
        rng = derive_rng(seed, "embedding-table")
        vectors = rng.standard_normal((len(tokens) + n_buckets, dim))
        return cls(tokens, vectors, n_buckets)

    @classmethod
    def subword(
        cls,
        tokens: Sequence[str],
        dim: int,
        seed: int,
        noise: float = 0.45,
        n_buckets: int = 64,
    ) -> "EmbeddingTable":
        """Character-trigram table: surface-similar tokens get nearby rows.

        Each token's vector is the normalized sum of seeded gaussian
        vectors for its padded character trigrams, blended with a
        token-specific noise direction and rescaled to the sqrt(dim) row
        norm the random table has in expectation. Stands in for
        pretrained embeddings when only surface form carries similarity.
        """
        cache: dict[str, np.ndarray] = {}

        def gram_vec(gram: str) -> np.ndarray:
            if gram not in cache:
                cache[gram] = derive_rng(seed, "gram", gram).standard_normal(dim)
            return cache[gram]

        scale = np.sqrt(dim)
        rows = np.zeros((len(tokens), dim))
        tok_rng = derive_rng(seed, "tok-noise")
        for i, tok in enumerate(tokens):
            padded = f"<{tok}>"
            grams = [padded[j : j + 3] for j in range(len(padded) - 2)]
            v = np.sum([gram_vec(g) for g in grams], axis=0)
            v = v / max(np.linalg.norm(v), 1e-9)
            direction = tok_rng.standard_normal(dim)
            v = v + noise * direction / np.linalg.norm(direction)
            rows[i] = scale * v / np.linalg.norm(v)
        buckets = derive_rng(seed, "buckets").standard_normal((n_buckets, dim))
        return cls(tokens, np.vstack([rows, buckets]), n_buckets)

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    @property
    def vocab_size(self) -> int:
        return len(self.tokens)

    def index(self, surface: str) -> int:
        row = self._index.get(surface)
        if row is None:
            row = self.vocab_size + _stable_bucket(surface, self.n_buckets)
        return row

    def embed(self, tokens: Sequence[str]) -> np.ndarray:
        """Row j is the vector for token j; shape (len(tokens), dim)."""
        if not tokens:
            return np.zeros((0, self.dim))
        return self.vectors[[self.index(t) for t in tokens]]


def one_hot(labels: Sequence[str], vocab: Sequence[str]) -> np.ndarray:
    """One-hot rows over ``vocab``; unknown labels raise ValueError."""
    index = {l: i for i, l in enumerate(vocab)}
    out = np.zeros((len(labels), len(vocab)))
    for row, label in enumerate(labels):
        try:
            out[row, index[label]] = 1.0
        except KeyError:
            raise ValueError(f"label {label!r} not in vocabulary") from None
    return out


def sample_mix_ratio(alpha: float, rng: np.random.Generator) -> float:
    """One Beta(alpha, alpha) draw via the two-Gamma ratio construction."""
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    x = rng.gamma(alpha)
    y = rng.gamma(alpha)
    total = x + y
    if total == 0.0:
        return 0.5
    return float(x / total)


def pad_to_longer(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Extend the shorter matrix with zero rows; the longer passes through."""
    if a.shape[1] != b.shape[1]:
        raise ValueError(f"column mismatch: {a.shape} vs {b.shape}")
    rows = max(len(a), len(b))
    if len(a) < rows:
        a = np.vstack([a, np.zeros((rows - len(a), a.shape[1]))])
    elif len(b) < rows:
        b = np.vstack([b, np.zeros((rows - len(b), b.shape[1]))])
    return a, b


def mix(a: np.ndarray, b: np.ndarray, lam: float) -> np.ndarray:
    """Elementwise ``lam * a + (1 - lam) * b`` on equal-shape matrices."""
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    return lam * a + (1.0 - lam) * b


@dataclass
class MixConfig:
    """Knobs for a generation run.

    ``variant`` is one of "mention", "token", "synonym", "relation",
    "whole_sequence", or a "+"-joined combination such as "mention+token"
    (budget split by ``weights``, equal by default). ``fixed_lambda``
    bypasses the Beta draw, which is how the degenerate runs (identity at
    1.0, replacement at 0.0) are expressed.
    """

    alpha: float = 8.0
    rate: float = 0.2
    variant: str = "mention"
    weights: tuple[float, ...] | None = None
    pad_policy: str = "zero_pad"
    normalize_tail_labels: bool = False
    seed: int = 0
    fixed_lambda: float | None = None
    retry_limit: int = 16
    same_type_only: bool = False

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")
        if self.rate < 0:
            raise ValueError("rate must be nonnegative")
        if self.pad_policy != "zero_pad":
            raise ValueError(f"unsupported pad policy {self.pad_policy!r}")
        parts = self.variant_list()
        for part in parts:
            if part not in VARIANTS:
                raise ValueError(f"unknown variant {part!r}")
        if self.weights is not None:
            if len(self.weights) != len(parts):
                raise ValueError("weights must match the variant list")
            if abs(sum(self.weights) - 1.0) > 1e-9 or any(w < 0 for w in self.weights):
                raise ValueError("weights must be nonnegative and sum to 1")
        if self.fixed_lambda is not None and not 0.0 <= self.fixed_lambda <= 1.0:
            raise ValueError("fixed_lambda must lie in [0, 1]")

    def variant_list(self) -> list[str]:
        return self.variant.split("+")

    def variant_weights(self) -> list[float]:
        parts = self.variant_list()
        if self.weights is not None:
            return list(self.weights)
        return [1.0 / len(parts)] * len(parts)


@dataclass(frozen=True)
class Provenance:
    """Where a mixed example came from: source sentence, spans, partner, lam."""

    example_index: int
    variant: str
    lam: float
    spans: tuple[tuple[int, int], ...]
    mixed_spans: tuple[tuple[int, int], ...]
    pool_index: int | None = None
    replacements: tuple[str, ...] | None = None

    def to_json(self) -> dict:
        out = {
            "example_index": self.example_index,
            "variant": self.variant,
            "lam": self.lam,
            "spans": [list(s) for s in self.spans],
            "mixed_spans": [list(s) for s in self.mixed_spans],
            "pool_index": self.pool_index,
        }
        if self.replacements is not None:
            out["replacements"] = list(self.replacements)
        return out

    @classmethod
    def from_json(cls, data: dict) -> "Provenance":
        return cls(
            example_index=data["example_index"],
            variant=data["variant"],
            lam=data["lam"],
            spans=tuple(tuple(s) for s in data["spans"]),
            mixed_spans=tuple(tuple(s) for s in data["mixed_spans"]),
            pool_index=data.get("pool_index"),
            replacements=(
                tuple(data["replacements"]) if data.get("replacements") else None
            ),
        )


@dataclass
class MixedExample:
    """Per-position embeddings and soft labels for one augmented sentence."""

    embeddings: np.ndarray
    soft_labels: np.ndarray
    provenance: Provenance

    def __post_init__(self):
        if len(self.embeddings) != len(self.soft_labels):
            raise ValueError("embedding and soft-label row counts differ")

    def __len__(self) -> int:
        return len(self.embeddings)


@dataclass
class MixedRESample:
    """Embeddings with both nominal spans mixed, plus a soft relation label."""

    embeddings: np.ndarray
    soft_relation: np.ndarray
    e1: Span
    e2: Span
    provenance: Provenance


@dataclass
class GenerationResult:
    examples: list
    skipped: int
    requested: int


@dataclass
class ReplacementResult:
    corpus: Union[TaggedCorpus, RECorpus]
    skipped: int
    requested: int


def select_segment(
    example: Union[Sentence, RESample],
    variant: str,
    rng: np.random.Generator,
    lexicon: SynonymLexicon | None = None,
) -> tuple[tuple[int, int], ...] | None:
    """Pick the segment span(s) to mix, or None when nothing is eligible.

    mention: uniform over the sentence's mention spans; token: uniform over
    labeled (non-O) tokens; synonym: uniform over tokens with a lexicon
    entry; whole_sequence: the full range; relation: the gold (e1, e2).
    """
    if variant == "relation":
        if not isinstance(example, RESample):
            raise TypeError("relation variant needs an RESample")
        return ((example.e1.start, example.e1.end), (example.e2.start, example.e2.end))
    if not isinstance(example, Sentence):
        raise TypeError(f"{variant} variant needs a Sentence")
    if variant == "whole_sequence":
        return ((0, len(example)),)
    if variant == "mention":
        mentions = example.mentions()
        if not mentions:
            return None
        start, end, _ = mentions[int(rng.integers(len(mentions)))]
        return ((start, end),)
    if variant == "token":
        eligible = [i for i, l in enumerate(example.labels) if split_bio(l)[0] != "O"]
    elif variant == "synonym":
        if lexicon is None:
            raise ValueError("synonym variant needs a lexicon")
        eligible = [i for i, t in enumerate(example.tokens) if t in lexicon]
    else:
        raise ValueError(f"unknown variant {variant!r}")
    if not eligible:
        return None
    pos = eligible[int(rng.integers(len(eligible)))]
    return ((pos, pos + 1),)


@dataclass(frozen=True)
class _Plan:
    """Resolved randomness for one generation slot."""

    slot: int
    example_index: int
    variant: str
    lam: float
    spans: tuple[tuple[int, int], ...]
    pool_index: int | None
    partner_segments: tuple[tuple[str, ...], ...]
    partner_labels: tuple[tuple[str, ...], ...] | str | None


PoolSpec = Union[SegmentPool, SynonymLexicon, Mapping[str, Union[SegmentPool, SynonymLexicon]], None]


def _normalize_pools(
    corpus: Union[TaggedCorpus, RECorpus], pools: PoolSpec, config: MixConfig
) -> dict[str, Union[SegmentPool, SynonymLexicon]]:
    """Accept a bare pool/lexicon or a variant->pool mapping; build defaults."""
    parts = config.variant_list()
    table: dict[str, Union[SegmentPool, SynonymLexicon]] = {}
    if isinstance(pools, Mapping):
        table.update(pools)
    elif isinstance(pools, (SegmentPool, SynonymLexicon)):
        if len(parts) != 1:
            raise ValueError("combination variants need a mapping of pools")
        table[parts[0]] = pools
    weights = config.variant_weights()
    for part, weight in zip(parts, weights):
        if part in table:
            continue
        if part == "synonym":
            raise ValueError("synonym variant needs an explicit lexicon")
        if part == "mention":
            built: Union[SegmentPool, SynonymLexicon] = build_mention_pool(corpus)
        elif part == "token":
            built = build_token_pool(corpus)
        elif part == "whole_sequence":
            built = build_sequence_pool(corpus)
        elif part == "relation":
            built = build_relation_pool(corpus)
        else:
            raise ValueError(f"unknown variant {part!r}")
        table[part] = built
    for part, weight in zip(parts, weights):
        if weight > 0 and isinstance(table[part], SegmentPool) and not len(table[part]):
            raise EmptyPoolError(f"empty segment pool for variant {part!r}")
        if weight > 0 and isinstance(table[part], SynonymLexicon) and not len(table[part]):
            raise EmptyPoolError("empty synonym lexicon")
    return table


def _split_budget(total: int, weights: Sequence[float]) -> list[int]:
    """Largest-remainder split so the per-variant counts sum exactly."""
    raw = [w * total for w in weights]
    counts = [int(x) for x in raw]
    short = total - sum(counts)
    remainders = sorted(
        range(len(raw)), key=lambda i: (-(raw[i] - counts[i]), i)
    )
    for i in remainders[:short]:
        counts[i] += 1
    return counts


def _restrict_pool(pool: SegmentPool, spans, example, variant: str) -> SegmentPool:
    """Same-entity-type filtering for the strict replacement reading."""
    if variant == "mention":
        _, etype = split_bio(example.labels[spans[0][0]])
    elif variant == "token":
        _, etype = split_bio(example.labels[spans[0][0]])
    else:
        return pool
    keep = []
    for entry in pool.entries:
        first = entry.labels[0][0]
        if split_bio(first)[1] == etype:
            keep.append(entry)
    return SegmentPool(pool.arity, tuple(keep), pool.source)


def _plan_slot(
    slot: int,
    initial_index: int,
    variant: str,
    examples: Sequence,
    pool: Union[SegmentPool, SynonymLexicon],
    config: MixConfig,
) -> _Plan | None:
    """Resolve one slot's randomness; None when retries are exhausted."""
    rng = derive_rng(config.seed, "slot", slot)
    if config.fixed_lambda is not None:
        lam = config.fixed_lambda
    else:
        lam = sample_mix_ratio(config.alpha, rng)
    index = initial_index
    lexicon = pool if isinstance(pool, SynonymLexicon) else None
    for _attempt in range(config.retry_limit + 1):
        example = examples[index]
        spans = select_segment(example, variant, rng, lexicon=lexicon)
        if spans is not None:
            if variant == "synonym":
                token = example.tokens[spans[0][0]]
                syns = lexicon.synonyms(token)
                chosen = syns[int(rng.integers(len(syns)))]
                return _Plan(slot, index, variant, lam, spans, None, ((chosen,),), None)
            draw_pool = pool
            if config.same_type_only and variant in ("mention", "token"):
                draw_pool = _restrict_pool(pool, spans, example, variant)
                if not len(draw_pool):
                    index = int(rng.integers(len(examples)))
                    continue
            pool_index = draw_pool.draw_index(rng)
            entry = draw_pool.entries[pool_index]
            if config.same_type_only and draw_pool is not pool:
                pool_index = pool.entries.index(entry)
            return _Plan(
                slot, index, variant, lam, spans, pool_index, entry.segments, entry.labels
            )
        index = int(rng.integers(len(examples)))
    return None


def _plan_run(
    corpus: Union[TaggedCorpus, RECorpus], pools: PoolSpec, config: MixConfig
) -> tuple[list[_Plan], int, dict]:
    """Shared driver for mixing and replacement: one plan per emitted example."""
    examples = (
        corpus.sentences if isinstance(corpus, TaggedCorpus) else corpus.samples
    )
    n = len(examples)
    requested = int(config.rate * n + 0.5)
    parts = config.variant_list()
    for part in parts:
        ok = RE_VARIANTS if isinstance(corpus, RECorpus) else NER_VARIANTS
        if part not in ok:
            raise ValueError(
                f"variant {part!r} does not apply to {type(corpus).__name__}"
            )
    if requested == 0:
        return [], 0, {"requested": 0}
    if n == 0:
        raise ValueError("cannot augment an empty corpus")
    pool_map = _normalize_pools(corpus, pools, config)

    cand_rng = derive_rng(config.seed, "candidates")
    if requested <= n:
        candidates = cand_rng.choice(n, size=requested, replace=False)
    else:
        candidates = cand_rng.choice(n, size=requested, replace=True)

    counts = _split_budget(requested, config.variant_weights())
    plans: list[_Plan] = []
    skipped = 0
    slot = 0
    for part, count in zip(parts, counts):
        for _ in range(count):
            plan = _plan_slot(
                slot, int(candidates[slot]), part, examples, pool_map[part], config
            )
            if plan is None:
                skipped += 1
            else:
                plans.append(plan)
            slot += 1
    if skipped:
        log.warning("skipped %d of %d slots (no eligible segment)", skipped, requested)
    return plans, skipped, {"requested": requested}


def _splice_rows(matrix: np.ndarray, start: int, end: int, block: np.ndarray) -> np.ndarray:
    return np.concatenate([matrix[:start], block, matrix[end:]])


def _final_spans(
    spans: Sequence[tuple[int, int]], mixed_lens: Sequence[int]
) -> tuple[tuple[int, int], ...]:
    """Map original spans to output coordinates after splice growth."""
    out = []
    for j, (s, e) in enumerate(spans):
        shift = sum(
            mixed_lens[i] - (spans[i][1] - spans[i][0])
            for i in range(len(spans))
            if spans[i][0] < s
        )
        out.append((s + shift, s + shift + mixed_lens[j]))
    return tuple(out)


def _materialize_ner(
    sentence: Sentence,
    plan: _Plan,
    table: EmbeddingTable,
    vocab: Sequence[str],
    config: MixConfig,
) -> MixedExample:
    embeddings = table.embed(sentence.tokens)
    soft = one_hot(sentence.labels, vocab)
    lam = plan.lam
    mixed_lens = [0] * len(plan.spans)
    for j in sorted(range(len(plan.spans)), key=lambda k: -plan.spans[k][0]):
        start, end = plan.spans[j]
        if lam == 1.0:
            # the identity limit: no padding, no growth, original rows kept
            mixed_lens[j] = end - start
            continue
        seg_b = plan.partner_segments[j]
        e_a, e_b = pad_to_longer(embeddings[start:end], table.embed(seg_b))
        mixed_e = mix(e_a, e_b, lam)
        embeddings = _splice_rows(embeddings, start, end, mixed_e)
        mixed_lens[j] = len(mixed_e)
        if plan.variant == "synonym":
            # synonyms share the label: only the input side is interpolated
            continue
        o_a, o_b = pad_to_longer(soft[start:end], one_hot(plan.partner_labels[j], vocab))
        mixed_o = mix(o_a, o_b, lam)
        if config.normalize_tail_labels:
            sums = mixed_o.sum(axis=1)
            nonzero = sums > 0
            mixed_o[nonzero] = mixed_o[nonzero] / sums[nonzero, None]
        soft = _splice_rows(soft, start, end, mixed_o)
    provenance = Provenance(
        example_index=plan.example_index,
        variant=plan.variant,
        lam=lam,
        spans=plan.spans,
        mixed_spans=_final_spans(plan.spans, mixed_lens),
        pool_index=plan.pool_index,
        replacements=(
            tuple(t for seg in plan.partner_segments for t in seg)
            if plan.variant == "synonym"
            else None
        ),
    )
    return MixedExample(embeddings, soft, provenance)


def _materialize_re(
    sample: RESample,
    plan: _Plan,
    table: EmbeddingTable,
    relation_vocab: Sequence[str],
    config: MixConfig,
) -> MixedRESample:
    embeddings = table.embed(sample.tokens)
    lam = plan.lam
    mixed_lens = [0] * len(plan.spans)
    for j in sorted(range(len(plan.spans)), key=lambda k: -plan.spans[k][0]):
        start, end = plan.spans[j]
        if lam == 1.0:
            mixed_lens[j] = end - start
            continue
        e_a, e_b = pad_to_longer(embeddings[start:end], table.embed(plan.partner_segments[j]))
        mixed_e = mix(e_a, e_b, lam)
        embeddings = _splice_rows(embeddings, start, end, mixed_e)
        mixed_lens[j] = len(mixed_e)
    soft_rel = mix(
        one_hot([sample.relation], relation_vocab),
        one_hot([plan.partner_labels], relation_vocab),
        lam,
    )[0]
    final = _final_spans(plan.spans, mixed_lens)
    provenance = Provenance(
        example_index=plan.example_index,
        variant=plan.variant,
        lam=lam,
        spans=plan.spans,
        mixed_spans=final,
        pool_index=plan.pool_index,
    )
    return MixedRESample(
        embeddings,
        soft_rel,
        Span(*final[0]),
        Span(*final[1]),
        provenance,
    )


def mix_example(
    sentence: Sentence,
    pool: Union[SegmentPool, SynonymLexicon],
    table: EmbeddingTable,
    vocab: Sequence[str],
    config: MixConfig,
    rng: np.random.Generator,
    example_index: int = 0,
) -> MixedExample:
    """Mix one sentence against one pool draw (single-variant, NER)."""
    variant = config.variant
    if variant not in NER_VARIANTS:
        raise ValueError(f"mix_example handles NER variants, not {variant!r}")
    lam = config.fixed_lambda
    if lam is None:
        lam = sample_mix_ratio(config.alpha, rng)
    lexicon = pool if isinstance(pool, SynonymLexicon) else None
    spans = select_segment(sentence, variant, rng, lexicon=lexicon)
    if spans is None:
        raise ValueError("no eligible segment in example")
    if variant == "synonym":
        token = sentence.tokens[spans[0][0]]
        syns = lexicon.synonyms(token)
        chosen = syns[int(rng.integers(len(syns)))]
        plan = _Plan(0, example_index, variant, lam, spans, None, ((chosen,),), None)
    else:
        pool_index = pool.draw_index(rng)
        entry = pool.entries[pool_index]
        plan = _Plan(
            0, example_index, variant, lam, spans, pool_index, entry.segments, entry.labels
        )
    return _materialize_ner(sentence, plan, table, vocab, config)


def mix_re_sample(
    sample: RESample,
    pool: SegmentPool,
    table: EmbeddingTable,
    relation_vocab: Sequence[str],
    config: MixConfig,
    rng: np.random.Generator,
    example_index: int = 0,
) -> MixedRESample:
    """Mix one RE sample's nominal pair against a pool pair, shared lam."""
    if pool.arity != 2:
        raise ValueError("relation mixing needs an arity-2 pool")
    lam = config.fixed_lambda
    if lam is None:
        lam = sample_mix_ratio(config.alpha, rng)
    spans = select_segment(sample, "relation", rng)
    pool_index = pool.draw_index(rng)
    entry = pool.entries[pool_index]
    plan = _Plan(
        0, example_index, "relation", lam, spans, pool_index, entry.segments, entry.labels
    )
    return _materialize_re(sample, plan, table, relation_vocab, config)


def segmix_generate(
    corpus: Union[TaggedCorpus, RECorpus],
    pools: PoolSpec,
    table: EmbeddingTable,
    config: MixConfig,
) -> GenerationResult:
    """Generate ``round(rate * N)`` mixed examples (minus reported skips).

    ``pools`` may be a single pool/lexicon, a variant->pool mapping, or
    None to build pools from the corpus (synonym always needs a lexicon).
    """
    plans, skipped, info = _plan_run(corpus, pools, config)
    out = []
    if isinstance(corpus, TaggedCorpus):
        for plan in plans:
            out.append(
                _materialize_ner(
                    corpus.sentences[plan.example_index],
                    plan,
                    table,
                    corpus.label_vocab,
                    config,
                )
            )
    else:
        for plan in plans:
            out.append(
                _materialize_re(
                    corpus.samples[plan.example_index],
                    plan,
                    table,
                    corpus.relation_vocab,
                    config,
                )
            )
    return GenerationResult(out, skipped, info["requested"])


def _replace_sentence(sentence: Sentence, plan: _Plan) -> Sentence:
    tokens = list(sentence.tokens)
    labels = list(sentence.labels)
    for j in sorted(range(len(plan.spans)), key=lambda k: -plan.spans[k][0]):
        start, end = plan.spans[j]
        seg = list(plan.partner_segments[j])
        tokens[start:end] = seg
        if plan.variant == "synonym":
            continue  # label kept, synonym shares it
        labels[start:end] = list(plan.partner_labels[j])
    return Sentence(tuple(tokens), tuple(labels))


def _replace_re_sample(sample: RESample, plan: _Plan) -> RESample:
    tokens = list(sample.tokens)
    mixed_lens = [len(seg) for seg in plan.partner_segments]
    for j in sorted(range(len(plan.spans)), key=lambda k: -plan.spans[k][0]):
        start, end = plan.spans[j]
        tokens[start:end] = list(plan.partner_segments[j])
    final = _final_spans(plan.spans, mixed_lens)
    return RESample(
        tuple(tokens),
        Span(*final[0]),
        Span(*final[1]),
        str(plan.partner_labels),
    )


def replacement_da(
    corpus: Union[TaggedCorpus, RECorpus],
    pools: PoolSpec,
    config: MixConfig,
) -> ReplacementResult:
    """Hard substitution in token space: the ``lam = 0`` limit of mixing.

    Runs the exact plan stream :func:`segmix_generate` would run under the
    same config, so a fixed_lambda=0 mixing run and a replacement run with
    equal configs select identical (example, segment, pool entry) triples.
    """
    plans, skipped, info = _plan_run(corpus, pools, config)
    if isinstance(corpus, TaggedCorpus):
        sentences = [
            _replace_sentence(corpus.sentences[p.example_index], p) for p in plans
        ]
        out: Union[TaggedCorpus, RECorpus] = TaggedCorpus.from_sentences(sentences)
    else:
        samples = [_replace_re_sample(corpus.samples[p.example_index], p) for p in plans]
        out = RECorpus.from_samples(samples)
    return ReplacementResult(out, skipped, info["requested"])


def encode_corpus(
    corpus: TaggedCorpus, table: EmbeddingTable, vocab: Sequence[str] | None = None
) -> list[MixedExample]:
    """Embed original sentences as degenerate mixed examples (lam = 1)."""
    vocab = corpus.label_vocab if vocab is None else vocab
    out = []
    for i, sent in enumerate(corpus.sentences):
        prov = Provenance(i, "original", 1.0, (), (), None)
        out.append(MixedExample(table.embed(sent.tokens), one_hot(sent.labels, vocab), prov))
    return out


def encode_re_corpus(
    corpus: RECorpus, table: EmbeddingTable, vocab: Sequence[str] | None = None
) -> list[MixedRESample]:
    """Embed original RE samples as degenerate mixed samples (lam = 1)."""
    vocab = corpus.relation_vocab if vocab is None else vocab
    out = []
    for i, sample in enumerate(corpus.samples):
        prov = Provenance(i, "original", 1.0, (), (), None)
        out.append(
            MixedRESample(
                table.embed(sample.tokens),
                one_hot([sample.relation], vocab)[0],
                sample.e1,
                sample.e2,
                prov,
            )
        )
    return out
