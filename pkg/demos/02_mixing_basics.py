"""One mention mix, step by step.

A sentence's mention span is blended with a pool mention at ratio lambda:
embeddings and label rows inside the span become lambda-weighted averages,
everything outside the span is untouched, and if the pool mention is longer
the sentence grows to make room.
"""

import numpy as np

from segmix.corpus import parse_conll
from segmix.mixer import EmbeddingTable, MixConfig, segmix_generate

np.set_printoptions(precision=3, suppress=True)

corpus = parse_conll("""\
new B-LOC
york I-LOC
city I-LOC
is O
big O

anna B-PER
smith I-PER
sang O
""")

table = EmbeddingTable.random(corpus.token_vocab, 4, seed=0)

# rate 1.0 mixes every sentence once; fixed_lambda pins the usual Beta draw
config = MixConfig(variant="mention", rate=1.0, seed=16, fixed_lambda=0.6)
result = segmix_generate(corpus, None, table, config)
print(f"generated {len(result.examples)} of {result.requested} requested\n")

ex = result.examples[0]
prov = ex.provenance
src = corpus.sentences[prov.example_index]
print("source sentence:", " ".join(src.tokens))
print(f"span {prov.spans} grew to {prov.mixed_spans} at lambda={prov.lam}: "
      f"the pool mention was longer, so the sentence gained a row")
print("label vocabulary:", corpus.label_vocab)
print("soft label rows:")
print(ex.soft_labels)

# rows inside the span sum to 1 where both sides contribute and to
# lambda or 1 - lambda where zero padding filled the shorter side
print("row sums:", ex.soft_labels.sum(axis=1))

# outside the span the embedding rows are the original lookups, bit for bit
# (positions after the span shift when the pool mention was longer)
original = table.embed(src.tokens)
out_mixed = [i for i in range(len(ex.embeddings))
             if not any(s <= i < e for s, e in prov.mixed_spans)]
out_src = [i for i in range(len(original))
           if not any(s <= i < e for s, e in prov.spans)]
print("untouched rows identical:",
      all(np.array_equal(ex.embeddings[m], original[s])
          for m, s in zip(out_mixed, out_src)))
