"""Mix relation samples and train the span-pair classifier on the result.

Relation mixing blends both argument spans against a pooled pair and
interpolates the relation one-hots, so a lambda=0.7 mix of Cause-Effect
with Component-Whole trains at soft targets 0.7 / 0.3.
"""

from segmix.evaluation import re_report
from segmix.mixer import (
    EmbeddingTable,
    MixConfig,
    encode_re_corpus,
    segmix_generate,
)
from segmix.model import REModel, TrainConfig, predict_re, train_re
from segmix.corpus import parse_re

TSV = """\
the storm caused severe damage\t1\t2\t4\t5\tCause-Effect(e1,e2)
a loose wheel fell off the cart\t2\t3\t6\t7\tComponent-Whole(e1,e2)
heat from the sun melted the snow\t0\t1\t6\t7\tCause-Effect(e1,e2)
the drawer of the old desk jammed\t1\t2\t5\t6\tComponent-Whole(e1,e2)
the report mentioned a date\t1\t2\t4\t5\tOther
smoke from the fire filled rooms\t0\t1\t3\t4\tCause-Effect(e1,e2)
the keys on the piano stuck\t1\t2\t4\t5\tComponent-Whole(e1,e2)
a friend brought a ladder\t1\t2\t4\t5\tOther
"""

corpus = parse_re(TSV)
print(f"{len(corpus.samples)} samples, relations {corpus.relation_vocab}")

table = EmbeddingTable.random(corpus.token_vocab, 16, seed=0)
config = MixConfig(variant="relation", rate=1.0, alpha=8.0, seed=4)
result = segmix_generate(corpus, None, table, config)

# a same-relation partner leaves the target one-hot; different relations blend
for ex in result.examples[:4]:
    src = corpus.samples[ex.provenance.example_index]
    soft = {r: round(float(v), 3)
            for r, v in zip(corpus.relation_vocab, ex.soft_relation) if v > 0}
    print(f"  {src.relation!r} sample mixed at lambda={ex.provenance.lam:.3f} "
          f"-> targets {soft}")

# train on originals plus mixes, then score back on the originals
examples = encode_re_corpus(corpus, table) + result.examples
model = REModel.init(corpus.relation_vocab, table.dim, seed=0)
run = train_re(model, examples, TrainConfig(epochs=60, learning_rate=0.5, seed=0))

pred = predict_re(run.model, table, corpus)
report = re_report(corpus, pred)
print()
print(report.format_text())
