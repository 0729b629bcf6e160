"""
Sequence tagging with an averaged perceptron
============================================

Train the linear-chain tagger on a generated corpus of "X means Y" sentences,
decode with BIO-constrained Viterbi and check that the output is legal.
"""

import numpy as np

from deftkit.synthetic import templated_corpus
from deftkit.tagger import ChainModel, extract_features, train_perceptron, validate_sequence, viterbi_decode
from deftkit.tags import TagSchema

train = templated_corpus(500, seed=1)
test = templated_corpus(100, seed=2)
print(" ".join(train[0].words))
print(" ".join(str(t) for t in train[0].tags))

# binary features per token
print(extract_features(train[0], 0))

model = train_perceptron(train, epochs=10, seed=0)
print("mistakes per epoch:", model.mistakes_per_epoch)

correct = sum(p == g for s in test for p, g in zip(model.tag(s), s.tags))
total = sum(len(s) for s in test)
print(f"token accuracy {correct / total:.3f}")

# even a model that loves I-Term cannot start a sentence with it
schema = TagSchema()
bad = ChainModel(schema, {"f": 0})
bad.emission[0, schema.index("I-Term")] = 100.0
tags = viterbi_decode(bad, [("f",)] * 3)
print([str(t) for t in tags], validate_sequence(tags, schema))

# the validator also explains externally produced sequences
print(validate_sequence(["O", "I-Definition", "B-Term", "I-Definition"], schema))
