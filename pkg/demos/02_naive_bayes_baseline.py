"""
Naive Bayes sentence classifier
===============================

Train the bag-of-words baseline on the sample corpus and score it on the dev
folder.
"""

from deftkit import corpus
from deftkit.classifier import train_nb
from deftkit.metrics import CLASS_NAMES, render_report, score_classification
from deftkit.synthetic import bundled_corpus_dir

data = bundled_corpus_dir()
train = corpus.to_classification(corpus.concat_folder(corpus.list_corpus_files(data / "train")))
dev = corpus.to_classification(corpus.concat_folder(corpus.list_corpus_files(data / "dev")))

model = train_nb(train, alpha=1.0)
model.check()  # priors and per-class likelihoods each sum to one
print("vocabulary size:", len(model.vocab))

# the score is a log-odds; positive means "contains a definition"
for inst in dev[:3]:
    pred = model.predict(inst.text)
    print(f"{pred.label} ({pred.score:+.2f}) gold={inst.label}  {inst.text[:60]}")

gold = [i.label for i in dev]
pred = [model.predict(i.text).label for i in dev]
print(render_report(score_classification(gold, pred), CLASS_NAMES))

# an internal holdout split is available when there is no dev folder
fit, held = corpus.holdout_split(train, seed=0)
print(len(fit), "train /", len(held), "held out")
