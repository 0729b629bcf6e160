"""Multinomial Naive Bayes bag-of-words baseline for sentence classification."""

import re
from collections import Counter
from dataclasses import dataclass
from typing import Dict, List

import numpy as np

from deftkit.corpus import check_aligned
from deftkit.errors import DeftError, ParseError

MODEL_MAGIC = "#deftkit-nb"
MODEL_VERSION = 1

_TERM = re.compile(r"[^\W_]+")


def tokenize(text: str) -> List[str]:
    """Lowercased alphanumeric runs; everything else separates terms."""
    return _TERM.findall(text.lower())


@dataclass
class Vocabulary:
    index: Dict[str, int]
    doc_freq: np.ndarray
    n_docs: int

    @classmethod
    def build(cls, docs):
        df = Counter()
        n = 0
        for terms in docs:
            df.update(set(terms))
            n += 1
        terms = sorted(df)
        return cls({t: i for i, t in enumerate(terms)},
                   np.array([df[t] for t in terms], dtype=np.int64), n)

    def __len__(self):
        return len(self.index)

    @property
    def terms(self):
        return sorted(self.index, key=self.index.get)


@dataclass(frozen=True)
class Prediction:
    label: int
    score: float


class NaiveBayesModel:
    """Log priors over classes {0, 1} and a ``|V| x 2`` log-likelihood table."""

    def __init__(self, vocab: Dict[str, int], log_prior, log_lik, alpha=1.0):
        self.vocab = vocab
        self.log_prior = np.asarray(log_prior, dtype=float)
        self.log_lik = np.asarray(log_lik, dtype=float)
        self.alpha = float(alpha)

    def check(self, tol=1e-9):
        if abs(np.exp(self.log_prior).sum() - 1.0) > tol:
            raise AssertionError("class priors do not sum to 1")
        sums = np.exp(self.log_lik).sum(axis=0)
        if np.any(np.abs(sums - 1.0) > tol):
            raise AssertionError(f"likelihood columns sum to {sums}, not 1")

    def score(self, text: str) -> float:
        ids = [self.vocab[t] for t in tokenize(text) if t in self.vocab]
        diff = self.log_lik[:, 1] - self.log_lik[:, 0]
        return float(self.log_prior[1] - self.log_prior[0] + diff[ids].sum())

    def predict(self, text: str) -> Prediction:
        s = self.score(text)
        return Prediction(int(s > 0), s)

    def save(self, path):
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write(f"{MODEL_MAGIC} v{MODEL_VERSION}\n")
            f.write(f"alpha\t{self.alpha!r}\n")
            f.write(f"vocab_size\t{len(self.vocab)}\n")
            f.write(f"prior\t{float(self.log_prior[0])!r}\t{float(self.log_prior[1])!r}\n")
            for term in sorted(self.vocab, key=self.vocab.get):
                row = self.log_lik[self.vocab[term]]
                f.write(f"{term}\t{float(row[0])!r}\t{float(row[1])!r}\n")

    @classmethod
    def load(cls, path):
        with open(path, encoding="utf-8") as f:
            lines = f.read().splitlines()
        if not lines or lines[0] != f"{MODEL_MAGIC} v{MODEL_VERSION}":
            raise ParseError("not a Naive Bayes model file", 1, path)
        try:
            alpha = float(lines[1].split("\t")[1])
            size = int(lines[2].split("\t")[1])
            _, p0, p1 = lines[3].split("\t")
            vocab, rows = {}, []
            for lineno, line in enumerate(lines[4:], start=5):
                term, l0, l1 = line.split("\t")
                vocab[term] = len(rows)
                rows.append((float(l0), float(l1)))
        except (IndexError, ValueError):
            raise ParseError("malformed model file", path=path) from None
        if len(rows) != size:
            raise ParseError(f"header says {size} terms, found {len(rows)}", path=path)
        return cls(vocab, [float(p0), float(p1)], np.array(rows).reshape(-1, 2), alpha)


def train_nb(instances, alpha: float = 1.0) -> NaiveBayesModel:
    """Laplace-smoothed multinomial NB.

    ``P(t|c) = (count(t, c) + alpha) / (sum_t count(t, c) + alpha * |V|)``
    """
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    docs = [tokenize(inst.text) for inst in instances]
    labels = np.array([inst.label for inst in instances], dtype=int)
    if set(labels.tolist()) != {0, 1}:
        raise DeftError("Naive Bayes training needs both labels present")
    vocab = Vocabulary.build(docs)
    counts = np.zeros((len(vocab), 2), dtype=np.int64)
    for terms, y in zip(docs, labels):
        for t in terms:
            counts[vocab.index[t], y] += 1
    class_docs = np.bincount(labels, minlength=2)
    log_prior = np.log(class_docs) - np.log(class_docs.sum())
    log_lik = np.log(counts + alpha) - np.log(counts.sum(axis=0) + alpha * len(vocab))
    model = NaiveBayesModel(vocab.index, log_prior, log_lik, alpha)
    model.vocabulary = vocab
    return model


def predict_nb(model: NaiveBayesModel, text: str) -> Prediction:
    return model.predict(text)


def parse_predictions(content, path=None) -> List[Prediction]:
    """External predictions: one ``label`` or ``label<TAB>score`` per line.

    A bare label gets score +1.0 / -1.0 so that ``label == (score > 0)``.
    """
    if isinstance(content, bytes):
        content = content.decode("utf-8")
    out = []
    for lineno, line in enumerate(content.splitlines(), start=1):
        fields = line.strip().split("\t")
        if fields[0] not in ("0", "1") or len(fields) > 2:
            raise ParseError("expected 'label' or 'label<TAB>score'", lineno, path)
        label = int(fields[0])
        if len(fields) == 2:
            try:
                score = float(fields[1])
            except ValueError:
                raise ParseError(f"bad score {fields[1]!r}", lineno, path) from None
            if label != int(score > 0):
                raise ParseError("label disagrees with score sign", lineno, path)
        else:
            score = 1.0 if label else -1.0
        out.append(Prediction(label, score))
    return out


def read_predictions(path) -> List[Prediction]:
    with open(path, "rb") as f:
        return parse_predictions(f.read(), path)


def write_predictions(predictions, path=None) -> bytes:
    data = "".join(f"{p.label}\t{p.score!r}\n" for p in predictions).encode("utf-8")
    if path is not None:
        with open(path, "wb") as f:
            f.write(data)
    return data


def predict_file(source, instances) -> List[Prediction]:
    """Predictions for ``instances`` from a model or from external predictions.

    ``source`` is a :class:`NaiveBayesModel`, a list of :class:`Prediction`,
    or a path to a line-aligned predictions file.
    """
    if isinstance(source, NaiveBayesModel):
        return [source.predict(inst.text) for inst in instances]
    if not isinstance(source, list):
        source = read_predictions(source)
    check_aligned(source, instances, "predictions/instances")
    return list(source)
