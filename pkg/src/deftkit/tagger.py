"""Linear-chain tagger: sparse features, BIO-constrained Viterbi, averaged perceptron."""

from collections import namedtuple
from dataclasses import replace
from typing import List, Sequence

import numpy as np

from deftkit.corpus import Sentence, make_sentence
from deftkit.errors import ParseError, SchemaError
from deftkit.tags import BioTag, TagSchema

MODEL_MAGIC = "#deftkit-chain"
MODEL_VERSION = 1
START = "<START>"

Violation = namedtuple("Violation", ["position", "tag", "reason"])


def token_shape(word: str) -> str:
    out = []
    for ch in word:
        if ch.isupper():
            out.append("A")
        elif ch.islower():
            out.append("a")
        elif ch.isdigit():
            out.append("0")
        else:
            out.append(ch)
    return "".join(out)


def extract_features(sentence, position: int):
    """Binary feature names for one token, sorted and without duplicates.

    ``sentence`` may be a :class:`Sentence` or a plain list of words.
    """
    words = sentence.words if isinstance(sentence, Sentence) else list(sentence)
    if not 0 <= position < len(words):
        raise IndexError(f"position {position} outside sentence of length {len(words)}")
    w = words[position]
    low = w.lower()
    feats = {"bias", "w=" + low, "shape=" + token_shape(w)}
    for k in range(1, 4):
        if len(low) >= k:
            feats.add(f"pre{k}={low[:k]}")
            feats.add(f"suf{k}={low[-k:]}")
    if position == 0:
        feats.add("first")
    else:
        feats.add("prev=" + words[position - 1].lower())
    if position == len(words) - 1:
        feats.add("last")
    else:
        feats.add("next=" + words[position + 1].lower())
    return tuple(sorted(feats))


def sentence_features(sentence):
    words = sentence.words if isinstance(sentence, Sentence) else list(sentence)
    return [extract_features(words, i) for i in range(len(words))]


def viterbi(emissions, transitions, start, allowed, start_allowed):
    """Best path through an ``n x K`` emission matrix under a transition mask.

    Illegal transitions are excluded from the max rather than penalised.
    Ties go to the lowest tag index. Returns ``(path, score)``.
    """
    emissions = np.asarray(emissions, dtype=float)
    n, k = emissions.shape
    neg = -np.inf
    delta = np.where(start_allowed, start + emissions[0], neg)
    back = np.zeros((n, k), dtype=np.int64)
    masked_trans = np.where(allowed, transitions, neg)
    for i in range(1, n):
        cand = delta[:, None] + masked_trans
        back[i] = np.argmax(cand, axis=0)
        delta = cand[back[i], np.arange(k)] + emissions[i]
    best = int(np.argmax(delta))
    score = float(delta[best])
    path = [best]
    for i in range(n - 1, 0, -1):
        path.append(int(back[i, path[-1]]))
    path.reverse()
    return path, score


class ChainModel:
    """Emission weights per (feature, tag), transition weights per (tag, tag).

    ``start`` holds the weights of transitions out of the virtual START state.
    Weights stay finite; BIO legality is enforced in the decoder.
    """

    def __init__(self, schema: TagSchema, feature_index=None, emission=None,
                 transition=None, start=None):
        self.schema = schema
        k = len(schema)
        self.feature_index = dict(feature_index or {})
        f = len(self.feature_index)
        self.emission = np.zeros((f, k)) if emission is None else np.asarray(emission, dtype=float)
        self.transition = np.zeros((k, k)) if transition is None else np.asarray(transition, dtype=float)
        self.start = np.zeros(k) if start is None else np.asarray(start, dtype=float)
        self.allowed, self.start_allowed = schema.transition_mask()

    def feature_ids(self, feats):
        index = self.feature_index
        return [index[f] for f in feats if f in index]

    def emission_scores(self, features) -> np.ndarray:
        scores = np.zeros((len(features), len(self.schema)))
        for i, feats in enumerate(features):
            ids = self.feature_ids(feats)
            if ids:
                scores[i] = self.emission[ids].sum(axis=0)
        return scores

    def decode_indices(self, features):
        return viterbi(self.emission_scores(features), self.transition, self.start,
                       self.allowed, self.start_allowed)

    def sequence_score(self, features, tags) -> float:
        idx = [self.schema.index(t) for t in tags]
        em = self.emission_scores(features)
        total = self.start[idx[0]] + sum(em[i, t] for i, t in enumerate(idx))
        total += sum(self.transition[a, b] for a, b in zip(idx, idx[1:]))
        return float(total)

    def tag(self, sentence) -> List[BioTag]:
        return viterbi_decode(self, sentence_features(sentence))

    def save(self, path):
        tags = [str(t) for t in self.schema.tags]
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write(f"{MODEL_MAGIC} v{MODEL_VERSION}\n")
            f.write("[schema]\n")
            for t in self.schema.types:
                f.write(t + "\n")
            f.write("[transitions]\n")
            for j, cur in enumerate(tags):
                if self.start[j] != 0:
                    f.write(f"{START}\t{cur}\t{float(self.start[j])!r}\n")
            for i, prev in enumerate(tags):
                for j, cur in enumerate(tags):
                    if self.transition[i, j] != 0:
                        f.write(f"{prev}\t{cur}\t{float(self.transition[i, j])!r}\n")
            f.write("[emissions]\n")
            for feat in sorted(self.feature_index):
                row = self.emission[self.feature_index[feat]]
                for j in np.flatnonzero(row):
                    f.write(f"{feat}\t{tags[j]}\t{float(row[j])!r}\n")

    @classmethod
    def load(cls, path):
        with open(path, encoding="utf-8") as f:
            lines = f.read().splitlines()
        if not lines or lines[0] != f"{MODEL_MAGIC} v{MODEL_VERSION}":
            raise ParseError("not a chain model file", 1, path)
        blocks = {"[schema]": [], "[transitions]": [], "[emissions]": []}
        current = None
        for lineno, line in enumerate(lines[1:], start=2):
            if line in blocks:
                current = blocks[line]
            elif current is None:
                raise ParseError("content before first block", lineno, path)
            elif line:
                current.append((lineno, line))
        schema = TagSchema(line for _, line in blocks["[schema]"])
        model = cls(schema)
        emissions = {}
        try:
            for lineno, line in blocks["[transitions]"]:
                prev, cur, w = line.split("\t")
                j = schema.index(cur)
                if prev == START:
                    model.start[j] = float(w)
                else:
                    model.transition[schema.index(prev), j] = float(w)
            for lineno, line in blocks["[emissions]"]:
                feat, tag, w = line.rsplit("\t", 2)
                emissions[(feat, schema.index(tag))] = float(w)
        except (ValueError, SchemaError) as exc:
            raise ParseError(f"malformed weight line: {exc}", lineno, path) from None
        feats = sorted({f for f, _ in emissions})
        model.feature_index = {f: i for i, f in enumerate(feats)}
        model.emission = np.zeros((len(feats), len(schema)))
        for (feat, j), w in emissions.items():
            model.emission[model.feature_index[feat], j] = w
        return model


def viterbi_decode(model: ChainModel, features) -> List[BioTag]:
    if len(features) == 0:
        raise ValueError("cannot decode an empty sequence")
    path, _ = model.decode_indices(features)
    return [model.schema.tags[i] for i in path]


def train_perceptron(sentences: Sequence[Sentence], epochs: int = 10, seed: int = 0,
                     schema: TagSchema = None) -> ChainModel:
    """Averaged structured perceptron.

    Each epoch visits the sentences in an order drawn from ``seed``; on a
    decoding mistake gold feature/transition counts are added and predicted
    ones subtracted. The returned weights are averaged over every step;
    ``model.mistakes_per_epoch`` records the online training errors.
    """
    if schema is None:
        schema = TagSchema()
    feats = [sentence_features(s) for s in sentences]
    gold = [[schema.index(t) for t in s.tags] for s in sentences]
    names = sorted({f for sent in feats for pos in sent for f in pos})
    index = {f: i for i, f in enumerate(names)}
    ids = [[np.array([index[f] for f in pos], dtype=np.int64) for pos in sent] for sent in feats]

    model = ChainModel(schema, index)
    k = len(schema)
    # running sums of c * update, for the averaging trick
    u_em = np.zeros_like(model.emission)
    u_tr = np.zeros((k, k))
    u_st = np.zeros(k)
    c = 1
    rng = np.random.default_rng(seed)
    mistakes = []
    for _ in range(epochs):
        mistakes.append(0)
        for s in rng.permutation(len(sentences)):
            y = gold[s]
            em = np.zeros((len(y), k))
            for i, fid in enumerate(ids[s]):
                em[i] = model.emission[fid].sum(axis=0)
            pred, _ = viterbi(em, model.transition, model.start, model.allowed, model.start_allowed)
            if pred != y:
                mistakes[-1] += 1
                for i, (g, p) in enumerate(zip(y, pred)):
                    if g != p:
                        fid = ids[s][i]
                        model.emission[fid, g] += 1
                        model.emission[fid, p] -= 1
                        u_em[fid, g] += c
                        u_em[fid, p] -= c
                if y[0] != pred[0]:
                    model.start[y[0]] += 1
                    model.start[pred[0]] -= 1
                    u_st[y[0]] += c
                    u_st[pred[0]] -= c
                for i in range(1, len(y)):
                    model.transition[y[i - 1], y[i]] += 1
                    model.transition[pred[i - 1], pred[i]] -= 1
                    u_tr[y[i - 1], y[i]] += c
                    u_tr[pred[i - 1], pred[i]] -= c
            c += 1
    model.emission -= u_em / c
    model.transition -= u_tr / c
    model.start -= u_st / c
    model.mistakes_per_epoch = mistakes
    return model


def validate_sequence(tags, schema: TagSchema = None) -> List[Violation]:
    """Positions whose tag is outside the alphabet or an I-X without B-X/I-X before it."""
    if schema is None:
        schema = TagSchema()
    out = []
    prev = None
    for i, tag in enumerate(tags):
        text = str(tag)
        if text not in schema:
            out.append(Violation(i, text, "tag outside schema alphabet"))
            prev = None
            continue
        cur = schema.parse_tag(text)
        if not schema.is_legal(prev, cur):
            if prev is None:
                why = "I- tag at sequence start" if i == 0 else "I- tag after invalid tag"
            elif prev.position == "O":
                why = "I- tag after O"
            else:
                why = f"I-{cur.type} after {prev}"
            out.append(Violation(i, text, why))
        prev = cur
    return out


def tag_sentences(model: ChainModel, sentences) -> List[Sentence]:
    """Copy of ``sentences`` with the TAG column replaced by predictions."""
    out = []
    for s in sentences:
        pred = model.tag(s)
        tokens = [replace(t, tag=p) for t, p in zip(s.tokens, pred)]
        out.append(make_sentence(tokens, s.source, s.index))
    return out
