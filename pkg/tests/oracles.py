"""Independent reference implementations used by the tests.

These avoid the package's own helpers on purpose: plain loops, no numpy
vectorisation, no shared code paths with deftkit.metrics or the decoder.
"""

import itertools

import numpy as np

from deftkit.tagger import validate_sequence


def legal_sequences(schema, n):
    for seq in itertools.product(schema.tags, repeat=n):
        if not validate_sequence(seq, schema):
            yield seq


def brute_force(model, feats):
    best, best_score = None, -np.inf
    for seq in legal_sequences(model.schema, len(feats)):
        s = model.sequence_score(feats, seq)
        if s > best_score:
            best, best_score = seq, s
    return list(best), best_score


def _prf(tp, fp, fn):
    prec = tp / (tp + fp) if tp + fp > 0 else 0.0
    rec = tp / (tp + fn) if tp + fn > 0 else 0.0
    f1 = 2 * prec * rec / (prec + rec) if prec + rec > 0 else 0.0
    return prec, rec, f1


def oracle_classification(gold, pred):
    """Direct counting loops, one class at a time."""
    out = {}
    for c in (0, 1):
        tp = fp = fn = 0
        for g, p in zip(gold, pred):
            if p == c and g == c:
                tp += 1
            elif p == c:
                fp += 1
            elif g == c:
                fn += 1
        out[c] = _prf(tp, fp, fn) + (tp + fn,)
    n = len(gold)
    weighted = tuple(sum(out[c][k] * out[c][3] for c in (0, 1)) / n for k in range(3))
    seen = [c for c in (0, 1) if c in gold or c in pred]
    macro = sum(out[c][2] for c in seen) / len(seen)
    return out, weighted, macro


def oracle_tokens(gold, pred, tags, exclude=("O",)):
    """Per-tag counts over flattened tokens; micro and weighted over non-excluded tags."""
    flat_g = [str(t) for sent in gold for t in sent]
    flat_p = [str(t) for sent in pred for t in sent]
    per = {}
    for tag in tags:
        tp = sum(1 for g, p in zip(flat_g, flat_p) if g == tag and p == tag)
        fp = sum(1 for g, p in zip(flat_g, flat_p) if g != tag and p == tag)
        fn = sum(1 for g, p in zip(flat_g, flat_p) if g == tag and p != tag)
        per[tag] = _prf(tp, fp, fn) + (tp, fp, fn)
    kept = [t for t in tags if t not in exclude]
    micro = _prf(sum(per[t][3] for t in kept), sum(per[t][4] for t in kept),
                 sum(per[t][5] for t in kept))
    support = {t: per[t][3] + per[t][5] for t in kept}
    total = sum(support.values())
    weighted = tuple(sum(per[t][k] * support[t] for t in kept) / total if total else 0.0
                     for k in range(3))
    present = [t for t in kept if support[t] > 0]
    macro = sum(per[t][2] for t in present) / len(present) if present else 0.0
    return per, micro, weighted, macro
