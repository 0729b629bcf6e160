"""Precision / recall / F1 tables for both subtasks."""

import re
from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

from deftkit.errors import LengthMismatchError
from deftkit.tags import TagSchema

CLASS_NAMES = {"0": "Not Definition", "1": "Definition"}


def prf(tp: int, fp: int, fn: int) -> Tuple[float, float, float]:
    p = tp / (tp + fp) if tp + fp else 0.0
    r = tp / (tp + fn) if tp + fn else 0.0
    f = 2 * p * r / (p + r) if p + r else 0.0
    return p, r, f


@dataclass
class ConfusionStats:
    tp: Dict[str, int] = field(default_factory=dict)
    fp: Dict[str, int] = field(default_factory=dict)
    fn: Dict[str, int] = field(default_factory=dict)

    def support(self, label) -> int:
        return self.tp[label] + self.fn[label]


@dataclass
class EvalReport:
    labels: List[str]
    per_class: Dict[str, Tuple[float, float, float]]
    support: Dict[str, int]
    weighted: Tuple[float, float, float]
    macro_f1: float
    micro: Tuple[float, float, float]
    stats: ConfusionStats
    included: List[str] = None

    def to_dict(self) -> Dict[str, float]:
        out = {}
        for lab in self.labels:
            p, r, f = self.per_class[lab]
            out[f"class.{lab}.precision"] = p
            out[f"class.{lab}.recall"] = r
            out[f"class.{lab}.f1"] = f
            out[f"class.{lab}.support"] = self.support[lab]
            out[f"class.{lab}.tp"] = self.stats.tp[lab]
            out[f"class.{lab}.fp"] = self.stats.fp[lab]
            out[f"class.{lab}.fn"] = self.stats.fn[lab]
        for name, vals in (("weighted", self.weighted), ("micro", self.micro)):
            for key, v in zip(("precision", "recall", "f1"), vals):
                out[f"{name}.{key}"] = v
        out["macro.f1"] = self.macro_f1
        return out

    def to_lines(self) -> str:
        """Machine-readable ``key value`` lines at full precision."""
        return "".join(f"{k} {v!r}\n" for k, v in self.to_dict().items())


def _build(labels, counts, included, macro_over="support") -> EvalReport:
    stats = ConfusionStats(*counts)
    per_class = {lab: prf(stats.tp[lab], stats.fp[lab], stats.fn[lab]) for lab in labels}
    support = {lab: stats.support(lab) for lab in labels}
    total = sum(support[lab] for lab in included)
    if total:
        weighted = tuple(sum(per_class[lab][k] * support[lab] for lab in included) / total
                         for k in range(3))
    else:
        weighted = (0.0, 0.0, 0.0)
    if macro_over == "support":
        nonzero = [lab for lab in included if support[lab]]
    else:
        nonzero = [lab for lab in included if support[lab] or stats.fp[lab]]
    macro = sum(per_class[lab][2] for lab in nonzero) / len(nonzero) if nonzero else 0.0
    micro = prf(sum(stats.tp[lab] for lab in included),
                sum(stats.fp[lab] for lab in included),
                sum(stats.fn[lab] for lab in included))
    return EvalReport(list(labels), per_class, support, weighted, macro, micro, stats, list(included))


def _count(pairs, labels):
    tp = dict.fromkeys(labels, 0)
    fp = dict.fromkeys(labels, 0)
    fn = dict.fromkeys(labels, 0)
    for g, p in pairs:
        if g == p:
            tp[g] += 1
        else:
            fp[p] += 1
            fn[g] += 1
    return tp, fp, fn


def score_classification(gold: Sequence[int], pred: Sequence[int]) -> EvalReport:
    """Per-class, support-weighted and macro P/R/F1 over classes 0 and 1.

    Macro-F1 averages both classes; a class absent from gold and predictions
    alike is left out, so identical label lists always score 1.0.
    """
    if len(gold) != len(pred):
        raise LengthMismatchError(f"{len(gold)} gold labels vs {len(pred)} predictions")
    if not gold:
        raise ValueError("nothing to score")
    labels = ["0", "1"]
    pairs = [(str(int(g)), str(int(p))) for g, p in zip(gold, pred)]
    for g, p in pairs:
        if g not in CLASS_NAMES or p not in CLASS_NAMES:
            raise ValueError(f"labels must be 0 or 1, got {g!r}/{p!r}")
    return _build(labels, _count(pairs, labels), labels, macro_over="occurring")


def score_tokens(gold, pred, exclude=("O",), schema: TagSchema = None) -> EvalReport:
    """Token-level exact-match scores.

    The per-tag table covers the whole alphabet (plus any stray tags seen).
    Overall scores are micro-averaged over tags not in ``exclude``; macro-F1
    averages the included tags that occur in the gold data.
    """
    if schema is None:
        schema = TagSchema()
    if len(gold) != len(pred):
        raise LengthMismatchError(f"{len(gold)} gold sentences vs {len(pred)} predicted")
    pairs = []
    for i, (g, p) in enumerate(zip(gold, pred)):
        if len(g) != len(p):
            raise LengthMismatchError(f"sentence {i}: {len(g)} gold tags vs {len(p)} predicted")
        pairs.extend((str(a), str(b)) for a, b in zip(g, p))
    labels = [str(t) for t in schema.tags]
    extra = sorted({x for pair in pairs for x in pair} - set(labels))
    labels += extra
    exclude = {str(e) for e in exclude}
    included = [lab for lab in labels if lab not in exclude]
    return _build(labels, _count(pairs, labels), included)


def _fmt(v) -> str:
    return f"{v:.2f}"


def render_report(report: EvalReport, names=None) -> str:
    """Fixed-width table, two decimals, in the layout of the published tables."""
    names = names or {}
    rows = [(names.get(lab, lab), report.per_class[lab], report.support[lab]) for lab in report.labels]
    width = max([len(r[0]) for r in rows] + [len("weighted avg")]) + 2
    head = f"{'':<{width}}{'P':>6}{'R':>6}{'F1':>6}{'support':>9}"
    lines = [head, "-" * len(head)]
    for name, (p, r, f), sup in rows:
        lines.append(f"{name:<{width}}{_fmt(p):>6}{_fmt(r):>6}{_fmt(f):>6}{sup:>9}")
    lines.append("-" * len(head))
    total = sum(report.support[lab] for lab in (report.included or report.labels))
    for name, (p, r, f) in (("weighted avg", report.weighted), ("micro", report.micro)):
        lines.append(f"{name:<{width}}{_fmt(p):>6}{_fmt(r):>6}{_fmt(f):>6}{total:>9}")
    lines.append(f"{'macro F1':<{width}}{'':>6}{'':>6}{_fmt(report.macro_f1):>6}")
    return "\n".join(lines) + "\n"


_ROW = re.compile(r"^(?P<name>.*?)\s+(?P<p>\d\.\d\d)\s+(?P<r>\d\.\d\d)\s+(?P<f>\d\.\d\d)(?:\s+\d+)?$")
_MACRO = re.compile(r"^macro F1\s+(?P<f>\d\.\d\d)$")


def parse_rendered(text: str) -> Dict[str, Tuple[float, ...]]:
    """Read a table produced by :func:`render_report` back into numbers."""
    out = {}
    for line in text.splitlines():
        m = _MACRO.match(line.strip())
        if m:
            out["macro F1"] = (float(m["f"]),)
            continue
        m = _ROW.match(line.strip())
        if m:
            out[m["name"].strip()] = (float(m["p"]), float(m["r"]), float(m["f"]))
    return out
