"""Deterministic sentence cleaning for the sentence-classification data.

Two rules only: a leading enumerator such as ``41. `` is dropped, and link
placeholders of the form ``([link])`` are deleted. A bare ``[link]`` is kept
because it usually stands in for a noun phrase ("... are shown in [link].").
Token-level data is never cleaned.
"""

import re
from dataclasses import dataclass

# space-joined corpus tokens give "41 . The" and "( [ link ] )", hence the \s*
ENUMERATION = re.compile(r"^\s*\d+\s*[.):]\s+")
_LINK = r"\(\s*\[\s*link\s*\]\s*\)"
PAREN_LINK = re.compile(_LINK)
# leading runs swallow the whitespace after them, inner ones the whitespace before
_LINK_DELETE = re.compile(rf"^(?:\s*{_LINK})+\s*|\s*{_LINK}")
BARE_LINK = re.compile(r"\[\s*link\s*\]")
_WS = re.compile(r"\s+")


@dataclass(frozen=True)
class CleanReport:
    original: str
    cleaned: str
    removed_enumeration: bool = False
    removed_links: int = 0
    kept_links: int = 0


def strip_enumeration(text: str) -> CleanReport:
    """Drop one leading ``<digits><. or ) or :><whitespace>`` marker.

    The whitespace requirement keeps decimals like "3.5 million" intact.
    """
    cleaned, n = ENUMERATION.subn("", text, count=1)
    return CleanReport(text, cleaned, removed_enumeration=bool(n),
                       kept_links=len(BARE_LINK.findall(cleaned)))


def strip_links(text: str) -> CleanReport:
    removed = len(PAREN_LINK.findall(text))
    cleaned = _LINK_DELETE.sub("", text)
    return CleanReport(text, cleaned, removed_links=removed,
                       kept_links=len(BARE_LINK.findall(cleaned)))


def clean_sentence(text: str) -> CleanReport:
    """Enumeration then link removal, whitespace collapsed and trimmed.

    Repeats until nothing changes, so a marker uncovered by an earlier
    deletion ("([link]) 2. ...") is removed too and the result is idempotent.
    """
    current = text
    enum = False
    links = 0
    while True:
        e = strip_enumeration(current)
        l = strip_links(e.cleaned)
        nxt = _WS.sub(" ", l.cleaned).strip()
        enum = enum or e.removed_enumeration
        links += l.removed_links
        if nxt == current:
            break
        current = nxt
    return CleanReport(text, current, enum, links, len(BARE_LINK.findall(current)))


def clean_instances(instances):
    """Clean classification instances; returns (instances, reports).

    Instances whose text becomes empty keep their original text so that
    the line alignment with predictions is never broken.
    """
    from deftkit.corpus import ClassificationInstance

    out, reports = [], []
    for inst in instances:
        rep = clean_sentence(inst.text)
        reports.append(rep)
        out.append(ClassificationInstance(rep.cleaned or inst.text, inst.label))
    return out, reports


def summarize(reports) -> dict:
    return {
        "sentences": len(reports),
        "enumerations_stripped": sum(r.removed_enumeration for r in reports),
        "links_removed": sum(r.removed_links for r in reports),
        "links_kept": sum(r.kept_links for r in reports),
    }
