"""Reading, writing and converting DEFT token files.

A DEFT file holds one token per line with tab-separated columns::

    TOKEN  SOURCE  START  END  TAG  TAG_ID  ROOT_ID  RELATION

and a blank line between sentences. Releases differ in how many trailing
columns they carry, so the column count is configurable (4 to 8); absent
columns are filled with sentinels (tag ``O``, ids ``-1``, relation ``0``).
"""

import math
import os
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np

from deftkit.errors import DeftError, LengthMismatchError, ParseError, SchemaError
from deftkit.tags import OUTSIDE, BioTag, TagSchema

COLUMNS = ("text", "source", "start_char", "end_char", "tag", "tag_id", "root_id", "relation")
MIN_COLUMNS = 4
NO_ID = "-1"
NO_RELATION = "0"

LABEL_RULES = ("substring", "primary")


@dataclass(frozen=True)
class Token:
    text: str
    source: str
    start_char: int
    end_char: int
    tag: BioTag = OUTSIDE
    tag_id: str = NO_ID
    root_id: str = NO_ID
    relation: str = NO_RELATION


@dataclass(frozen=True)
class Sentence:
    tokens: Tuple[Token, ...]
    source: str
    index: int
    label: int

    def __len__(self):
        return len(self.tokens)

    @property
    def words(self) -> List[str]:
        return [t.text for t in self.tokens]

    @property
    def tags(self) -> List[BioTag]:
        return [t.tag for t in self.tokens]


@dataclass(frozen=True)
class ClassificationInstance:
    text: str
    label: int


def sentence_label(tags: Sequence[BioTag], rule: str = "substring") -> int:
    """1 if any tag marks a definition.

    ``substring`` counts every type containing "Definition" (referential,
    ordered and secondary definitions included); ``primary`` counts only
    the plain ``Definition`` type.
    """
    if rule == "substring":
        return int(any(t.type is not None and "Definition" in t.type for t in tags))
    if rule == "primary":
        return int(any(t.type == "Definition" for t in tags))
    raise ValueError(f"unknown label rule {rule!r}")


def make_sentence(tokens, source=None, index=0, rule="substring") -> Sentence:
    tokens = tuple(tokens)
    if not tokens:
        raise ValueError("a sentence needs at least one token")
    if source is None:
        source = tokens[0].source
    return Sentence(tokens, source, index, sentence_label([t.tag for t in tokens], rule))


def _parse_offset(value, lineno, path):
    try:
        n = int(value)
    except ValueError:
        raise ParseError(f"non-numeric offset {value!r}", lineno, path) from None
    if n < 0:
        raise ParseError(f"negative offset {n}", lineno, path)
    return n


def _parse_token(fields, lineno, schema, path):
    text, source = fields[0], fields[1]
    if not text:
        raise ParseError("empty token text", lineno, path)
    start = _parse_offset(fields[2], lineno, path)
    end = _parse_offset(fields[3], lineno, path)
    if end <= start:
        raise ParseError(f"end offset {end} not after start {start}", lineno, path)
    tag = OUTSIDE
    if len(fields) > 4:
        try:
            tag = schema.parse_tag(fields[4])
        except SchemaError as exc:
            where = f"{path}:" if path is not None else ""
            raise SchemaError(fields[4], f"{where}line {lineno}: unknown tag {fields[4]!r}") from exc
    tag_id = fields[5] if len(fields) > 5 else NO_ID
    root_id = fields[6] if len(fields) > 6 else NO_ID
    relation = fields[7] if len(fields) > 7 else NO_RELATION
    return Token(text, source, start, end, tag, tag_id, root_id, relation)


def parse_file(content, schema: Optional[TagSchema] = None, columns: int = 8,
               label_rule: str = "substring", source: Optional[str] = None,
               path=None) -> List[Sentence]:
    """Parse DEFT token-file content (bytes or str) into sentences.

    Accepts LF or CRLF line endings, runs of blank lines, and spaces around
    fields. Each non-blank line must have exactly ``columns`` fields.
    """
    if schema is None:
        schema = TagSchema()
    if not MIN_COLUMNS <= columns <= len(COLUMNS):
        raise ValueError(f"columns must be in [{MIN_COLUMNS}, {len(COLUMNS)}]")
    if isinstance(content, bytes):
        try:
            content = content.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"not valid UTF-8 ({exc.reason})", path=path) from None

    sentences = []
    current = []
    last_start = -1

    def flush():
        nonlocal current, last_start
        if current:
            sentences.append(make_sentence(current, source, len(sentences), label_rule))
        current = []
        last_start = -1

    for lineno, line in enumerate(content.splitlines(), start=1):
        if not line.strip():
            flush()
            continue
        fields = [f.strip(" ") for f in line.rstrip(" \r").split("\t")]
        if len(fields) != columns:
            raise ParseError(f"expected {columns} columns, found {len(fields)}", lineno, path)
        token = _parse_token(fields, lineno, schema, path)
        if token.start_char < last_start:
            raise ParseError("token offsets decrease within sentence", lineno, path)
        last_start = token.start_char
        current.append(token)
    flush()
    return sentences


def format_token(token: Token, columns: int = 8) -> str:
    fields = [token.text, token.source, str(token.start_char), str(token.end_char),
              str(token.tag), token.tag_id, token.root_id, token.relation]
    return "\t".join(fields[:columns])


def serialize_file(sentences: Sequence[Sentence], columns: int = 8) -> bytes:
    """Inverse of :func:`parse_file`: one blank line after each sentence but the last."""
    blocks = ["\n".join(format_token(t, columns) for t in s.tokens) for s in sentences]
    if not blocks:
        return b""
    return ("\n\n".join(blocks) + "\n").encode("utf-8")


def read_file(path, schema=None, columns=8, label_rule="substring") -> List[Sentence]:
    with open(path, "rb") as f:
        content = f.read()
    return parse_file(content, schema, columns, label_rule, source=str(path), path=path)


def list_corpus_files(folder, pattern="*.deft") -> List[str]:
    folder = Path(folder)
    if not folder.is_dir():
        raise DeftError(f"not a directory: {folder}")
    return sorted(str(p) for p in folder.glob(pattern) if p.is_file())


def concat_folder(paths, schema=None, columns=8, label_rule="substring") -> List[Sentence]:
    """Parse every file and concatenate sentences in lexicographic path order."""
    out = []
    for path in sorted(str(p) for p in paths):
        out.extend(read_file(path, schema, columns, label_rule))
    return out


def to_classification(sentences: Sequence[Sentence]) -> List[ClassificationInstance]:
    return [ClassificationInstance(" ".join(s.words), s.label) for s in sentences]


def write_instances(instances, path=None) -> bytes:
    """``text<TAB>label`` lines; written to ``path`` when given."""
    data = "".join(f"{inst.text}\t{inst.label}\n" for inst in instances).encode("utf-8")
    if path is not None:
        with open(path, "wb") as f:
            f.write(data)
    return data


def parse_instances(content, path=None) -> List[ClassificationInstance]:
    if isinstance(content, bytes):
        content = content.decode("utf-8")
    out = []
    for lineno, line in enumerate(content.splitlines(), start=1):
        if not line.strip():
            continue
        text, sep, label = line.rstrip("\r").rpartition("\t")
        label = label.strip().strip('"')
        if not sep or label not in ("0", "1"):
            raise ParseError("expected 'text<TAB>label' with label 0 or 1", lineno, path)
        # the shared-task release quotes both fields
        if len(text) >= 2 and text[0] == text[-1] == '"':
            text = text[1:-1]
        out.append(ClassificationInstance(text, int(label)))
    return out


def read_instances(path) -> List[ClassificationInstance]:
    with open(path, "rb") as f:
        return parse_instances(f.read(), path)


def holdout_split(items, fraction=Fraction(1, 5), seed: int = 0):
    """Random train/eval split with ``round(fraction * len(items))`` eval items.

    Both halves keep the input order. Halves are rounded up (``x.5 -> x+1``).
    """
    fraction = Fraction(fraction).limit_denominator(10**9) if isinstance(fraction, float) else Fraction(fraction)
    if not 0 < fraction < 1:
        raise ValueError(f"fraction must lie in (0, 1), got {fraction}")
    items = list(items)
    if len(items) < 2:
        raise ValueError("holdout_split needs at least two items")
    n_eval = math.floor(fraction * len(items) + Fraction(1, 2))
    rng = np.random.default_rng(seed)
    chosen = set(rng.permutation(len(items))[:n_eval].tolist())
    train = [x for i, x in enumerate(items) if i not in chosen]
    held = [x for i, x in enumerate(items) if i in chosen]
    return train, held


def check_aligned(a, b, what="items"):
    if len(a) != len(b):
        raise LengthMismatchError(f"length mismatch: {len(a)} vs {len(b)} {what}")
