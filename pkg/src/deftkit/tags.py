"""BIO tags and the closed tag alphabet used by DEFT sequence labelling."""

from dataclasses import dataclass
from typing import Iterable, Optional

from deftkit.errors import SchemaError

DEFAULT_TYPES = (
    "Term",
    "Definition",
    "Alias-Term",
    "Referential-Term",
    "Referential-Definition",
    "Ordered-Term",
    "Ordered-Definition",
    "Secondary-Definition",
)


@dataclass(frozen=True, order=True)
class BioTag:
    position: str
    type: Optional[str] = None

    def __post_init__(self):
        if self.position not in ("B", "I", "O"):
            raise SchemaError(str(self), f"bad BIO position {self.position!r}")
        if (self.position == "O") != (self.type is None):
            raise SchemaError(str(self), "O carries no type; B/I require one")
        if self.type is not None and not self.type:
            raise SchemaError(str(self), "empty tag type")

    @classmethod
    def parse(cls, text: str) -> "BioTag":
        if text == "O":
            return cls("O")
        head, sep, tail = text.partition("-")
        if not sep or head not in ("B", "I") or not tail:
            raise SchemaError(text)
        return cls(head, tail)

    def __str__(self):
        if self.position == "O":
            return "O"
        return f"{self.position}-{self.type}"


OUTSIDE = BioTag("O")


class TagSchema:
    """Ordered tag-type inventory and the BIO alphabet derived from it.

    Alphabet order is ``O, B-t1, I-t1, B-t2, I-t2, ...``; decoders break
    ties towards the lowest index, so ``O`` wins ties.
    """

    def __init__(self, types: Iterable[str] = DEFAULT_TYPES):
        types = tuple(types)
        if len(set(types)) != len(types):
            raise SchemaError(",".join(types), "duplicate tag types in schema")
        for t in types:
            if not t or any(c.isspace() for c in t):
                raise SchemaError(t, f"invalid tag type {t!r}")
        self.types = types
        tags = [OUTSIDE]
        for t in types:
            tags.append(BioTag("B", t))
            tags.append(BioTag("I", t))
        self.tags = tuple(tags)
        self._index = {tag: i for i, tag in enumerate(self.tags)}
        self._by_string = {str(tag): tag for tag in self.tags}

    @classmethod
    def from_file(cls, path) -> "TagSchema":
        with open(path, encoding="utf-8") as f:
            types = [line.strip() for line in f]
        return cls(t for t in types if t and not t.startswith("#"))

    def __len__(self):
        return len(self.tags)

    def __eq__(self, other):
        return isinstance(other, TagSchema) and self.types == other.types

    def __hash__(self):
        return hash(self.types)

    def __repr__(self):
        return f"TagSchema({list(self.types)!r})"

    def __contains__(self, tag):
        if isinstance(tag, str):
            return tag in self._by_string
        return tag in self._index

    def parse_tag(self, text: str) -> BioTag:
        try:
            return self._by_string[text]
        except KeyError:
            raise SchemaError(text) from None

    def index(self, tag) -> int:
        if isinstance(tag, str):
            tag = self.parse_tag(tag)
        try:
            return self._index[tag]
        except KeyError:
            raise SchemaError(str(tag)) from None

    def is_legal(self, prev: Optional[BioTag], cur: BioTag) -> bool:
        """``prev=None`` stands for the sequence start."""
        if cur.position != "I":
            return True
        if prev is None or prev.position == "O":
            return False
        return prev.type == cur.type

    def transition_mask(self):
        """Boolean matrix ``allowed[prev, cur]`` plus the start vector."""
        import numpy as np

        n = len(self.tags)
        allowed = np.zeros((n, n), dtype=bool)
        for i, p in enumerate(self.tags):
            for j, c in enumerate(self.tags):
                allowed[i, j] = self.is_legal(p, c)
        start = np.array([self.is_legal(None, c) for c in self.tags])
        return allowed, start
