"""Training-data augmentation from the first sentence of Wikipedia articles.

Terms found in the corpus are looked up through the REST summary endpoint,
the first sentence of each extract is kept, and the term is labelled where
it occurs. The result is noisy, and in practice terms nearly always sit at
the start of the sentence. Output therefore goes to separate files together
with a histogram of term start positions, and is never merged into training
data automatically.
"""

import hashlib
import json
import os
import re
import tempfile
import threading
import time
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Tuple
from urllib.parse import quote

from deftkit.corpus import Token, make_sentence, serialize_file
from deftkit.tags import BioTag

DEFAULT_BASE_URL = "https://en.wikipedia.org/api/rest_v1"
USER_AGENT_ENV = "DEFTKIT_USER_AGENT"
DEFAULT_USER_AGENT = "deftkit/0.1 (set DEFTKIT_USER_AGENT to a contact address)"

ABBREVIATIONS = frozenset("""
e.g i.e etc vs al approx ca cf dr mr mrs ms prof st jr sr no fig vol inc ltd co corp
jan feb mar apr jun jul aug sep sept oct nov dec u.s u.k
""".split())
FALLBACK_CHARS = 400

COPULAS = (
    ("is", "defined", "as"), ("are", "defined", "as"), ("refers", "to"), ("refer", "to"),
    ("is",), ("are",), ("was",), ("were",), ("means",),
)

_WORD = re.compile(r"\w+(?:[-'’]\w+)*|[^\w\s]")
_SENT_END = re.compile(r"\.(?=\s+[A-Z])")


class RetryableFetchError(Exception):
    """Network failure or cold cache in offline mode (CLI exit code 3)."""


@dataclass
class FetchPolicy:
    rate_limit: float = 1.0
    cache_dir: str = ".wiki_cache"
    offline: bool = False
    user_agent: str = field(default_factory=lambda: os.environ.get(USER_AGENT_ENV, DEFAULT_USER_AGENT))
    base_url: str = DEFAULT_BASE_URL
    timeout: float = 10.0

    def __post_init__(self):
        if not self.rate_limit > 0:
            raise ValueError("rate_limit must be positive")


@dataclass(frozen=True)
class FetchResult:
    term: str
    sentence: Optional[str] = None
    url: Optional[str] = None
    reason: Optional[str] = None
    fetched_at: Optional[str] = None

    @property
    def ok(self):
        return self.sentence is not None


@dataclass(frozen=True)
class AugmentExample:
    term: str
    sentence: str
    term_span: Tuple[int, int]
    source_url: str = ""
    fetched_at: str = ""

    @property
    def tokens(self) -> List[str]:
        return [m.group() for m in _WORD.finditer(self.sentence)]


@dataclass(frozen=True)
class Skip:
    term: str
    reason: str


def word_spans(text):
    return [(m.group(), m.start(), m.end()) for m in _WORD.finditer(text)]


def extract_terms(sentences) -> List[str]:
    """Surface strings of B-Term/I-Term spans, deduplicated case-insensitively."""
    seen = set()
    out = []

    def emit(words):
        if words:
            term = " ".join(words)
            if term.lower() not in seen:
                seen.add(term.lower())
                out.append(term)

    for s in sentences:
        span = []
        for tok in s.tokens:
            if tok.tag.type == "Term" and tok.tag.position == "B":
                emit(span)
                span = [tok.text]
            elif tok.tag.type == "Term" and tok.tag.position == "I" and span:
                span.append(tok.text)
            else:
                emit(span)
                span = []
        emit(span)
    return out


def first_sentence(extract: str) -> str:
    """Up to the first period followed by whitespace and a capital letter.

    Periods ending a known abbreviation or a single-letter initial do not
    count. With no usable boundary the first paragraph is returned, cut to
    400 characters.
    """
    extract = extract.strip()
    for m in _SENT_END.finditer(extract):
        before = extract[:m.start()]
        word = re.split(r"[\s(]", before)[-1].lower()
        if word in ABBREVIATIONS or (len(word) == 1 and word.isalpha()):
            continue
        return extract[:m.end()]
    return extract.split("\n", 1)[0][:FALLBACK_CHARS].strip()


def normalize_term(term: str) -> str:
    return " ".join(term.split()).lower()


class RateLimiter:
    def __init__(self, rate: float, clock=time.monotonic, sleep=time.sleep):
        self.interval = 1.0 / rate
        self.clock = clock
        self.sleep = sleep
        self._next = None
        self._lock = threading.Lock()

    def acquire(self):
        with self._lock:
            now = self.clock()
            if self._next is not None and self._next > now:
                self.sleep(self._next - now)
                now = self._next
            self._next = now + self.interval


class ResponseCache:
    """Raw response bytes plus a small metadata record, one pair per term."""

    def __init__(self, root):
        self.root = Path(root)
        self._locks = {}
        self._guard = threading.Lock()

    def _stem(self, key):
        slug = re.sub(r"[^a-z0-9]+", "_", key)[:40].strip("_")
        return self.root / f"{slug}-{hashlib.sha1(key.encode('utf-8')).hexdigest()[:12]}"

    def lock(self, key):
        with self._guard:
            return self._locks.setdefault(key, threading.Lock())

    def get(self, key):
        stem = self._stem(key)
        meta_path = stem.with_suffix(".meta.json")
        if not meta_path.exists():
            return None
        meta = json.loads(meta_path.read_text(encoding="utf-8"))
        return meta, stem.with_suffix(".body").read_bytes()

    def put(self, key, meta, body: bytes):
        self.root.mkdir(parents=True, exist_ok=True)
        stem = self._stem(key)
        # body first, meta last: a present meta file marks a complete entry
        for path, data in ((stem.with_suffix(".body"), body),
                           (stem.with_suffix(".meta.json"),
                            json.dumps(meta, sort_keys=True).encode("utf-8"))):
            fd, tmp = tempfile.mkstemp(dir=self.root)
            with os.fdopen(fd, "wb") as f:
                f.write(data)
            os.replace(tmp, path)


class WikiClient:
    def __init__(self, policy: FetchPolicy, session=None, clock=time.monotonic, sleep=time.sleep):
        self.policy = policy
        self.cache = ResponseCache(policy.cache_dir)
        self.limiter = RateLimiter(policy.rate_limit, clock, sleep)
        self._session = session
        self.requests_made = 0

    @property
    def session(self):
        if self._session is None:
            import requests

            self._session = requests.Session()
        return self._session

    def summary_url(self, term: str) -> str:
        title = " ".join(term.split())
        # wiki titles always start upper-case
        title = quote((title[:1].upper() + title[1:]).replace(" ", "_"), safe="")
        return f"{self.policy.base_url.rstrip('/')}/page/summary/{title}"

    def _download(self, term):
        import requests

        url = self.summary_url(term)
        self.limiter.acquire()
        self.requests_made += 1
        try:
            resp = self.session.get(url, timeout=self.policy.timeout,
                                    headers={"User-Agent": self.policy.user_agent,
                                             "Accept": "application/json"})
        except requests.RequestException as exc:
            raise RetryableFetchError(f"{term!r}: {exc}") from exc
        if resp.status_code not in (200, 404):
            raise RetryableFetchError(f"{term!r}: HTTP {resp.status_code}")
        meta = {"status": resp.status_code, "url": url,
                "fetched_at": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())}
        return meta, resp.content

    def raw(self, term: str):
        key = normalize_term(term)
        with self.cache.lock(key):
            hit = self.cache.get(key)
            if hit is not None:
                return hit
            if self.policy.offline:
                raise RetryableFetchError(f"{term!r}: not cached and offline mode is on")
            meta, body = self._download(term)
            self.cache.put(key, meta, body)
            return meta, body

    def fetch_first_sentence(self, term: str) -> FetchResult:
        if not term.strip():
            raise ValueError("empty term")
        meta, body = self.raw(term)
        if meta["status"] == 404:
            return FetchResult(term, reason="not found", fetched_at=meta.get("fetched_at"))
        try:
            data = json.loads(body.decode("utf-8"))
        except ValueError:
            return FetchResult(term, reason="unreadable response", fetched_at=meta.get("fetched_at"))
        if data.get("type") == "disambiguation":
            return FetchResult(term, reason="ambiguous", fetched_at=meta.get("fetched_at"))
        extract = (data.get("extract") or "").strip()
        if not extract:
            return FetchResult(term, reason="not found", fetched_at=meta.get("fetched_at"))
        url = (data.get("content_urls") or {}).get("desktop", {}).get("page") or meta["url"]
        return FetchResult(term, first_sentence(extract), url, fetched_at=meta.get("fetched_at"))


def fetch_first_sentence(term: str, policy: FetchPolicy, client: WikiClient = None) -> FetchResult:
    client = client or WikiClient(policy)
    return client.fetch_first_sentence(term)


def label_term(sentence: str, term: str, source_url: str = "", fetched_at: str = "") -> Optional[AugmentExample]:
    """First case-insensitive, token-aligned occurrence of ``term``."""
    words = [w.lower() for w, _, _ in word_spans(sentence)]
    target = [w.lower() for w, _, _ in word_spans(term)]
    if not target or not sentence.strip():
        return None
    n = len(target)
    for i in range(len(words) - n + 1):
        if words[i:i + n] == target:
            return AugmentExample(term, sentence, (i, i + n), source_url, fetched_at or "")
    return None


def augment_terms(terms, client: WikiClient, workers: int = 1):
    """Fetch and label every term. Returns ``(examples, skips)``.

    Every input term ends up in exactly one of the two lists.
    """
    def one(term):
        res = client.fetch_first_sentence(term)
        if not res.ok:
            return Skip(term, res.reason)
        ex = label_term(res.sentence, term, res.url, res.fetched_at)
        return ex if ex is not None else Skip(term, "term not in first sentence")

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(one, terms))
    else:
        results = [one(t) for t in terms]
    examples = [r for r in results if isinstance(r, AugmentExample)]
    skips = [r for r in results if isinstance(r, Skip)]
    return examples, skips


def _copula_end(words, start):
    low = [w.lower() for w in words]
    for i in range(start, len(low)):
        for cop in COPULAS:
            if tuple(low[i:i + len(cop)]) == cop:
                return i + len(cop)
    return None


def example_tags(example: AugmentExample, copula_split: bool = True) -> List[BioTag]:
    """Term span as B-/I-Term; with ``copula_split`` the text after the first
    copula following the term (minus a final period) as B-/I-Definition."""
    words = example.tokens
    tags = [BioTag("O")] * len(words)
    a, b = example.term_span
    for i in range(a, b):
        tags[i] = BioTag("B" if i == a else "I", "Term")
    if copula_split:
        c = _copula_end(words, b)
        end = len(words) - 1 if words and words[-1] == "." else len(words)
        if c is not None and c < end:
            for i in range(c, end):
                tags[i] = BioTag("B" if i == c else "I", "Definition")
    return tags


def position_bias(examples) -> Counter:
    return Counter(ex.term_span[0] for ex in examples)


def emit_augmented(examples, task: int, out_dir, copula_split: bool = True):
    """Write augmentation output for ``task`` plus ``position_bias.tsv``.

    Task 1 gets ``text<TAB>1`` lines; task 2 a DEFT token file. Returns the
    written paths.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if task == 1:
        path = out_dir / "augmented_task1.tsv"
        data = "".join(f"{' '.join(ex.sentence.split())}\t1\n" for ex in examples).encode("utf-8")
    elif task == 2:
        path = out_dir / "augmented_task2.deft"
        sentences = []
        for ex in examples:
            spans = word_spans(ex.sentence)
            tags = example_tags(ex, copula_split)
            tokens = [Token(w, ex.source_url or "wikipedia", s, e, t)
                      for (w, s, e), t in zip(spans, tags)]
            sentences.append(make_sentence(tokens, ex.source_url, len(sentences)))
        data = serialize_file(sentences)
    else:
        raise ValueError(f"task must be 1 or 2, got {task}")
    path.write_bytes(data)
    bias = position_bias(examples)
    bias_path = out_dir / "position_bias.tsv"
    lines = ["start_index\tcount"] + [f"{k}\t{bias[k]}" for k in sorted(bias)]
    bias_path.write_bytes(("\n".join(lines) + "\n").encode("utf-8"))
    return {"examples": str(path), "position_bias": str(bias_path)}


def write_skips(skips, path):
    data = "".join(f"{s.term}\t{s.reason}\n" for s in skips)
    Path(path).write_bytes(data.encode("utf-8"))
