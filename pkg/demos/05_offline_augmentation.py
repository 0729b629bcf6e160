"""
Augmenting with encyclopedia first sentences
============================================

Label a few looked-up sentences as definitions of their title terms. The
lookup runs offline against a small hand-filled cache, so no network is used.
"""

import json
import tempfile
from pathlib import Path

from deftkit.augment import (FetchPolicy, ResponseCache, WikiClient, augment_terms,
                             emit_augmented, example_tags, normalize_term, position_bias)

pages = {
    "Osmosis": "Osmosis is the movement of water through a membrane. It matters in biology.",
    "Enzyme": "An enzyme is a protein that speeds up a reaction. Most are folded.",
}

work = Path(tempfile.mkdtemp())
cache = ResponseCache(work / "cache")
for title, extract in pages.items():
    body = {"type": "standard", "extract": extract,
            "content_urls": {"desktop": {"page": f"https://en.wikipedia.org/wiki/{title}"}}}
    # cache keys are normalised terms, the same key the client looks up
    cache.put(normalize_term(title), {"status": 200, "url": title, "fetched_at": "2020-01-01T00:00:00Z"},
              json.dumps(body).encode())

client = WikiClient(FetchPolicy(cache_dir=str(work / "cache"), offline=True))
# a term missing from the cache would raise in offline mode, so only cached ones here
examples, skips = augment_terms(["Osmosis", "Enzyme"], client)
print(len(examples), "examples;", [(s.term, s.reason) for s in skips])

for ex in examples:
    print(list(zip(ex.tokens, [str(t) for t in example_tags(ex)])))

# every term here sits at the start of its sentence, or right after an article;
# the histogram makes that positional bias easy to see
print(dict(position_bias(examples)))

written = emit_augmented(examples, 2, work / "out")
print(open(written["position_bias"]).read())
print("network requests:", client.requests_made)
