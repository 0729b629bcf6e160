"""Small generated corpora: a templated definition grammar for tagger tests
and demos, the bundled sample corpus, and raw sentences for cleaning checks.
"""

import numpy as np

from deftkit.corpus import Token, make_sentence, serialize_file
from deftkit.tags import BioTag

TERM_HEADS = ["cell", "enzyme", "tissue", "molecule", "organelle", "membrane", "gene",
              "protein", "tariff", "contract", "isotope", "orbital", "ion", "lipid",
              "catalyst", "ligand", "vector", "allele", "receptor", "polymer"]
TERM_MODS = ["plasma", "stem", "nerve", "covalent", "ionic", "carrier", "binding",
             "recessive", "dominant", "sodium", "messenger", "transport"]
DEF_ADJS = ["small", "large", "complex", "simple", "charged", "organic", "stable", "folded"]
DEF_NOUNS = ["structure", "unit", "particle", "substance", "region", "agreement",
             "compound", "chain", "sequence", "layer"]
VERBS = ["stores", "moves", "binds", "carries", "controls", "releases", "absorbs", "blocks"]
OBJECTS = ["energy", "water", "oxygen", "signals", "nutrients", "charge", "light", "waste"]
SUBJECTS = ["sample", "reaction", "experiment", "student", "solution", "plant", "model"]

TEMPLATES = (
    ("{T}", "means", "{D}", "."),
    ("{T}", "is", "defined", "as", "{D}", "."),
    ("The", "term", "{T}", "refers", "to", "{D}", "."),
)


def _term(rng):
    head = [str(rng.choice(TERM_HEADS))]
    return ([str(rng.choice(TERM_MODS))] + head) if rng.random() < 0.5 else head


def _definition(rng):
    return ["a", str(rng.choice(DEF_ADJS)), str(rng.choice(DEF_NOUNS)), "that",
            str(rng.choice(VERBS)), str(rng.choice(OBJECTS))]


def _span(words, kind):
    return [(w, BioTag("B" if i == 0 else "I", kind)) for i, w in enumerate(words)]


def _negative(rng):
    words = ["The", str(rng.choice(SUBJECTS)), str(rng.choice(VERBS)),
             str(rng.choice(OBJECTS)), "in", "the", str(rng.choice(DEF_NOUNS)), "."]
    return [(w, BioTag("O")) for w in words]


def templated_pairs(rng, p_definition=0.6):
    """One (word, tag) list drawn from the grammar."""
    if rng.random() >= p_definition:
        return _negative(rng)
    template = TEMPLATES[rng.integers(len(TEMPLATES))]
    out = []
    for piece in template:
        if piece == "{T}":
            out.extend(_span(_term(rng), "Term"))
        elif piece == "{D}":
            out.extend(_span(_definition(rng), "Definition"))
        else:
            out.append((piece, BioTag("O")))
    return out


def build_sentence(pairs, source, index, start=0):
    tokens = []
    pos = start
    for word, tag in pairs:
        tokens.append(Token(word, source, pos, pos + len(word), tag))
        pos += len(word) + 1
    return make_sentence(tokens, source, index)


def templated_corpus(n, seed=0, source="synthetic.txt"):
    """``n`` sentences from the separable "X means Y" grammar."""
    rng = np.random.default_rng(seed)
    out = []
    offset = 0
    for i in range(n):
        s = build_sentence(templated_pairs(rng), source, i, offset)
        offset = s.tokens[-1].end_char + 1
        out.append(s)
    return out


def _decorate(pairs, rng):
    """Add the noise seen in textbook text: enumerators, link placeholders, aliases."""
    r = rng.random()
    pairs = list(pairs)
    if r < 0.2:
        num = str(int(rng.integers(1, 60)))
        pairs = [(num, BioTag("O")), (".", BioTag("O"))] + pairs
    elif r < 0.35:
        link = [(w, BioTag("O")) for w in ("(", "[", "link", "]", ")")]
        pairs = pairs[:-1] + link + pairs[-1:]
    elif r < 0.45:
        tail = [(w, BioTag("O")) for w in ("as", "shown", "in", "[", "link", "]")]
        pairs = pairs[:-1] + tail + pairs[-1:]
    elif r < 0.55 and pairs[0][1].type == "Term":
        n = next(i for i, (_, t) in enumerate(pairs) if t.type != "Term")
        alias = _span([str(rng.choice(TERM_HEADS))], "Alias-Term")
        pairs = pairs[:n] + [(",", BioTag("O")), ("or", BioTag("O"))] + alias + \
            [(",", BioTag("O"))] + pairs[n:]
    return pairs


def sample_corpus(seed=2020):
    """The bundled fixture: ``{relative path: bytes}`` for 50 DEFT-format sentences."""
    rng = np.random.default_rng(seed)
    layout = {"train/t1_biology_0_0.deft": 22, "train/t2_chemistry_1_0.deft": 18,
              "dev/t1_biology_5_0.deft": 10}
    files = {}
    for rel, count in layout.items():
        source = "data/source_txt/" + rel.replace(".deft", ".txt")
        sentences = []
        offset = 0
        for i in range(count):
            s = build_sentence(_decorate(templated_pairs(rng), rng), source, i, offset)
            offset = s.tokens[-1].end_char + 1
            sentences.append(s)
        files[rel] = serialize_file(sentences)
    return files


def raw_sentences(n, seed=0):
    """Raw sentence strings mixing enumerators, ``([link])``, bare ``[link]`` and decimals."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        words = [w for w, _ in templated_pairs(rng)][:-1]
        text = " ".join(words)
        kind = rng.integers(8)
        if kind == 0:
            text = f"{int(rng.integers(1, 100))}. {text}"
        elif kind == 1:
            text = f"{int(rng.integers(1, 100))}) {text} ([link])"
        elif kind == 2:
            text = f"{text} as shown in [link]"
        elif kind == 3:
            text = f"{rng.integers(1, 9)}.{rng.integers(0, 9)} million {text}"
        elif kind == 4:
            text = f"([link]) {int(rng.integers(1, 9))}: {text}"
        elif kind == 5:
            text = f"{text} ([link]) ([link]) and [link]"
        elif kind == 6:
            text = f"  {text}\t([link])  "
        out.append(text + ".")
    return out


def bundled_corpus_dir():
    """Folder of the shipped sample corpus (``train/`` and ``dev/``)."""
    from pathlib import Path

    return Path(__file__).parent / "data" / "sample_corpus"
