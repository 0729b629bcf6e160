import pytest
from hypothesis import strategies as st

from deftkit.corpus import Token, make_sentence
from deftkit.synthetic import bundled_corpus_dir
from deftkit.tags import BioTag, TagSchema


@pytest.fixture
def schema():
    return TagSchema()


@pytest.fixture
def sample_dir():
    return bundled_corpus_dir()


WORDS = st.text(alphabet=st.characters(blacklist_categories=("Cs", "Cc", "Zs", "Zl", "Zp")),
                min_size=1, max_size=8).filter(lambda w: w.strip() == w and "\t" not in w)


@st.composite
def sentences(draw, schema=TagSchema(), max_tokens=8):
    n = draw(st.integers(1, max_tokens))
    words = draw(st.lists(WORDS, min_size=n, max_size=n))
    tags = draw(st.lists(st.sampled_from(schema.tags), min_size=n, max_size=n))
    pos = draw(st.integers(0, 1000))
    tokens = []
    for w, t in zip(words, tags):
        gap = draw(st.integers(0, 3))
        tokens.append(Token(w, "doc.txt", pos, pos + len(w), t,
                            draw(st.sampled_from(["-1", "T1", "T22"])),
                            draw(st.sampled_from(["-1", "T1"])),
                            draw(st.sampled_from(["0", "Direct-Defines", "AKA"]))))
        pos += len(w) + gap
    return make_sentence(tokens, "doc.txt", 0)
