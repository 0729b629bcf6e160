from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from conftest import sentences
from deftkit.corpus import (ClassificationInstance, Token, concat_folder, holdout_split,
                            list_corpus_files, make_sentence, parse_file, parse_instances,
                            sentence_label, serialize_file, to_classification, write_instances)
from deftkit.errors import ParseError, SchemaError
from deftkit.tags import BioTag, TagSchema

LINE = "equilibrium\tsrc.txt\t100\t111\tB-Term\tT1\t-1\t0"


def tok(text, tag="O", start=0):
    return Token(text, "s.txt", start, start + len(text), BioTag.parse(tag))


def test_single_token_sentence():
    [s] = parse_file(LINE + "\n\n")
    assert s.label == 0
    [t] = s.tokens
    assert (t.text, t.source, t.start_char, t.end_char) == ("equilibrium", "src.txt", 100, 111)
    assert t.tag == BioTag("B", "Term")
    assert (t.tag_id, t.root_id, t.relation) == ("T1", "-1", "0")


def test_definition_label():
    content = "a\ts\t0\t1\tB-Definition\t-1\t-1\t0\nb\ts\t2\t3\tI-Definition\t-1\t-1\t0\n"
    [s] = parse_file(content)
    assert s.label == 1


def test_wrong_column_count_reports_line():
    content = LINE + "\nbad\tsrc\t1\t2\tO\n"
    with pytest.raises(ParseError) as exc:
        parse_file(content)
    assert exc.value.line == 2


def test_non_numeric_offset():
    with pytest.raises(ParseError):
        parse_file("x\ts\tab\t3\tO\t-1\t-1\t0\n")


def test_unknown_tag():
    with pytest.raises(SchemaError) as exc:
        parse_file("x\ts\t0\t1\tB-Qualifier\t-1\t-1\t0\n")
    assert exc.value.tag == "B-Qualifier"


def test_crlf_and_blank_runs():
    content = (LINE + "\r\n\r\n\r\n" + LINE.replace("100\t111", "200\t211") + "  \r\n").encode()
    out = parse_file(content)
    assert len(out) == 2
    assert [s.index for s in out] == [0, 1]


def test_short_column_variants():
    [s] = parse_file("x\ts\t0\t1\n", columns=4)
    assert s.tokens[0].tag == BioTag("O")
    assert s.tokens[0].relation == "0" and s.tokens[0].tag_id == "-1"
    [s] = parse_file("x\ts\t0\t1\tB-Term\n", columns=5)
    assert serialize_file([s], columns=5) == b"x\ts\t0\t1\tB-Term\n"


def test_serialize_format():
    s1 = make_sentence([tok("a")])
    s2 = make_sentence([tok("b")])
    assert serialize_file([]) == b""
    assert serialize_file([s1]) == b"a\ts.txt\t0\t1\tO\t-1\t-1\t0\n"
    assert serialize_file([s1, s2]).count(b"\n\n") == 1
    assert not serialize_file([s1, s2]).endswith(b"\n\n")


@settings(max_examples=200)
@given(st.lists(sentences(), min_size=0, max_size=5))
def test_round_trip_values(sents):
    sents = [make_sentence(s.tokens, "doc.txt", i) for i, s in enumerate(sents)]
    data = serialize_file(sents)
    assert parse_file(data, source="doc.txt") == sents
    assert serialize_file(parse_file(data)) == data


@settings(max_examples=200)
@given(sentences())
def test_label_rule(s):
    expected = any(t.type is not None and "Definition" in t.type for t in s.tags)
    assert s.label == int(expected)
    assert sentence_label(s.tags, "primary") == int(any(t.type == "Definition" for t in s.tags))


def test_parse_never_leaves_schema(sample_dir, schema):
    for path in list_corpus_files(sample_dir / "train"):
        for s in concat_folder([path]):
            assert all(t in schema for t in s.tags)


def _write(tmp_path, name, n, start_word="w"):
    sents = [make_sentence([tok(f"{start_word}{i}")], index=i) for i in range(n)]
    p = tmp_path / name
    p.write_bytes(serialize_file(sents))
    return p


def test_concat_order(tmp_path):
    b = _write(tmp_path, "b.deft", 2, "b")
    a = _write(tmp_path, "a.deft", 3, "a")
    out = concat_folder([b, a])
    assert [s.words[0] for s in out] == ["a0", "a1", "a2", "b0", "b1"]
    assert [s.source for s in out] == [str(a)] * 3 + [str(b)] * 2


def test_concat_associative(tmp_path):
    paths = [_write(tmp_path, f"{c}.deft", i + 1, c) for i, c in enumerate("abcd")]
    whole = concat_folder(paths)
    assert whole == concat_folder(paths[:2]) + concat_folder(paths[2:])


def test_concat_empty(tmp_path):
    assert concat_folder(list_corpus_files(tmp_path)) == []


def test_concat_bad_file_named(tmp_path):
    _write(tmp_path, "a.deft", 2)
    bad = tmp_path / "b.deft"
    bad.write_text("x\ty\n")
    with pytest.raises(ParseError) as exc:
        concat_folder(list_corpus_files(tmp_path))
    assert "b.deft" in str(exc.value) and exc.value.line == 1


def test_to_classification():
    s = make_sentence([tok("Water"), tok("boils", start=6)])
    assert to_classification([s]) == [ClassificationInstance("Water boils", 0)]
    d = make_sentence([tok("x", "B-Definition")])
    assert to_classification([d])[0].label == 1


def test_to_classification_order():
    import random

    rng = random.Random(3)
    sents = [make_sentence([tok(f"w{i}", rng.choice(["O", "B-Definition"]))]) for i in range(100)]
    out = to_classification(sents)
    assert [i.text for i in out] == [f"w{i}" for i in range(100)]
    assert [i.label for i in out] == [s.label for s in sents]


def test_instances_io():
    inst = [ClassificationInstance("a b", 1), ClassificationInstance("c", 0)]
    assert parse_instances(write_instances(inst)) == inst
    assert parse_instances('"quoted text"\t"1"\n') == [ClassificationInstance("quoted text", 1)]
    with pytest.raises(ParseError):
        parse_instances("no label here\n")


def test_holdout_one_fifth():
    train, held = holdout_split(list(range(10)), Fraction(1, 5), seed=7)
    assert (len(train), len(held)) == (8, 2)
    assert sorted(train + held) == list(range(10))


def test_holdout_deterministic():
    assert holdout_split(range(50), 0.2, 11) == holdout_split(range(50), 0.2, 11)


def test_holdout_covers_all_singletons():
    # enumerate seeds: every one of the 5 possible eval sets must show up
    seen = set()
    for seed in range(1000):
        train, held = holdout_split(list("abcde"), Fraction(1, 5), seed)
        assert len(held) == 1 and len(train) == 4
        seen.add(held[0])
    assert seen == set("abcde")


@pytest.mark.parametrize("frac", [0, 1, -0.1, 1.5])
def test_holdout_bad_fraction(frac):
    with pytest.raises(ValueError):
        holdout_split(range(10), frac)


def test_bundled_files_match_generator(sample_dir):
    from deftkit.synthetic import sample_corpus

    generated = sample_corpus()
    on_disk = {p.relative_to(sample_dir).as_posix(): p.read_bytes() for p in sample_dir.rglob("*.deft")}
    assert on_disk == generated
