import pytest

from deftkit.errors import SchemaError
from deftkit.tags import DEFAULT_TYPES, BioTag, TagSchema


def test_alphabet_size(schema):
    assert len(schema) == 2 * len(DEFAULT_TYPES) + 1
    assert schema.tags[0] == BioTag("O")


@pytest.mark.parametrize("text", ["O", "B-Term", "I-Definition", "B-Alias-Term", "I-Secondary-Definition"])
def test_round_trip(text):
    assert str(BioTag.parse(text)) == text


@pytest.mark.parametrize("text", ["", "B", "B-", "X-Term", "o", "I_Term"])
def test_bad_tags(text):
    with pytest.raises(SchemaError):
        BioTag.parse(text)


def test_o_has_no_type():
    with pytest.raises(SchemaError):
        BioTag("O", "Term")
    with pytest.raises(SchemaError):
        BioTag("B")


def test_unknown_tag_in_schema(schema):
    with pytest.raises(SchemaError) as exc:
        schema.parse_tag("B-Qualifier")
    assert exc.value.tag == "B-Qualifier"


def test_legality(schema):
    b, i = BioTag("B", "Term"), BioTag("I", "Term")
    assert schema.is_legal(None, b)
    assert not schema.is_legal(None, i)
    assert schema.is_legal(b, i) and schema.is_legal(i, i)
    assert not schema.is_legal(BioTag("O"), i)
    assert not schema.is_legal(BioTag("B", "Definition"), i)


def test_schema_file(tmp_path):
    p = tmp_path / "types.txt"
    p.write_text("# custom\nTerm\n\nQualifier\n")
    s = TagSchema.from_file(p)
    assert s.types == ("Term", "Qualifier")
    assert "I-Qualifier" in s


def test_duplicate_types_rejected():
    with pytest.raises(SchemaError):
        TagSchema(["Term", "Term"])
