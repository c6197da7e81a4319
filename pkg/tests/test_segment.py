import json

import pytest
from hypothesis import given, strategies as st

from kse import fixtures
from kse.segment import normalize_ws, split_sentences


def test_single_sentence():
    assert split_sentences("Hello world.") == ["Hello world."]


def test_abbreviation_not_split():
    assert split_sentences("He met Dr. Smith. She left.") == ["He met Dr. Smith.", "She left."]


def test_three_terminators():
    assert split_sentences("What? Yes! Ok.") == ["What?", "Yes!", "Ok."]


def test_whitespace_only_input():
    assert split_sentences("   \n\t ") == []
    assert split_sentences("") == []


@pytest.mark.parametrize(
    "text,expected",
    [
        ("The U.S. Navy sailed. It was 1944.", ["The U.S. Navy sailed.", "It was 1944."]),
        ("See Fig. 3 for details. Then continue.", ["See Fig. 3 for details.", "Then continue."]),
        ("Prices rose 3.5 percent. Markets fell.", ["Prices rose 3.5 percent.", "Markets fell."]),
        ("A. B.", ["A.", "B."]),
        # the period is followed by a quote, not whitespace, so no boundary fires
        ('He said "Go." Then he left.', ['He said "Go." Then he left.']),
        ("One sentence without terminator", ["One sentence without terminator"]),
        ("Wait... Really? Yes.", ["Wait...", "Really?", "Yes."]),
        ("In 1905. 42 things happened.", ["In 1905.", "42 things happened."]),
        ("lowercase after. not a split here", ["lowercase after. not a split here"]),
        ("Mrs. Halzan donated maps. Bells rang.", ["Mrs. Halzan donated maps.", "Bells rang."]),
    ],
)
def test_rule_cases(text, expected):
    assert split_sentences(text) == expected


def test_no_empty_sentences_and_deterministic():
    text = "A.  B!   C?  "
    first = split_sentences(text)
    assert all(s for s in first)
    assert first == split_sentences(text)


def test_fixture_manifest_counts():
    """Counts recorded at construction time must match the splitter."""
    manifest = fixtures.manifest()
    with open(fixtures.corpus_path(), encoding="utf-8") as fh:
        for line in fh:
            doc = json.loads(line)
            assert len(split_sentences(doc["text"])) == manifest[doc["id"]], doc["id"]


def test_fixture_round_trip():
    with open(fixtures.corpus_path(), encoding="utf-8") as fh:
        for line in fh:
            text = json.loads(line)["text"]
            joined = " ".join(split_sentences(text))
            assert normalize_ws(joined) == normalize_ws(text)


@st.composite
def prose(draw):
    words = st.text(alphabet="abcdefghij", min_size=1, max_size=8)
    sentence = st.lists(words, min_size=1, max_size=6).map(" ".join)
    parts = draw(st.lists(sentence, min_size=1, max_size=5))
    ends = [draw(st.sampled_from([". ", "! ", "? "])) for _ in parts]
    return "".join(p.capitalize() + e for p, e in zip(parts, ends))


@given(prose())
def test_round_trip_property(text):
    joined = " ".join(split_sentences(text))
    assert normalize_ws(joined) == normalize_ws(text)
