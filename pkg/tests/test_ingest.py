import pytest
from hypothesis import given, settings, strategies as st

from lchsign.dga_core import (Augmentation, Dga, Element, capping_change_morphism, check_chain_map, compose,
                              identity_morphism)
from lchsign.ingest import (ParseError, parse_augmentation, parse_cobordism,
                            parse_cobordism_document, parse_dga, parse_dga_document, serialize_augmentation,
                            serialize_cobordism_document, serialize_dga, serialize_document, serialize_morphism)
from conftest import FIXTURES

W = Element.word
ABC = "ring Z\nchord a 1\nchord b 0\nchord c 0\n"


def test_basic_parse():
    dga = parse_dga(ABC + "disk a -> b c sign -1\n")
    assert dga.d("a") == -W("b", "c")


def test_unit_word():
    dga = parse_dga("chord a 1\ndisk a -> sign 1\n")
    assert dga.d("a") == Element.unit()


def test_comments_crlf_and_bytes():
    text = b"# header\r\nring Z\r\nchord a 1 # trailing\r\nchord b 0\r\n\r\ndisk a -> b b sign 2\r\n"
    doc = parse_dga_document(text)
    assert doc.records == {("a", ("b", "b")): 2}
    assert "\r" not in serialize_document(doc)


def test_counts_merge_and_cancel():
    doc = parse_dga_document(ABC + "disk a -> b c sign 1\ndisk a -> b c sign -1\ndisk a -> c b sign 2\n")
    assert doc.records == {("a", ("c", "b")): 2}


def test_z2_lifted():
    doc = parse_dga_document((FIXTURES / "z2.dga").read_text())
    assert doc.ring == "Z2"
    assert doc.records == {("d", ("c", "b")): 1}
    doc = parse_dga_document("ring Z2\nchord a 1\nchord b 0\ndisk a -> b sign 3\n")
    assert doc.records == {("a", ("b",)): 1}


def test_serialize_order():
    dga = Dga([("c", 0), ("b", 0), ("a", 1)], {"a": W("c", "b") - W("b", "c")})
    assert serialize_dga(dga) == ("ring Z\nchord a 1\nchord b 0\nchord c 0\n"
                                  "disk a -> b c sign -1\ndisk a -> c b sign 1\n")


def test_empty_dga():
    assert serialize_dga(Dga([])) == "ring Z\n"
    assert parse_dga("ring Z\n") == Dga([])


@pytest.mark.parametrize("text,line,col,fragment", [
    ("chord a x", 1, 9, "integer"),
    ("chord a 1\nchord a 2", 2, 7, "duplicate"),
    ("disk a -> b sign 1", 1, 6, "undefined"),
    ("chord a 1\ndisk a -> sign 0", 2, 16, "nonzero"),
    ("chord a 1\ndisk a -> sign +x", 2, 16, "integer"),
    ("chord a 1\ndisk a -> sign", 2, 15, "count"),
    ("chord a 1\ndisk a -> sign 1 2", 2, 18, "exactly one"),
    ("chord a 1\ndisk a b sign 1", 2, 8, "'->'"),
    ("chord a 1\ndisk", 2, 5, "positive chord"),
    ("chord a 1\ndisk a ->", 2, 10, "sign"),
    ("bogus 1", 1, 1, "unknown directive"),
    ("ring Q", 1, 6, "unknown ring"),
    ("ring Z\nring Z", 2, 1, "twice"),
    ("chord 9a 1", 1, 7, "invalid chord name"),
    ("chord a 1 2", 1, 11, "expected"),
    ("  chord a 1\n\tchord b q", 2, 10, "integer"),
])
def test_error_positions(text, line, col, fragment):
    with pytest.raises(ParseError) as info:
        parse_dga(text)
    err = info.value
    assert (err.line, err.column) == (line, col), str(err)
    assert fragment in err.message
    assert str(err).startswith(f"error:{line}:{col}: ")


def test_bad_utf8_position():
    with pytest.raises(ParseError) as info:
        parse_dga(b"ring Z\nchord \xff 1\n")
    assert (info.value.line, info.value.column) == (2, 7)


def test_dimension_warnings_fire_exactly_on_violations():
    doc = parse_dga_document(ABC + "chord e 3\ndisk a -> b c sign 1\ndisk e -> a sign 1\ndisk e -> a a sign 1\n")
    # only "e -> a" is off: 3 - 1 - 1 = 1
    assert [w.line for w in doc.warnings] == [7]
    assert "expected 0" in str(doc.warnings[0])


def test_rescaling_option():
    text = ABC + "chord e 2\nchord f 1\ndisk a -> b c sign 1\ndisk e -> f sign 1\n"
    plain = parse_dga(text)
    scaled = parse_dga(text, rescale_n=2)
    # (n-1)(|a|+1) is even for |a| = 1 and odd for |e| = 2
    assert scaled.d("a") == plain.d("a")
    assert scaled.d("e") == -plain.d("e")
    assert parse_dga(text, rescale_n=1) == plain


# --- cobordisms -----------------------------------------------------------------

@pytest.fixture
def abc():
    return parse_dga(ABC + "disk a -> b c sign 1\n")


def test_identity_table(abc):
    phi = parse_cobordism("disk a -> a sign 1\ndisk b -> b sign 1\ndisk c -> c sign 1\n", abc, abc)
    assert phi == identity_morphism(abc)


def test_diagonal_table(abc):
    table = "disk src.a -> tgt.a sign -1\ndisk src.b -> tgt.b sign 1\ndisk src.c -> tgt.c sign 1\n"
    expected, target = capping_change_morphism(abc, {"a": -1, "b": 1, "c": 1})
    phi = parse_cobordism(table, abc, target)
    assert phi == expected and check_chain_map(phi)[0]


def test_cobordism_resolution_errors(abc):
    with pytest.raises(ParseError) as info:
        parse_cobordism("disk q -> a sign 1", abc, abc)
    assert (info.value.line, info.value.column) == (1, 6)
    with pytest.raises(ParseError) as info:
        parse_cobordism("\ndisk src.a -> tgt.zz sign 1", abc, abc)
    assert (info.value.line, info.value.column) == (2, 19)
    with pytest.raises(ParseError):
        parse_cobordism("disk tgt.a -> a sign 1", abc, abc)
    with pytest.raises(ParseError):
        parse_cobordism("source x\nsource y", abc, abc)


def test_cobordism_degree_warnings(abc):
    doc = parse_cobordism_document("disk a -> a sign 1\ndisk b -> a sign 1\n")
    from lchsign.ingest import resolve_cobordism
    resolve_cobordism(doc, abc, abc)
    assert [w.line for w in doc.warnings] == [2]


def test_fixture_triple_pipeline():
    a = parse_dga((FIXTURES / "A.dga").read_bytes())
    b = parse_dga((FIXTURES / "B.dga").read_bytes())
    c = parse_dga((FIXTURES / "C.dga").read_bytes())
    phi1 = parse_cobordism((FIXTURES / "phi1.cob").read_bytes(), a, b)
    phi2 = parse_cobordism((FIXTURES / "phi2.cob").read_bytes(), b, c)
    phi12 = parse_cobordism((FIXTURES / "phi12.cob").read_bytes(), a, c)
    assert compose(phi2, phi1) == phi12
    text = serialize_morphism(phi12, "A.dga", "C.dga")
    assert text == (FIXTURES / "phi12.cob").read_text()
    again = parse_cobordism(text, a, c)
    assert again == phi12 and check_chain_map(again)[0]


# --- round trips ----------------------------------------------------------------

DGA_FIXTURES = sorted(FIXTURES.glob("*.dga"))
COB_FIXTURES = sorted(FIXTURES.glob("*.cob"))
AUG_FIXTURES = sorted(FIXTURES.glob("*.aug"))


@pytest.mark.parametrize("path", DGA_FIXTURES, ids=lambda p: p.name)
def test_dga_round_trip(path):
    doc = parse_dga_document(path.read_bytes())
    text = serialize_document(doc)
    assert parse_dga_document(text) == doc
    assert serialize_document(parse_dga_document(text)) == text
    dga = doc.to_dga()
    assert parse_dga(serialize_dga(dga)) == dga


@pytest.mark.parametrize("path", COB_FIXTURES, ids=lambda p: p.name)
def test_cobordism_round_trip(path):
    doc = parse_cobordism_document(path.read_bytes())
    text = serialize_cobordism_document(doc)
    assert parse_cobordism_document(text) == doc
    assert text == path.read_text()


@pytest.mark.parametrize("path", AUG_FIXTURES, ids=lambda p: p.name)
def test_augmentation_round_trip(path):
    aug = parse_augmentation(path.read_bytes())
    assert parse_augmentation(serialize_augmentation(aug)) == aug


def test_augmentation_errors(abc):
    with pytest.raises(ParseError):
        parse_augmentation("aug a 1", abc)          # grading 1
    with pytest.raises(ParseError):
        parse_augmentation("aug q 1", abc)
    with pytest.raises(ParseError):
        parse_augmentation("aug b 1\naug b 2")
    assert parse_augmentation("aug b 0\n") == Augmentation({})


names = st.sampled_from(["a", "b", "c", "d", "e1", "x_2"])


@st.composite
def documents(draw):
    chords = draw(st.dictionaries(names, st.integers(-4, 4), min_size=1, max_size=6))
    ks = sorted(chords)
    n = draw(st.integers(0, 8))
    lines = [f"chord {k} {chords[k]}" for k in ks]
    for _ in range(n):
        pos = draw(st.sampled_from(ks))
        word = draw(st.lists(st.sampled_from(ks), max_size=4))
        count = draw(st.integers(-5, 5).filter(bool))
        lines.append(f"disk {pos} -> {' '.join(word)} sign {count}".replace("->  sign", "-> sign"))
    ring = draw(st.sampled_from(["Z", "Z2"]))
    draw(st.randoms()).shuffle(lines)
    return f"ring {ring}\n" + "\n".join(lines) + "\n"


@settings(max_examples=150, deadline=None)
@given(documents())
def test_round_trip_property(text):
    doc = parse_dga_document(text)
    out = serialize_document(doc)
    assert parse_dga_document(out) == doc
    assert serialize_document(parse_dga_document(out)) == out
    dga = doc.to_dga()
    assert parse_dga(serialize_dga(dga)) == dga


@settings(max_examples=300, deadline=None)
@given(st.binary(max_size=120))
def test_fuzz_bytes_only_structured_errors(data):
    try:
        parse_dga(data)
    except ParseError as err:
        assert err.line >= 1 and err.column >= 1


TOKENS = ["ring", "Z", "Z2", "chord", "disk", "->", "sign", "a", "b", "src.a", "tgt.b", "0", "1", "-1",
          "#", "\n", "\r\n", " ", "\t", "x", "+2", "aug", "source", "target", "é", "9"]


@settings(max_examples=300, deadline=None)
@given(st.lists(st.sampled_from(TOKENS), max_size=40))
def test_fuzz_token_soup(tokens):
    text = " ".join(tokens)
    a = parse_dga("chord a 0\nchord b 0\n")
    for parse in (parse_dga, parse_cobordism_document, parse_augmentation,
                  lambda t: parse_cobordism(t, a, a)):
        try:
            parse(text)
        except ParseError as err:
            assert err.line >= 1 and err.column >= 1
