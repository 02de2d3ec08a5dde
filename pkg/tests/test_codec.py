import glob
import json
import os

import pytest

from artifact.exactla import field
from artifact.chain import sphere
from artifact.coalg import fixture, validate_coalgebra
from artifact.codec import (
    encode, decode, to_document, from_document, encode_many, kind_of, ParseError,
    ValidationError, VERSION,
)

import gen
import make_golden

GOLDEN = make_golden.GOLDEN
FILES = sorted(glob.glob(os.path.join(GOLDEN, "*.json")))


def read(path):
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def test_golden_set_is_complete():
    names = {os.path.basename(p)[:-5] for p in FILES}
    assert names == {stem for stem, _ in make_golden.all_documents()}


@pytest.mark.parametrize("path", FILES, ids=lambda p: os.path.basename(p))
def test_golden_round_trip(path):
    text = read(path)
    assert encode(decode(text)) == text


@pytest.mark.parametrize("stem,obj", list(make_golden.all_documents()), ids=lambda x: x if isinstance(x, str) else "")
def test_golden_matches_current_encoder(stem, obj):
    assert encode(obj) == read(os.path.join(GOLDEN, stem + ".json"))


def test_c2_golden_revalidates():
    C = decode(read(os.path.join(GOLDEN, "C2-F2-coalgebra.json")))
    assert all(validate_coalgebra(C).values())
    assert encode(C) == encode(fixture("C2", "F2"))


def test_scalar_grammar():
    X = gen.random_complex("Q", 3)
    doc = to_document(X)
    cells = [v for m in doc["payload"]["d"].values() for row in m for v in row]
    assert all(isinstance(v, str) and "/" in v for v in cells)
    P = to_document(sphere(field("F2xF3"), 1, 1))
    assert P["payload"]["field"] == "F2xF3"
    D = to_document(gen.random_complex("F2xF3", 1))
    cells = [v for m in D["payload"]["d"].values() for row in m for v in row]
    assert all(isinstance(v, list) and len(v) == 2 for v in cells)


def _complex_doc():
    return json.loads(read(os.path.join(GOLDEN, "complex-Q.json")))


def test_d_squared_nonzero_rejected():
    doc = {"kind": "complex", "version": VERSION, "payload": {
        "field": "F3", "support": [0, 2], "dims": {"0": 1, "1": 1, "2": 1},
        "d": {"1": [[1]], "2": [[1]]}}}
    with pytest.raises(ValidationError):
        from_document(doc)


def test_unknown_version_rejected():
    doc = _complex_doc()
    doc["version"] = 99
    with pytest.raises(ParseError):
        from_document(doc)


@pytest.mark.parametrize("mutate,where", [
    (lambda d: d["payload"].pop("dims"), "dims"),
    (lambda d: d["payload"].__setitem__("field", "F4"), "field"),
    (lambda d: d.__setitem__("kind", "banana"), "kind"),
])
def test_parse_errors_have_locations(mutate, where):
    doc = _complex_doc()
    mutate(doc)
    with pytest.raises(ParseError) as e:
        from_document(doc)
    assert e.value.location.startswith("$")


def test_non_lowest_terms_rational_rejected():
    doc = _complex_doc()
    d = doc["payload"]["d"]
    k = next(iter(d))
    d[k][0][0] = "2/4"
    with pytest.raises(ParseError):
        from_document(doc)


def test_truncated_text_rejected():
    with pytest.raises(ParseError):
        decode(read(FILES[0])[:-7])


def test_comodule_against_given_coalgebra():
    k = read(os.path.join(GOLDEN, "C2-F2-k.json"))
    C = decode(read(os.path.join(GOLDEN, "C2-F2-coalgebra.json")))
    X = decode(k, coalgebra=C)
    assert X.coalgebra is C
    with pytest.raises(ValidationError):
        decode(k, coalgebra=fixture("C2x4", "F2"))


def test_many_documents():
    xs = [fixture("C2", "F3"), gen.random_complex("F5", 2)]
    out = decode(encode_many(xs))
    assert [kind_of(x) for x in out] == ["coalgebra", "complex"]
    assert [encode(x) for x in out] == [encode(x) for x in xs]
