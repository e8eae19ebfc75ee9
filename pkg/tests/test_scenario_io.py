from __future__ import annotations

import json
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pnkunits.constructions import (
    make_enriques,
    make_k6,
    make_mixed_n2,
    make_nonexample_product,
    make_product_cover,
    make_symmetric_stack,
    make_wreath,
)
from pnkunits.scenario_io import ScenarioParseError, dumps, load, loads, scenario_to_dict

CORPUS = Path(__file__).resolve().parent.parent / "scenarios"


def recipes():
    return st.one_of(
        st.integers(1, 6).map(make_enriques),
        st.tuples(st.integers(1, 4), st.integers(1, 4)).map(lambda t: make_product_cover(*t)),
        st.tuples(st.integers(1, 3), st.integers(0, 2)).map(lambda t: make_wreath(*t)),
        st.sampled_from([2, 4, 6]).map(make_mixed_n2),
        st.integers(1, 3).map(make_k6),
        st.tuples(st.integers(1, 4), st.sampled_from([2, 4, 6])).map(lambda t: make_symmetric_stack(*t)),
        st.just(make_nonexample_product()),
    )


@settings(max_examples=60, deadline=None)
@given(recipes())
def test_round_trip(s):
    text = dumps(s)
    back = loads(text)
    assert back == s
    assert dumps(back) == text


@pytest.mark.parametrize("path", sorted(CORPUS.rglob("*.json")), ids=lambda p: p.name)
def test_corpus_files_are_canonical(path):
    text = path.read_text(encoding="utf-8")
    assert dumps(loads(text)) == text


def test_unknown_is_preserved():
    d = scenario_to_dict(make_enriques(2))
    d["generators"][0]["fixed_point_free"] = "unknown"
    s = loads(json.dumps(d))
    assert s.generators[0].fixed_point_free is None
    assert json.loads(dumps(s))["generators"][0]["fixed_point_free"] == "unknown"


def _broken(mutate) -> str:
    d = scenario_to_dict(make_mixed_n2(2))
    mutate(d)
    return json.dumps(d)


@pytest.mark.parametrize("mutate,where", [
    (lambda d: d.pop("factors"), "factors"),
    (lambda d: d.__setitem__("version", 9), "version"),
    (lambda d: d["factors"][0].__setitem__("kind", "XX"), "factors[0]"),
    (lambda d: d["factors"][0].__setitem__("param", 0), "factors[0].param"),
    (lambda d: d["factors"][0]["automorphism"].__setitem__("order", 3), "factors[0].automorphism.rho[0]"),
    (lambda d: d["generators"][0].__setitem__("fixed_point_free", "maybe"), "generators[0].fixed_point_free"),
    (lambda d: d["generators"][0]["powers"].__setitem__("Y", "one"), "generators[0].powers.Y"),
    (lambda d: d["generators"][0].__setitem__("perm", {"Z1": "Y"}), "generators"),
])
def test_field_addressed_errors(mutate, where):
    with pytest.raises(ScenarioParseError) as e:
        loads(_broken(mutate))
    assert e.value.where == where


def test_json_syntax_error_has_position():
    with pytest.raises(ScenarioParseError) as e:
        loads('{"version": 1,\n  "name": }')
    assert e.value.where.startswith("line 2 column")


def test_load_from_disk(tmp_path):
    p = tmp_path / "s.json"
    p.write_text(dumps(make_wreath(2, 1)), encoding="utf-8")
    assert load(p) == make_wreath(2, 1)
