from __future__ import annotations

import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chartmark import ChartMarkError, parse, serialize
from chartmark.corpus import corpus_entries, corpus_entry
from chartmark.parser import load_json

from generators import dumps, random_document
from invalid_fixtures import base_document


def _codes(text: str) -> list[tuple[str, str]]:
    with pytest.raises(ChartMarkError) as exc:
        parse(text)
    return [(d.code, d.path) for d in exc.value.diagnostics]


class TestExamples:
    def test_scatter_trend_document(self):
        doc = parse(corpus_entry("scatter_trend").document)
        assert len(doc.annotations) == 3
        assert [a.task.type for a in doc.annotations] == ["trend", "description", "highlight"]

    def test_minimal_document(self):
        doc = parse('{"chart": {"title": "t", "type": "bar", "x_name": "x", "y_name": "y", "x_data": [], "y_data": []}, "annotations": []}')
        assert doc.annotations == ()

    def test_unknown_task_type(self):
        d = base_document()
        d["annotations"][0]["task"]["type"] = "emphasize"
        assert _codes(json.dumps(d)) == [("UNKNOWN_ENUM", "/annotations/0/task/type")]


class TestSerialize:
    def test_grouped_line_idempotent(self):
        text = corpus_entry("grouped_line_reference").document
        once = serialize(parse(text))
        assert serialize(parse(once)) == once

    def test_extra_chart_fields_pass_through(self):
        d = base_document()
        d["chart"]["palette"] = {"scheme": "tableau10", "n": [1, 2]}
        doc = parse(json.dumps(d))
        assert doc.chart.extra == {"palette": {"scheme": "tableau10", "n": [1, 2]}}
        assert json.loads(serialize(doc))["chart"]["palette"] == {"scheme": "tableau10", "n": [1, 2]}

    def test_annotation_order_kept(self):
        d = base_document()
        out = json.loads(serialize(parse(json.dumps(d))))
        assert [a["id"] for a in out["annotations"]] == ["a1", "a2"]
        d["annotations"].reverse()
        out = json.loads(serialize(parse(json.dumps(d))))
        assert [a["id"] for a in out["annotations"]] == ["a2", "a1"]

    def test_canonical_form(self):
        text = serialize(parse(json.dumps(base_document())))
        assert " " not in text.replace("y < 60", "")
        assert text == json.dumps(json.loads(text), sort_keys=True, separators=(",", ":"), ensure_ascii=False)

    def test_shortest_numbers(self):
        d = base_document()
        d["chart"]["y_data"] = [0.1, 1e-7, 2.5, 3]
        text = serialize(parse(json.dumps(d)))
        assert '"y_data":[0.1,1e-07,2.5,3]' in text

    @pytest.mark.parametrize("entry", corpus_entries(), ids=lambda e: e.name)
    def test_corpus_round_trip(self, entry):
        c = entry.compiler()
        doc = c.parse(entry.document)
        assert c.parse(serialize(doc)) == doc


class TestErrors:
    def test_malformed_json_position(self):
        (d,) = parse_errors('{"chart": }')
        assert (d.code, d.line, d.column) == ("MALFORMED_JSON", 1, 11)

    @pytest.mark.parametrize("token", ["NaN", "Infinity", "-Infinity"])
    def test_rejects_non_finite(self, token):
        d = base_document()
        text = json.dumps(d).replace("55", token)
        assert parse_errors(text)[0].code == "MALFORMED_JSON"

    def test_not_an_object(self):
        assert [d.code for d in parse_errors("[]")] == ["WRONG_TYPE"]

    def test_error_completeness(self):
        d = base_document()
        del d["chart"]["x_name"]
        d["chart"]["y_data"][0] = "oops"
        d["annotations"][0]["task"]["type"] = "emphasize"
        d["annotations"][1]["data"]["source"] = "somewhere"
        d["annotations"][1]["operations"][0]["target"]["type"] = "pixel"
        found = parse_errors(json.dumps(d))
        assert len(found) >= 5
        assert {(x.code, x.path) for x in found} >= {
            ("MISSING_FIELD", "/chart/x_name"),
            ("WRONG_TYPE", "/chart/y_data/0"),
            ("UNKNOWN_ENUM", "/annotations/0/task/type"),
            ("UNKNOWN_ENUM", "/annotations/1/data/source"),
            ("UNKNOWN_ENUM", "/annotations/1/operations/0/target/type"),
        }

    def test_bool_is_not_a_number(self):
        d = base_document()
        d["chart"]["y_data"][0] = True
        assert ("WRONG_TYPE", "/chart/y_data/0") in {(x.code, x.path) for x in parse_errors(json.dumps(d))}

    def test_unknown_op_name(self):
        d = base_document()
        d["annotations"][0]["operations"][0]["name"] = "add_stroke"
        assert [(x.code, x.path) for x in parse_errors(json.dumps(d))] == [
            ("UNKNOWN_ENUM", "/annotations/0/operations/0/name")
        ]

    def test_bytes_input(self):
        doc = parse(json.dumps(base_document()).encode("utf-8"))
        assert doc.chart.title == "Sales"

    def test_duplicate_key_in_annotation(self):
        text = json.dumps(base_document()).replace('"id": "a2"', '"id": "a2", "id": "a3"')
        assert ("DUPLICATE_KEY", "/annotations/1/id") in {(x.code, x.path) for x in parse_errors(text)}

    def test_load_json_keeps_last_value(self):
        assert load_json('{"b": 1, "b": 2}') == {"b": 2}


def parse_errors(text: str):
    with pytest.raises(ChartMarkError) as exc:
        parse(text)
    return exc.value.diagnostics


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_round_trip_property(seed):
    raw = random_document(random.Random(seed))
    doc = parse(dumps(raw))
    text = serialize(doc)
    assert parse(text) == doc
    assert serialize(parse(text)) == text


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_no_data_loss(seed):
    raw = random_document(random.Random(seed))
    out = json.loads(serialize(parse(dumps(raw))))
    assert out["chart"] == raw["chart"]
    for before, after in zip(raw["annotations"], out["annotations"]):
        assert after["id"] == before["id"]
        assert after["task"] == before["task"]
        assert after["data"] == before["data"]
        for op_in, op_out in zip(before["operations"], after["operations"]):
            assert op_out["name"] == op_in["name"]
            assert op_out["target"] == op_in["target"]
            assert op_out["marker"] == op_in["marker"]
