import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ghzw_roof.classifier import surface_pattern
from ghzw_roof.dataset import (
    REFERENCE,
    compared,
    curves_csv,
    curves_dict,
    parse_surface_csv,
    round_sig,
    rounded,
    structure_dict,
    surface_csv,
    surface_json,
    to_json,
    write_text,
)


@pytest.fixture(scope="module")
def doc():
    return json.loads(to_json(structure_dict()))


@pytest.fixture(scope="module")
def small_pattern():
    return surface_pattern(10, 24)


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_round_sig_idempotent(x):
    r = round_sig(x)
    assert round_sig(r) == r
    if x != 0:
        assert abs(r - x) <= 1e-8 * abs(x)


def test_rounded_recurses():
    out = rounded({"a": [math.pi, np.float64(1 / 3)], "b": (np.int64(3), True), "c": np.array([2.0 / 3])})
    assert out == {"a": [3.14159265, 0.333333333], "b": [3, True], "c": [0.666666667]}


def test_compared_fields():
    c = compared(1.01, 1.0)
    assert c["computed"] == 1.01 and c["reference"] == 1.0
    assert c["rel_dev"] == pytest.approx(0.01)


def test_structure_reference_values(doc):
    assert doc["p0"]["computed"] == pytest.approx(0.626851015, abs=1e-9)
    assert doc["lower_circle"]["distance"]["computed"] == pytest.approx(0.0711148, abs=5e-4)
    assert doc["lower_circle"]["normal"]["computed"] == pytest.approx([0.57589, 0.0, -0.81753], abs=5e-3)
    assert doc["n_search"]["p_c"]["computed"] == pytest.approx(0.0964142, abs=5e-5)
    assert doc["m_search"]["p_c"]["computed"] == pytest.approx(0.962243, abs=5e-5)
    assert doc["inequality"]["favors_02"] is False
    assert [v["name"] for v in doc["zero_polytope"]["vertices"]] == ["W", "Z1", "Z2", "Z3"]
    assert len(doc["zero_polytope"]["edges"]) == 6
    assert len(doc["n_states"]) == len(doc["m_states"]) == 3
    assert len(doc["grand_circles"]) == len(doc["lower_circles"]) == 3


def test_reference_table_matches_closed_form():
    assert REFERENCE["p0"] == pytest.approx(0.6268510149, abs=1e-10)


def test_structure_output_is_deterministic():
    assert to_json(structure_dict()) == to_json(structure_dict())


def test_surface_csv_equals_json(small_pattern):
    rows_json = json.loads(surface_json(small_pattern, features=False))["rows"]
    rows_csv = parse_surface_csv(surface_csv(small_pattern))
    assert rows_csv == rows_json
    assert len(rows_csv) == 10 * 24


def test_surface_json_layout(small_pattern):
    doc = json.loads(surface_json(small_pattern))
    assert doc["columns"][:4] == ["theta", "phi", "region", "roof_value"]
    assert set(doc["features"]) >= {"polytope_edges", "zero_states", "normal_vectors"}
    assert doc["n_theta"] == 10 and doc["n_phi"] == 24


def test_parse_rejects_foreign_csv():
    with pytest.raises(ValueError):
        parse_surface_csv("a,b\n1,2\n")


@pytest.fixture(scope="module")
def curves():
    return curves_dict(101)


@pytest.mark.parametrize("family, ref", [("N", 0.0964142), ("M", 0.962243)])
def test_curve_tangents(curves, family, ref):
    block = curves[family]
    assert block["tangent"]["p_c"] == pytest.approx(ref, abs=5e-5)
    assert np.min(block["difference"]["value"]) >= -1e-12
    assert np.max(block["difference"]["value"]) > 0


def test_curves_csv_long_format():
    text = curves_csv(21)
    lines = text.splitlines()
    assert lines[0] == "family,series,p,value"
    fams = {line.split(",")[0] for line in lines[1:]}
    assert fams == {"N", "M"}


def test_write_text_creates_parents(tmp_path):
    target = write_text(tmp_path / "a" / "b" / "x.json", "{}\n")
    assert target.read_text() == "{}\n"
