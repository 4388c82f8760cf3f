"""Serialization: deterministic bytes, faithful round trips, honest errors."""

import json

import pytest

from plcoin import catalog, io
from plcoin.coincidence import coincidence_report
from plcoin.duality import shared_context
from plcoin.errors import InputError
from plcoin.homology import homology


def test_complex_round_trip_integer_labels(tmp_path):
    cx = catalog.circle(6)
    path = tmp_path / "c6.json"
    text = io.write_complex(cx, path)
    back = io.read_complex(path)
    assert back.name == cx.name
    assert back.verts == cx.verts
    assert back.top_simplices == cx.top_simplices
    assert back.orientation == cx.orientation
    # serialization is a fixed point
    assert io.dumps(io.complex_to_dict(back)) == text


def test_complex_tuple_labels_flatten_to_strings(tmp_path):
    T2 = catalog.torus(3)
    doc = io.complex_to_dict(T2)
    assert all(isinstance(v, str) for v in doc["vertex_order"])
    back = io.complex_from_dict(doc)
    assert io.complex_to_dict(back) == doc
    assert len(back.top_simplices) == len(T2.top_simplices)


def test_non_orientable_complex_serializes_null_orientation():
    doc = io.complex_to_dict(catalog.projective_plane())
    assert doc["orientation"] is None
    assert doc["flags"] == {"manifold": True}
    back = io.complex_from_dict(doc)
    assert back.orientation is None


def test_dumps_is_deterministic():
    doc = io.complex_to_dict(catalog.tetra_sphere())
    assert io.dumps(doc) == io.dumps(json.loads(io.dumps(doc)))
    assert io.dumps(doc).endswith("\n")


@pytest.mark.parametrize("mutate, message", [
    (lambda d: d.pop("dim"), "missing key"),
    (lambda d: d.update(dim=7), "declared dim"),
    (lambda d: d.update(orientation=[1]), "orientation has"),
    (lambda d: d.update(orientation=[2] * 6), "must be"),
    (lambda d: d["vertex_order"].__setitem__(0, [0]), "string or an integer"),
])
def test_malformed_complex_files(mutate, message):
    doc = io.complex_to_dict(catalog.circle(6))
    mutate(doc)
    with pytest.raises(InputError, match=message):
        io.complex_from_dict(doc)


def test_map_round_trip(tmp_path):
    ex = catalog.circle_pair(1, 2)
    path = tmp_path / "f.json"
    io.write_map(ex.f, path)
    cxs = {ex.domain.name: ex.domain, ex.codomain.name: ex.codomain}
    back = io.read_map(path, cxs)
    assert back.vertex_map == ex.f.map.vertex_map
    assert back.domain is ex.domain and back.codomain is ex.codomain


def test_map_with_unknown_complex():
    ex = catalog.circle_pair(1, 2)
    doc = io.map_to_dict(ex.f)
    with pytest.raises(InputError, match="no such complex"):
        io.map_from_dict(doc, {})


def test_map_with_unknown_vertex():
    ex = catalog.circle_pair(1, 2)
    doc = io.map_to_dict(ex.f)
    doc["vertex_map"]["99"] = 0
    cxs = {ex.domain.name: ex.domain, ex.codomain.name: ex.codomain}
    with pytest.raises(InputError, match="not a vertex"):
        io.map_from_dict(doc, cxs)


def test_not_json(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{", encoding="utf-8")
    with pytest.raises(InputError, match="JSON"):
        io.read_json(path)


def test_chain_string_layout():
    cx = catalog.circle(3)
    assert io.chain_string(cx, 1, {}) == "0"
    s = io.chain_string(cx, 1, {0: 1, 1: -1, 2: 2})
    assert s == "[0,1] - [0,2] + 2*[1,2]"


def test_class_report_carries_its_basis():
    T2 = catalog.torus(3)
    ctx = shared_context(T2)
    z = ctx.homology(1).generators[0]
    rep = io.homology_class_report(ctx, 1, z)
    assert rep["degree"] == 1
    assert rep["coordinates"] == [1, 0]
    assert rep["torsion_coordinates"] == []
    assert len(rep["basis"]) == 2  # H_1(T^2) = Z^2, both generators shown


def test_torsion_generators_are_annotated():
    # no duality context exists for RP^2, but class reports still do
    RP2 = catalog.projective_plane()
    rep = io.group_report(RP2, homology(RP2, 1), {})
    assert rep["coordinates"] == []
    assert rep["torsion_coordinates"] == [0]
    assert "(order 2)" in rep["basis"][0]


def test_coincidence_report_document_shape():
    ex = catalog.torus_pair()
    doc = io.coincidence_report_to_dict(coincidence_report(ex.f, ex.g))
    assert doc["lefschetz"] is None  # dimensions differ
    assert doc["global_class"]["degree"] == 1
    assert doc["verdicts"]["thm_thcoincoin"] is True
    assert doc["verdicts"]["thm_thlefgen"] is True
    (comp,) = doc["components"]
    assert comp["type"] == "pseudo-manifold"
    assert comp["local_class"]["integers"] in ([1], [-1])
    # the document is JSON-clean
    io.dumps(doc)
