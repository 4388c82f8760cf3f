"""The command line: exit codes, determinism, file-driven workflows."""

import json
from pathlib import Path

import pytest

from plcoin import catalog, io
from plcoin.cli import _verdict_exit, generate_example, main
from plcoin.complexes import SimplicialMap


@pytest.fixture()
def pair_files(tmp_path):
    paths = generate_example("circle_pair", out_dir=tmp_path, a=1, b=2)
    return [str(p) for p in paths]


def test_examples_list(capsys):
    assert main(["examples", "--list"]) == 0
    out = capsys.readouterr().out
    for name in ("circle", "torus_pair", "torus_triple", "winding_pair"):
        assert name in out


def test_unknown_example_is_a_usage_error(capsys):
    assert main(["examples", "no_such_thing"]) == 2
    assert "known:" in capsys.readouterr().err


def test_homology_text_and_json(tmp_path, capsys):
    main(["examples", "torus", "n=3", "--out", str(tmp_path)])
    capsys.readouterr()
    assert main(["homology", str(tmp_path / "T2.json")]) == 0
    text = capsys.readouterr().out
    assert "H_1 = Z + Z" in text
    assert main(["homology", str(tmp_path / "T2.json"), "--json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    ranks = [g["rank"] for g in doc["groups"]]
    assert ranks == [1, 2, 1]


def test_out_writes_the_json_report(tmp_path, capsys):
    main(["examples", "circle", "n=6", "--out", str(tmp_path)])
    report = tmp_path / "h.json"
    assert main(["homology", str(tmp_path / "C6.json"),
                 "--out", str(report)]) == 0
    capsys.readouterr()
    doc = json.loads(report.read_text())
    assert doc["groups"][1]["description"] == "Z"


def test_parse_error_exits_2(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{nope", encoding="utf-8")
    assert main(["homology", str(bad)]) == 2
    assert "error:" in capsys.readouterr().err


def test_precondition_exits_3(tmp_path, capsys):
    main(["examples", "projective_plane", "--out", str(tmp_path)])
    cls = tmp_path / "cls.json"
    cls.write_text('{"degree": 1, "coordinates": []}\n', encoding="utf-8")
    capsys.readouterr()
    assert main(["dualize", str(tmp_path / "RP2.json"), str(cls)]) == 3
    assert "orientable" in capsys.readouterr().err


def test_unrealized_codomain_exits_3(tmp_path, capsys):
    T2 = catalog.torus(3)
    io.write_complex(T2, tmp_path / "T2.json")
    ident = SimplicialMap(T2, T2, {v: v for v in T2.verts})
    io.write_map(ident, tmp_path / "id.json")
    code = main(["coincidence", str(tmp_path / "T2.json"),
                 str(tmp_path / "id.json"), str(tmp_path / "id.json")])
    assert code == 3
    assert "atlas" in capsys.readouterr().err


def test_lefschetz_with_breakdown(pair_files, capsys):
    assert main(["lefschetz", *pair_files]) == 0
    out = capsys.readouterr().out
    assert "Lef(f, g) = 1" in out
    assert "isolated" in out


def test_coincidence_report_from_files(pair_files, capsys):
    assert main(["coincidence", *pair_files, "--json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["lefschetz"] == "1"
    assert doc["verdicts"] == {
        "thm_lefcpf": True,
        "thm_thcoincoin": True,
        "thm_thlefgen": True,
    }


def test_dualize_fundamental_cocycle(tmp_path, capsys):
    main(["examples", "circle", "n=6", "--out", str(tmp_path)])
    cls = tmp_path / "cls.json"
    cls.write_text('{"degree": 0, "coordinates": [1]}\n', encoding="utf-8")
    capsys.readouterr()
    assert main(["dualize", str(tmp_path / "C6.json"), str(cls),
                 "--json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    # the unit 0-cochain dualizes to the fundamental class
    assert doc["dual"]["degree"] == 1
    assert doc["dual"]["coordinates"] == [1]


def test_verdict_exit_mapping():
    assert _verdict_exit({"a": True, "b": None}) == 0
    assert _verdict_exit({"a": True, "b": False}) == 1


@pytest.mark.parametrize("name", sorted([
    "circle", "tetra_sphere", "octa_sphere", "torus", "projective_plane",
    "circle_cross_sphere", "circle_map", "circle_pair", "sphere_pair",
    "antipodal_pair", "winding_pair", "torus_pair", "torus_triple",
]))
def test_every_example_regenerates_bit_identically(name, tmp_path):
    first = generate_example(name, out_dir=tmp_path / "a")
    second = generate_example(name, out_dir=tmp_path / "b")
    assert [Path(p).name for p in first] == [Path(p).name for p in second]
    for a, b in zip(first, second):
        assert Path(a).read_bytes() == Path(b).read_bytes()
    for a in first:
        doc = json.loads(Path(a).read_text())
        if "vertex_map" not in doc:
            # parse(generate(x)) is structurally the generated object
            assert io.complex_to_dict(io.complex_from_dict(doc)) == doc


def test_verify_is_deterministic_and_green(tmp_path, capsys):
    # the expensive invariant: two full runs, byte for byte
    r1, r2 = tmp_path / "v1.json", tmp_path / "v2.json"
    assert main(["verify", "--out", str(r1)]) == 0
    assert main(["verify", "--out", str(r2)]) == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out
    assert r1.read_bytes() == r2.read_bytes()
    doc = json.loads(r1.read_text())
    assert doc["ok"] is True
    assert len(doc["cases"]) == 16
