import json
import os
from fractions import Fraction as Fr

import pytest

from tropivor import cli, oracle, point
from tropivor.errors import ParseError

HERE = os.path.dirname(__file__)
INPUTS = os.path.join(HERE, os.pardir, "inputs")


def inp(name):
    return os.path.join(INPUTS, name + ".json")


def run(tmp_path, *argv, name="out.json"):
    out = tmp_path / name
    code = cli.main([*argv, "-o", str(out)])
    return code, (json.loads(out.read_text()) if out.exists() else None)


def error_of(capsys):
    return json.loads(capsys.readouterr().err)["error"]


# ---------------------------------------------------------------- documents


def test_input_document_round_trip():
    text = open(inp("five_sites")).read()
    doc = cli.parse_document(text)
    assert doc.dimension == 2 and len(doc.sites) == 5 and doc.seed == 1
    assert doc.flags == {"allow_degenerate": True}
    again = cli.parse_document(cli.dumps(doc.to_json()))
    assert again == doc and again.to_json() == doc.to_json()
    doc = cli.parse_document('{"dimension": 2, "sites": [["0", "-7/3", "5"]]}')
    assert doc.sites[0] == point(0, Fr(-7, 3), 5)


@pytest.mark.parametrize("text", [
    "not json",
    '{"schema": "other/9", "dimension": 2, "sites": [["0","0","0"]]}',
    '{"dimension": 2, "sites": [["0","0"]]}',
    '{"dimension": 2, "sites": []}',
    '{"dimension": true, "sites": [["0","0"]]}',
    '{"dimension": 2, "sites": [["0","0","x"]]}',
    '{"dimension": 2, "sites": [["0","0","0"]], "seed": "s"}',
])
def test_malformed_documents(text):
    with pytest.raises(ParseError):
        cli.parse_document(text)


def test_output_round_trip(tmp_path):
    code, out = run(tmp_path, "bisector", "-i", inp("two_sites"))
    assert code == 0
    assert json.loads(cli.dumps(out)) == out


# ---------------------------------------------------------------- subcommands


def test_bisector_two_sites(tmp_path):
    code, out = run(tmp_path, "bisector", "-i", inp("two_sites"))
    assert code == 0 and out["schema"] == "tropivor/1" and out["kind"] == "bisector"
    assert len(out["cells"]) == 5 and not out["empty"]
    assert all(isinstance(c, str) for cell in out["cells"] for v in cell.get("vertices", []) for c in v)


def test_bisector_empty(tmp_path):
    code, out = run(tmp_path, "bisector", "-i", inp("empty_bisector"))
    assert code == 0 and out["empty"] and out["cells"] == []


def test_bisector_bad_rational(tmp_path, capsys):
    code, out = run(tmp_path, "bisector", "-i", inp("bad_rational"))
    assert code == 2 and out is None
    assert error_of(capsys)["kind"] == "parse"


def test_bisector_sites_option(tmp_path):
    code, out = run(tmp_path, "bisector", "-i", inp("three_sites_d3"), "--sites", "0,1")
    assert code == 0 and len(out["sites"]) == 2 and out["cells"]
    code, _ = run(tmp_path, "bisector", "-i", inp("three_sites_d3"), "--sites", "0,9")
    assert code == 3


def test_classify_vector(tmp_path):
    code, out = run(tmp_path, "classify", "--vector", "3,1,6,4,6,3,1")
    assert code == 0
    bop = out["bop"]
    assert bop["parts"] == [[2, 7], [1, 6], [4], [3, 5]]
    code, _ = run(tmp_path, "classify", "--vector", "2,2,2")
    assert code == 3
    code, _ = run(tmp_path, "classify", "--vector", "1")
    assert code == 2


def test_classify_input(tmp_path):
    code, out = run(tmp_path, "classify", "-i", inp("three_sites_d3"))
    assert code == 0 and [p["pair"] for p in out["pairs"]] == [[0, 1], [0, 2], [1, 2]]


def test_circumcenters(tmp_path):
    code, out = run(tmp_path, "circumcenters", "-i", inp("two_circumcenters"))
    assert code == 0 and out["oracle_agrees"]
    assert sorted(map(tuple, out["points"])) == [("0", "0", "-1", "1"), ("0", "0", "1", "-1")]
    assert out["radii"] == ["4", "4"]


def test_genpos(tmp_path):
    code, out = run(tmp_path, "genpos", "-i", inp("two_circumcenters"))
    assert code == 0 and out["weak"] is False and out["general"] is False
    assert out["witness"]["common_planes"] == ["x_3 = x_4"]
    code, out = run(tmp_path, "genpos", "-i", inp("three_sites_d3"))
    assert code == 0 and out["weak"] is True


@pytest.mark.parametrize("algorithm", ["standard", "incremental", "sweep"])
def test_voronoi_figure_all_algorithms(tmp_path, algorithm):
    code, out = run(tmp_path, "voronoi", "-i", inp("five_sites"), "-a", algorithm)
    assert code == 0 and out["algorithm"] == algorithm
    code, out = run(tmp_path, "verify", "-i", inp("five_sites"), "-a", algorithm, "--samples", "2000")
    assert code == 0 and out["report"]["passed"] and out["report"]["violations"] == []


def test_voronoi_figure_algorithms_classify_identically():
    doc = cli.load_document(inp("five_sites"))
    S = doc.site_set()
    Ds = [cli.build_diagram(S, a, 1, True) for a in cli.ALGORITHMS]
    for x in oracle.sample_points(2, oracle.SampleConfig(seed=5, count=3000), center=oracle._centroid(S)):
        owners = oracle.nearest_sites(x, S)[1]
        claims = [D.locate(x) for D in Ds]
        assert all(c in owners for c in claims)
        if len(owners) == 1:
            assert len(set(claims)) == 1


def test_sweep_rejects_d3(tmp_path, capsys):
    code, _ = run(tmp_path, "voronoi", "-i", inp("three_sites_d3"), "-a", "sweep")
    assert code == 3
    assert error_of(capsys)["kind"] == "precondition"


def test_degenerate_input_needs_override(tmp_path, capsys):
    doc = cli.load_document(inp("five_sites"))
    doc.flags = {}
    src = tmp_path / "fig.json"
    src.write_text(cli.dumps(doc.to_json()))
    code, _ = run(tmp_path, "voronoi", "-i", str(src))
    assert code == 3
    capsys.readouterr()
    code, _ = run(tmp_path, "voronoi", "-i", str(src), "--allow-degenerate")
    assert code == 0


def test_verify_exit_codes(tmp_path, monkeypatch):
    code, _ = run(tmp_path, "verify", "-i", inp("five_sites"), "-a", "all")
    assert code == 2

    class Liar:
        def locate(self, x):
            return 0

    monkeypatch.setattr(cli, "build_diagram", lambda *a: Liar())
    code, out = run(tmp_path, "verify", "-i", inp("five_sites"), "--samples", "200")
    assert code == 4 and out["report"]["violations"]


def test_missing_input(tmp_path):
    assert run(tmp_path, "voronoi")[0] == 2
    assert run(tmp_path, "voronoi", "-i", str(tmp_path / "nope.json"))[0] == 2


def test_determinism(tmp_path):
    for argv in (["voronoi", "-i", inp("five_sites"), "-a", "incremental", "--seed", "3"],
                 ["verify", "-i", inp("five_sites"), "-a", "sweep", "--samples", "300"],
                 ["bisector", "-i", inp("three_sites_d3")]):
        run(tmp_path, *argv, name="a.json")
        run(tmp_path, *argv, name="b.json")
        assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()


def test_parallel_matches_sequential(tmp_path):
    argv = ["verify", "-i", inp("five_sites"), "--samples", "400"]
    run(tmp_path, *argv, name="a.json")
    run(tmp_path, *argv, "--parallel", name="b.json")
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()


def test_bench_small(tmp_path):
    code, out = run(tmp_path, "bench", "--dimension", "2", "--sizes", "3,4", "-a", "all")
    assert code == 0
    algos = {r["algorithm"] for r in out["results"]}
    assert algos == {"standard", "incremental", "sweep"}
    inc = [r for r in out["results"] if r["algorithm"] == "incremental" and "n" in r]
    assert all(r["mean_depth"] <= r["depth_bound"] for r in inc)
    assert run(tmp_path, "bench", "--sizes", "a,b")[0] == 2


# ---------------------------------------------------------------- svg


def _svg_ok(text):
    import xml.etree.ElementTree as ET

    root = ET.fromstring(text)
    assert root.tag.endswith("svg")
    return root


def test_voronoi_svg(tmp_path):
    svg = tmp_path / "d.svg"
    code, _ = run(tmp_path, "voronoi", "-i", inp("five_sites"), "--svg", str(svg))
    assert code == 0
    root = _svg_ok(svg.read_text())
    assert len([e for e in root.iter() if e.tag.endswith("circle")]) == 5


def test_render_bisector_to_stdout(capsys):
    assert cli.main(["render", "-i", inp("two_sites"), "--bisector"]) == 0
    _svg_ok(capsys.readouterr().out)


def test_render_rejects_d3(tmp_path):
    assert run(tmp_path, "render", "-i", inp("three_sites_d3"))[0] == 3
