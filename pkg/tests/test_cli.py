import io
import json
import subprocess
import sys
import xml.etree.ElementTree as ET

import pytest

from hirzebruch_hms import HirzebruchModel, hom_space
from hirzebruch_hms import export
from hirzebruch_hms.cli import main


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


def test_polytope_table_and_svg(tmp_path):
    path = tmp_path / "p.svg"
    code, text = run("polytope", "--k", "2", "--out", str(path))
    assert code == 0 and "V2  (6, 0)" in text
    root = ET.parse(path).getroot()
    assert root.get("width") == str(6 * 80 + 80)
    labels = sorted(el.text for el in root.iter() if el.tag.endswith("text"))
    assert labels == ["E1", "E2", "E3", "E4"]


def test_invalid_k_is_usage_error():
    with pytest.raises(SystemExit) as info:
        run("polytope", "--k", "0")
    assert info.value.code == 2


def test_hom_table_nonminimal():
    code, text = run("hom", "--k", "2", "--a", "-7", "--b", "3")
    assert code == 0
    assert "rejected: vertex" in text
    assert "4.088469732" in text and "5.435339792" in text


def test_hom_counts_lattice():
    _, text = run("hom", "--k", "1", "--a", "1", "--b", "1")
    assert "degree counts: {0: 5}" in text


def test_hom_empty_with_reason():
    _, text = run("hom", "--k", "1", "--a", "-1", "--b", "0")
    assert "no admissible generators" in text
    assert text.count("rejected: M2") == 2 and "E1" in text and "E3" in text


def test_structured_round_trip():
    _, text = run("hom", "--k", "2", "--a", "-7", "--b", "3", "--format", "structured")
    doc = export.loads(text)
    assert export.dumps(doc) == text
    gens = doc["generators"][0]["generators"]
    x = sorted(g["points"][0][0] for g in gens if g["index"] == [0, 0])
    assert x == [4.088469732203287, 5.435339791606236]


def test_structured_export_is_deterministic():
    a = run("compose", "--k", "2", "--c", "1", "--format", "structured")[1]
    b = run("compose", "--k", "2", "--c", "1", "--format", "structured")[1]
    assert a == b
    rows = json.loads(a)["m2"]
    assert rows and all(abs(r["coefficient"] - r["product"]) < 1e-8 for r in rows)


def test_export_floats_are_lossless():
    model = HirzebruchModel(3, 0.7, 1.3)
    hom = hom_space(model, (0, 0), (2, 1))
    doc = export.category_export(model, homs=[hom])
    back = export.loads(export.dumps(doc))
    assert back == json.loads(json.dumps(doc))
    assert back["generators"][0]["generators"][1]["points"] == [list(map(float, p)) for p in hom.generators[1].geometry.points]


@pytest.mark.parametrize("k, c", [(1, 1), (2, 0), (3, 2)])
def test_verify_exit_code(k, c):
    code, text = run("verify", "--k", str(k), "--c", str(c))
    assert code == 0 and text.strip().endswith("PASS")


def test_verify_failure_exit(monkeypatch, capsys):
    import hirzebruch_hms.verify as verify

    real = verify.product_coefficient
    monkeypatch.setattr(verify, "product_coefficient", lambda *a: real(*a) * (1 - 1e-6))
    code, text = run("verify", "--k", "1", "--c", "1")
    assert code == 1 and text.strip().endswith("FAIL")
    assert "first failure: coefficient" in capsys.readouterr().err


def test_flow_svg(tmp_path):
    path = tmp_path / "f.svg"
    code, text = run("flow", "--k", "2", "--a", "-7", "--b", "3", "--out", str(path))
    assert code == 0
    root = ET.parse(path).getroot()
    tags = [el.tag.split("}")[-1] for el in root.iter()]
    assert tags.count("polyline") >= 1 and tags.count("line") > 20
    circles = [el for el in root.iter() if el.tag.endswith("circle") and el.get("r") == "4"]
    assert sorted(el.get("fill") for el in circles) == ["black", "white"]


def test_flow_zero_field_and_empty_overlay(tmp_path):
    code, _ = run("flow", "--k", "1", "--a", "0", "--b", "0", "--out", str(tmp_path / "z.svg"))
    assert code == 0
    code, text = run("flow", "--k", "1", "--a", "1", "--b", "1", "--i1", "9", "--out", str(tmp_path / "e.svg"))
    assert code == 0 and (tmp_path / "e.svg").exists()


def test_demo_command():
    code, text = run("demo-nonminimal")
    assert code == 0 and "PASS" in text


def test_unwritable_output():
    with pytest.raises(SystemExit) as info:
        run("polytope", "--k", "1", "--out", "/nonexistent-dir/p.svg")
    assert "/nonexistent-dir/p.svg" in str(info.value.code)


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "hirzebruch_hms", "polytope", "--k", "1"],
        capture_output=True,
        text=True,
        check=True,
    )
    assert "V2  (4, 0)" in proc.stdout
