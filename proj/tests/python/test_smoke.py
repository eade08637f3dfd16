import json
import pathlib

import pytest

import modalnet

DATA = pathlib.Path(__file__).resolve().parent.parent / "data"


def load(name):
    return json.loads((DATA / name).read_text())


def test_formula_objects():
    f = modalnet.Formula("<>{>1/2} (P | Q)")
    assert f.modal_depth == 1
    assert f.atoms == ["P", "Q"]
    assert f.fragments()["rml"]
    assert not f.fragments()["gml"]
    assert modalnet.Formula(str(f)) == f
    with pytest.raises(modalnet.FormulaSyntaxError):
        modalnet.Formula("P & & Q")


def test_check_fixture():
    a = load("A.json")
    # vertices a, b, c
    assert modalnet.check("<>P", a) == [True, False, False]
    assert modalnet.check("[]Q", a) == [True, True, True]


def test_compile_rml_weights():
    net = modalnet.compile("<>{>1/2} P", "rml", bound=2)
    assert len(net["layers"]) == 2
    assert all(layer["agg"] == "mean" for layer in net["layers"])
    assert net["layers"][0]["A"][0][1] == "4"


def test_compiled_net_classifies_like_formula():
    a = load("A.json")
    for text, logic in [("<>P & []Q", "ml"), ("<>{>=2} Q", "gml"), ("<>P & <>Q", "afml")]:
        net = modalnet.compile(text, logic, alphabet=["P", "Q"])
        assert modalnet.classify(net, a) == modalnet.check(text, a)


def test_verify_and_counterexample():
    net = modalnet.compile("<>P", "ml")
    ok = modalnet.verify(modalnet.Formula("<>P"), net, ["P"], max_size=2)
    assert ok["status"] == "equivalent"
    bad = modalnet.verify("<>P", "[]P", ["P"], max_size=2)
    assert bad["status"] == "counterexample"
    assert "counterexample" in bad


def test_games_on_fixtures():
    a, b1 = load("A.json"), load("B1.json")
    assert modalnet.solve_game("afml1", 3, a, b1)["winner"] == "Duplicator"
    r = modalnet.solve_game("ml", 1, a, b1)
    assert r["winner"] == "Spoiler"
    f = r["formula"]
    assert modalnet.check(f, a)[0] != modalnet.check(f, b1)[0]


def test_extract_round_trip():
    net = modalnet.compile("<>{>=2} P", "gml")
    psi = modalnet.extract(net, "gml", bound=2)
    assert modalnet.verify(psi, "<>{>=2} P", ["P"], max_size=2)["status"] == "equivalent"


def test_transforms():
    a = load("A.json")
    s = modalnet.scale(a, 2)
    assert len(s["vertices"]) == 6
    t = modalnet.unravel(a, 1)
    assert len(t["vertices"]) == 3
