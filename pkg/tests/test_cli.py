from __future__ import annotations

import io
import json
import subprocess
import sys

import pytest

from toposforge.cli import (
    Bundle,
    builtin_bundle,
    category_doc,
    class_doc,
    dumps,
    function_doc,
    main,
    morphism_doc,
    presheaf_doc,
    site_doc,
)


def run(argv: list[str]) -> tuple[int, str, str]:
    out, err = io.StringIO(), io.StringIO()
    code = main(argv, out=out, err=err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture(scope="module")
def corpus(tmp_path_factory) -> str:
    path = tmp_path_factory.mktemp("docs") / "corpus.json"
    code, text, _ = run(["corpus"])
    assert code == 0
    path.write_text(text, encoding="utf-8")
    return str(path)


def write(tmp_path, name: str, doc) -> str:
    p = tmp_path / name
    p.write_text(json.dumps(doc), encoding="utf-8")
    return str(p)


def report(argv: list[str]) -> tuple[int, dict]:
    code, text, err = run(["--format", "json", "--no-timing", *argv])
    assert text, err
    return code, json.loads(text)


# round trip

def _reserialize(b: Bundle, name: str) -> dict:
    doc = b.docs[name]
    kind = doc["kind"]
    obj = b.get(name, kind)
    if kind == "category":
        return category_doc(obj)
    if kind == "presheaf":
        return presheaf_doc(obj, doc["category"])
    if kind == "presheaf_morphism":
        return morphism_doc(obj, doc["dom"], doc["cod"])
    if kind == "site":
        return site_doc(obj, doc["category"])
    if kind == "function":
        return function_doc(obj)
    return class_doc(obj)


def test_documents_round_trip_byte_identically():
    items = builtin_bundle()["items"]
    b = Bundle()
    b.add("corpus", builtin_bundle(), "corpus")
    for name, doc in items.items():
        assert dumps(_reserialize(b, name)) == dumps(doc), name


def test_dumps_is_canonical():
    text = dumps({"b": 1, "a": [1, 2]})
    assert text == '{\n  "a": [\n    1,\n    2\n  ],\n  "b": 1\n}\n'


# exit codes

def test_validate_corpus(corpus):
    code, rep = report(["validate", corpus])
    assert code == 0 and rep["ok"]
    assert rep["inputs"][0]["path"] == "corpus.json"
    assert "timing" not in rep


def test_json_output_is_deterministic(corpus):
    argv = ["--format", "json", "--no-timing", "gen-site", corpus, "--site", "site_sierpinski", "--depth", "2"]
    assert run(argv)[1] == run(argv)[1]


def test_timing_is_reported_by_default(corpus):
    code, text, _ = run(["--format", "json", "validate", corpus])
    assert "seconds" in json.loads(text)["timing"]


def test_failed_check_exits_one_with_witnesses(corpus):
    code, rep = report(["check-sheaf", corpus, "--site", "site_sierpinski", "--presheaf", "P_nonsep"])
    assert code == 1 and not rep["ok"]
    assert rep["witnesses"]
    assert "p" in json.dumps(rep["witnesses"]) and "q" in json.dumps(rep["witnesses"])


def test_sheafify(corpus):
    code, rep = report(["sheafify", corpus, "--site", "site_sierpinski", "--presheaf", "P_nonsep"])
    assert code == 0
    assert rep["result"]["sizes"] == {"0": 1, "1": 1}


def test_same_sheaves_with_generated_site(corpus):
    code, rep = report(["same-sheaves", corpus, "--site", "site_cospan", "--generated", "3"])
    assert code == 0 and rep["bounds"]["max_size"] == 2


def test_wtype_counts(corpus):
    code, rep = report(["wtype", corpus, "--map", "nno", "--depth", "5"])
    assert code == 0
    assert rep["result"]["counts"] == rep["result"]["kleene_counts"] == [1, 2, 3, 4, 5]


def test_check_class_fails_for_fiber_bound(corpus):
    code, rep = report(["check-class", corpus, "--class", "fiber_bound_2", "--probe", "2"])
    assert code == 1
    code, rep = report(["check-class", corpus, "--class", "all_maps", "--probe", "2"])
    assert code == 0


def test_collsp(corpus):
    code, rep = report(["collsp", corpus, "--map", "two_to_one", "--class", "fiber_bound_2"])
    assert code == 0


def test_equiv_coll_site(corpus):
    code, rep = report(["equiv-coll-site", corpus, "--site", "site_cospan", "--class", "fiber_bound_2"])
    assert code == 0


def test_unresolved_reference_is_located(tmp_path):
    path = write(tmp_path, "bad.json", {"kind": "presheaf", "category": "nope", "values": {}})
    code, out, err = run(["validate", path])
    assert code == 2 and not out
    assert "bad.json.category" in err and "nope" in err


def test_category_violations(tmp_path):
    doc = {"kind": "category", "objects": ["*"], "arrows": [{"name": "e", "dom": "*", "cod": "*"}],
           "compose": []}
    path = write(tmp_path, "cat.json", doc)
    code, rep = report(["validate", path])
    assert code == 1
    assert rep["result"]["cat"]["violations"] == ["composite e ∘ e missing"]
    site = {"kind": "site", "category": "cat", "covers": []}
    code, _, err = run(["gen-site", path, write(tmp_path, "s.json", site)])
    assert code == 2 and "cat.json" in err


def test_wrong_field_type_is_located(tmp_path):
    doc = {"kind": "map_class", "class": "fiber_bound", "bound": "two"}
    code, _, err = run(["validate", write(tmp_path, "k.json", doc)])
    assert code == 2 and "k.json.bound" in err


def test_malformed_json_exits_two(tmp_path):
    p = tmp_path / "broken.json"
    p.write_text("{", encoding="utf-8")
    code, _, err = run(["validate", str(p)])
    assert code == 2 and "broken.json" in err


def test_ambiguous_choice_exits_two(corpus):
    code, _, err = run(["check-sheaf", corpus])
    assert code == 2 and "choose a site" in err


def test_bad_depth_exits_two(corpus):
    code, _, err = run(["wtype", corpus, "--map", "nno", "--depth", "0"])
    assert code == 2 and "--depth" in err


def test_module_entry_point(corpus):
    proc = subprocess.run([sys.executable, "-m", "toposforge", "--no-timing", "validate", corpus],
                          capture_output=True, text=True)
    assert proc.returncode == 0
