from __future__ import annotations

import itertools

import pytest
from hypothesis import given, strategies as st

from toposforge._core import InputError
from toposforge.cat import CatPresentation, FinCategory, compile_presentation, poset_category, validate_category


def test_one_object_category_is_valid():
    c = FinCategory(["*"])
    assert validate_category(c).ok
    assert c.arrows.elements == ("id_*",)


def test_wrong_codomain_of_composite_is_named():
    c = FinCategory(["0", "1"], [("u", "0", "1"), ("v", "1", "1")], [("v", "u", "id_1"), ("v", "v", "v")],
                    check=False)
    violations = validate_category(c).violations
    assert any("wrong dom/cod" in v for v in violations)


def test_missing_composite_is_named():
    c = FinCategory(["*"], [("e", "*", "*")], [], check=False)
    assert any("missing" in v for v in validate_category(c).violations)


def test_invalid_table_is_rejected_on_construction():
    with pytest.raises(InputError):
        FinCategory(["*"], [("e", "*", "*")], [])


def test_poset_arrow_category():
    c = poset_category(["0", "1"], [("u", "0", "1")])
    assert validate_category(c).ok
    assert len(c.arrows) == 3
    assert c.hom("0", "1") == ("u",)


def test_presentation_of_a_poset_arrow():
    c = compile_presentation(CatPresentation(("0", "1"), (("u", "0", "1"),)), budget=10)
    assert len(c.arrows) == 3


def test_idempotent_monoid_has_two_arrows():
    p = CatPresentation(("*",), (("e", "*", "*"),), ((("e", "e"), ("e",)),))
    c = compile_presentation(p, budget=10)
    assert len(c.arrows) == 2
    assert c.compose("e", "e") == "e"


def test_free_loop_exhausts_budget():
    with pytest.raises(InputError, match="not finite within budget"):
        compile_presentation(CatPresentation(("*",), (("s", "*", "*"),)), budget=20)


def test_involution_monoid():
    p = CatPresentation(("*",), (("s", "*", "*"),), ((("s", "s"), ("id_*",)),))
    c = compile_presentation(p, budget=10)
    assert len(c.arrows) == 2
    assert c.compose("s", "s") == "id_*"


def test_chain_composites_are_thin():
    c = poset_category(["0", "1", "2"], [("a", "0", "1"), ("b", "1", "2")])
    assert len(c.hom("0", "2")) == 1
    assert c.compose("b", "a") == c.hom("0", "2")[0]


def test_cod_map_fibers_count_arrows_into_each_object():
    c = poset_category(["0", "1"], [("u", "0", "1")])
    assert {C: len(c.cod_map().fiber(C)) for C in c.objects} == {"0": 1, "1": 2}


monoid_presentations = st.sampled_from([
    (("e", "e"), ("e",)),
    (("e", "e"), ("id_*",)),
    (("e", "e", "e"), ("e",)),
    (("e", "e", "e"), ("id_*",)),
    (("e", "e", "e"), ("e", "e")),
])


@given(monoid_presentations)
def test_compiled_presentations_are_valid(rel):
    c = compile_presentation(CatPresentation(("*",), (("e", "*", "*"),), (rel,)), budget=50)
    assert validate_category(c).ok


@given(st.integers(1, 4))
def test_linear_orders_compile_to_thin_categories(n):
    objs = [str(i) for i in range(n)]
    c = poset_category(objs, [(f"g{i}", objs[i], objs[i + 1]) for i in range(n - 1)])
    assert validate_category(c).ok
    assert len(c.arrows) == n * (n + 1) // 2


@given(monoid_presentations)
def test_opposite_is_an_involution(rel):
    p = CatPresentation(("*",), (("e", "*", "*"),), (rel,))
    assert p.op().op() == p
    c = compile_presentation(p, budget=50)
    cc = c.op().op()
    assert cc == c


def test_opposite_reverses_arrows():
    c = poset_category(["0", "1"], [("u", "0", "1")])
    assert c.op().dom["u"] == "1" and c.op().cod["u"] == "0"
