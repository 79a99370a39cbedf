from __future__ import annotations

import pytest
from hypothesis import given, strategies as st

from toposforge._core import InputError
from toposforge.cat import poset_category
from toposforge.corpus import bases, sites
from toposforge.finset import FinFunction, FinSet, is_cover, pullback as set_pullback
from toposforge.presheaf import PresheafMorphism, constant, nat_transformations, terminal, underlying_map
from toposforge.site import CoveringFamily, Site, is_collection_site
from toposforge.smallmap import (
    AllMaps,
    Explicit,
    FiberBound,
    Predicate,
    PresheafProbe,
    ProbeUniverse,
    SheafProbe,
    UniversalMap,
    check_collection_axiom,
    check_locally_full,
    check_pi_w_closure,
    check_stable,
    collsp_construct,
    equiv_collection_site,
    find_representation,
    induce_presheaf_class,
    induce_sheaf_class,
    synthesize_class,
)

P2 = ProbeUniverse(2)
P3 = ProbeUniverse(3)
ARROW = poset_category(["0", "1"], [("u", "0", "1")])


def fn(table: dict, cod=None) -> FinFunction:
    return FinFunction(FinSet(table), FinSet(cod if cod is not None else table.values()), table)


# probes

def test_probe_contents():
    assert len(P3.objects()) == 8
    assert len(P3.maps()) == sum(len(B.elements) ** len(A.elements) if B or not A else 0
                                 for A in P3.objects() for B in P3.objects())
    for B in P3.objects():
        for g in P3.extended_into(B):
            assert len(g.dom) > 3 and g.max_fiber() <= 3


# stability

@pytest.mark.parametrize("klass", [AllMaps(), FiberBound(2), FiberBound(0)])
def test_stable_classes(klass):
    v = check_stable(klass, P3)
    assert v.passed("S1") and v.passed("S2") and v.passed("S3")
    assert v.probe == P3.name


def test_explicit_class_missing_a_pullback_fails_s1():
    f = fn({"x0": "y", "x1": "y"})
    v = check_stable(Explicit((f,)), P2)
    assert not v.passed("S1")
    assert v.witnesses("S1")
    # a pullback of f along the empty map is the empty map, not on the list
    empty = FinFunction(FinSet(), FinSet(["y"]), {})
    assert set_pullback(f, empty).p2 not in Explicit((f,))


def test_explicit_class_is_iso_invariant():
    k = Explicit((fn({"x0": "y", "x1": "y"}),))
    assert fn({"a": "b", "c": "b"}) in k
    assert fn({"a": "b", "c": "d"}) not in k


# local fullness

def test_all_maps_are_locally_full():
    v = check_locally_full(AllMaps(), P3)
    assert v.s4 and v.s4a and v.s4b and v.split_agrees


def test_fiber_bound_fails_composition_with_square_witness():
    v = check_locally_full(FiberBound(2), P3)
    assert not v.s4 and not v.s4a and v.s4b
    assert v.split_agrees
    assert any("(4,)" in w.witness for w in v.witnesses("S4a"))
    assert any(w.within_probe for w in v.witnesses("S4a"))


@pytest.mark.parametrize("klass", [
    AllMaps(), FiberBound(0), FiberBound(1), FiberBound(2), FiberBound(3),
    Predicate("injective", lambda f: f.is_injective()),
    Predicate("fibers 0 or 2", lambda f: set(f.fiber_sizes()) <= {0, 2}),
])
def test_split_agrees(klass):
    v = check_locally_full(klass, P2)
    assert v.split_agrees in (True, None)
    if v.identities_small and check_stable(klass, P2).passed("S1"):
        assert v.split_applicable


# ΠW-closure

def test_all_maps_are_pi_w_closed():
    v = check_pi_w_closure(AllMaps(), P2)
    assert v.ok


def test_fiber_bound_fails_pi():
    v = check_pi_w_closure(FiberBound(2), P3)
    assert not v.passed("pi")
    assert v.witnesses("pi")


def test_explicit_class_of_probe_maps_is_closed_within_probe():
    k = Explicit(tuple(f for f in P2.maps() if f.max_fiber() <= 2))
    v = check_pi_w_closure(k, P2)
    assert v.passed_within_probe()


# representability

def test_fiber_bound_representation():
    rep = find_representation(FiberBound(2), P3)
    assert rep.ok
    assert len(rep.universal.U) == 3 and len(rep.universal.E) == 3


def test_all_maps_representation():
    rep = find_representation(AllMaps(), P3)
    assert rep.ok
    assert len(rep.universal.U) == 4 and len(rep.universal.E) == 6
    assert rep.witnesses == len(P3.maps())


def test_representation_fails_without_a_fiber_shape():
    rep = find_representation(FiberBound(2), P3, UniversalMap.from_sizes([0, 1]))
    assert not rep.ok and "not in U" in rep.failure


def test_representation_needs_a_small_universal_map():
    k = Explicit((fn({"x0": "y", "x1": "y"}),))
    rep = find_representation(k, P2)
    assert not rep.ok and "not small" in rep.failure


# collection

@pytest.mark.parametrize("klass", [AllMaps(), FiberBound(1), FiberBound(2)])
def test_collection_axiom(klass):
    v = check_collection_axiom(klass, P2)
    assert v.ok and v.counterexample is None
    assert v.collection_map


def test_artificial_class_has_a_collection_counterexample():
    tiny = Predicate("injective on at most one point", lambda f: len(f.dom) <= 1 and f.is_injective())
    v = check_collection_axiom(tiny, P2, lifts="epi")
    assert not v.ok and v.counterexample


def test_synthesized_class_contains_its_maps_and_satisfies_collection():
    maps = [fn({"a": "p", "b": "p"}), fn({"c": "q"})]
    k = synthesize_class(maps)
    assert k == FiberBound(2)
    assert all(f in k for f in maps)
    assert check_collection_axiom(k, P2).ok


# collection spans

def test_collsp_singleton():
    pi = find_representation(FiberBound(2), P3).universal
    data = collsp_construct(fn({"b": "a"}), FiberBound(2), pi)
    assert len(data.C) == 2 and data.ok


def test_collsp_empty_fiber():
    pi = find_representation(FiberBound(2), P3).universal
    f = FinFunction(FinSet(), FinSet(["a"]), {})
    data = collsp_construct(f, FiberBound(2), pi)
    assert data.C.elements == (("a", 0, ()),)
    assert data.ok


def test_collsp_requires_a_small_map():
    pi = find_representation(FiberBound(1), P2).universal
    with pytest.raises(InputError):
        collsp_construct(fn({"x": "y", "z": "y"}), FiberBound(1), pi)


def test_collsp_verifies_on_every_small_probe_map():
    pi = find_representation(FiberBound(2), P3).universal
    for f in P3.maps():
        if f in FiberBound(2):
            assert collsp_construct(f, FiberBound(2), pi).ok


@given(st.sampled_from([f for f in P3.maps() if f.max_fiber() <= 2]))
def test_collsp_bottom_is_a_cover(f):
    pi = find_representation(FiberBound(2), P3).universal
    data = collsp_construct(f, FiberBound(2), pi)
    assert is_cover(data.bottom)
    assert data.g.max_fiber() <= 2


# equivalent collection sites

@pytest.mark.parametrize("name", sorted(sites()))
def test_equivalent_collection_site(name):
    s = sites()[name]
    pi = find_representation(FiberBound(2), P3).universal
    eq = equiv_collection_site(s, FiberBound(2), pi)
    assert eq.collection_site and eq.small_covers and eq.same_sheaves


def test_identity_site_gives_singleton_covers():
    s = Site(ARROW, [CoveringFamily(f"I{C}", C, (("*", ARROW.id(C)),)) for C in ARROW.objects])
    pi = find_representation(FiberBound(2), P3).universal
    eq = equiv_collection_site(s, FiberBound(2), pi)
    assert all(set(U.arrows) == {ARROW.id(U.target)} for U in eq.site.covers)
    assert {U.target for U in eq.site.covers} == {"0", "1"}
    assert eq.same_sheaves


def test_sierpinski_cover_repeats_u():
    pi = find_representation(FiberBound(2), P3).universal
    eq = equiv_collection_site(sites()["sierpinski"], FiberBound(2), pi)
    assert {U.arrows for U in eq.site.covers} == {("u",), ("u", "u")}
    assert is_collection_site(eq.site)


def test_equivalent_site_needs_small_covers():
    pi = find_representation(FiberBound(1), P2).universal
    with pytest.raises(InputError):
        equiv_collection_site(sites()["cospan"], FiberBound(1), pi)


# induced classes

def test_induced_all_maps_contains_everything():
    k = induce_presheaf_class(AllMaps(), ARROW)
    P = constant(ARROW, ["a", "b"])
    assert all(f in k for f in nat_transformations(P, P))
    assert not k.warnings


def test_induced_fiber_bound_excludes_large_fibers():
    k = induce_presheaf_class(FiberBound(2), ARROW)
    P = constant(ARROW, ["a", "b", "c"])
    f = PresheafMorphism(P, terminal(ARROW), {C: {x: "*" for x in "abc"} for C in ARROW.objects})
    assert underlying_map(f).max_fiber() == 3
    assert f not in k
    g = PresheafMorphism(constant(ARROW, ["a"]), terminal(ARROW), {C: {"a": "*"} for C in ARROW.objects})
    assert g in k


def test_induced_class_warns_when_cod_is_not_small():
    k = induce_presheaf_class(FiberBound(1), ARROW)
    assert k.warnings and "cod" in k.warnings[0]
    assert not induce_presheaf_class(FiberBound(2), ARROW).warnings


@pytest.mark.parametrize("base", ["arrow", "idempotent", "discrete2"])
def test_induced_presheaf_class_is_stable(base):
    c = bases()[base]
    probe = PresheafProbe(c, 2)
    k = induce_presheaf_class(AllMaps(), c)
    assert check_stable(k, probe).ok
    assert check_locally_full(k, probe).ok


def test_induced_sheaf_class_is_stable():
    s = sites()["sierpinski"]
    probe = SheafProbe(s, 2)
    k = induce_sheaf_class(AllMaps(), s)
    assert check_stable(k, probe).ok
    assert all(probe.size(X) <= 2 * len(s.base.objects) for X in probe.objects())
