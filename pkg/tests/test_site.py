from __future__ import annotations

import pytest
from hypothesis import assume, given, strategies as st

from toposforge._core import InputError
from toposforge.cat import FinCategory, poset_category
from toposforge.corpus import bases, sites
from toposforge.finset import FinFunction, FinSet
from toposforge.sheaf import same_sheaves
from toposforge.site import (
    CoveringFamily,
    CovTree,
    Site,
    all_sieves,
    check_C,
    check_L,
    check_M,
    check_strong_C,
    close_topology,
    cov_trees,
    generate_grothendieck,
    generated_sieve,
    has_small_covers,
    is_collection_site,
    is_collection_span,
    sieve_topology_fixpoint,
    tree_family,
)
from toposforge.smallmap import Explicit, FiberBound

ARROW = poset_category(["0", "1"], [("u", "0", "1")])
CHAIN = poset_category(["0", "1", "2"], [("a", "0", "1"), ("b", "1", "2")])
CORPUS = sites()
BASES = [s.base for s in CORPUS.values()] + [bases()["involution"]]


def identity_site(c: FinCategory) -> Site:
    return Site(c, [CoveringFamily(f"I{C}", C, (("*", c.id(C)),)) for C in c.objects])


def families(s: Site) -> set:
    return {(U.target, U.arrows) for U in s.covers}


@st.composite
def random_sites(draw, max_covers: int = 3, max_family: int = 2):
    c = draw(st.sampled_from(BASES))
    covers = []
    for k in range(draw(st.integers(0, max_covers))):
        C = draw(st.sampled_from(c.objects.elements))
        arrows = draw(st.lists(st.sampled_from(c.arrows_into(C)), max_size=max_family))
        covers.append(CoveringFamily(f"U{k}", C, tuple(enumerate(arrows))))
    return Site(c, covers)


# validation

def test_cover_with_wrong_codomain_is_rejected():
    with pytest.raises(InputError):
        Site(ARROW, [CoveringFamily("U", "0", (("i", "u"),))])


def test_repeated_index_is_rejected():
    with pytest.raises(InputError):
        CoveringFamily("U", "1", (("i", "u"), ("i", "id_1")))


def test_square_commutes_on_the_corpus():
    for s in CORPUS.values():
        phi, m, target, cod = s.square()
        assert cod.after(m) == target.after(phi)


# (C), (M), (L)

@pytest.mark.parametrize("name", sorted(CORPUS))
def test_identity_covers_satisfy_everything(name):
    s = identity_site(CORPUS[name].base)
    assert check_C(s).ok and check_M(s).ok and check_L(s).ok
    strong = check_strong_C(s)
    assert strong.ok
    assert all(V == f"I{s.base.dom[f]}" for (_, f), V in strong.choices.items())


def test_sierpinski_fails_c_and_an_identity_cover_repairs_it():
    s = CORPUS["sierpinski"]
    verdict = check_C(s)
    assert not verdict.ok
    assert verdict.failures == ("no cover of 0 refines U along u",)
    repaired = Site(ARROW, list(s.covers) + [CoveringFamily("V", "0", (("1", "id_0"),))])
    assert check_C(repaired).ok
    assert check_strong_C(repaired).choices[("U", "u")] == "V"


@given(random_sites())
def test_c_implies_strong_c(s):
    assert check_C(s).ok == check_strong_C(s).ok


def test_l_fails_without_the_composite_family():
    s = Site(CHAIN, [CoveringFamily("U", "2", (("b", "b"),)), CoveringFamily("V", "1", (("a", "a"),))])
    verdict = check_L(s)
    assert not verdict.ok
    assert any("U" in w and "V" in w for w in verdict.failures)
    with_composite = Site(CHAIN, list(s.covers) + [CoveringFamily("W", "2", (("ba", CHAIN.compose("b", "a")),))])
    assert check_L(with_composite).ok


def test_m_reports_objects_without_identity_cover():
    verdict = check_M(CORPUS["sierpinski"])
    assert not verdict.ok and len(verdict.failures) == 2


# collection spans

def test_singleton_fibers_give_a_collection_span():
    D = FinSet(["d0", "d1", "d2"])
    g = FinFunction(D, FinSet(["c0", "c1", "c2"]), {"d0": "c0", "d1": "c1", "d2": "c2"})
    h = FinFunction(D, FinSet(["b0", "b1"]), {"d0": "b0", "d1": "b1", "d2": "b0"})
    assert is_collection_span(g, h)


def test_double_cover_of_a_two_element_fiber():
    D = FinSet(["d0", "d1"])
    g = FinFunction(D, FinSet(["c"]), {"d0": "c", "d1": "c"})
    h = FinFunction(D, FinSet(["b0", "b1"]), {"d0": "b0", "d1": "b1"})
    epi = is_collection_span(g, h, lifts="epi")
    assert not epi and epi.counterexample[0] == "c"
    assert max(epi.counterexample[1]) >= 2
    assert is_collection_span(g, h, lifts="any")


@pytest.mark.parametrize("name", sorted(CORPUS))
def test_corpus_sites_are_collection_sites(name):
    assert is_collection_site(CORPUS[name])


def test_excluding_section_lifts_breaks_collection():
    s = Site(ARROW, [CoveringFamily("U", "1", (("p", "u"), ("q", "id_1")))])
    assert is_collection_site(s)
    assert not is_collection_site(s, lifts="epi")


def test_small_covers():
    for s in CORPUS.values():
        assert has_small_covers(s, FiberBound(2))
    big = Site(ARROW, [CoveringFamily("U", "1", ((0, "u"), (1, "u"), (2, "id_1")))])
    assert not has_small_covers(big, FiberBound(2))
    listed = Explicit((FinFunction(FinSet(["i", "j", "k"]), FinSet(["U"]), {"i": "U", "j": "U", "k": "U"}),))
    assert has_small_covers(big, listed)
    assert not has_small_covers(CORPUS["cospan"], listed)


# generation

def test_empty_coverage_generates_identity_covers():
    gen = generate_grothendieck(CORPUS["empty"], 3)
    assert families(gen.site) == {("0", ("id_0",)), ("1", ("id_1",))}
    assert all(T.is_leaf() for ts in gen.registry.values() for T in ts)


def test_sierpinski_unfolding():
    s = CORPUS["sierpinski"]
    for depth in (2, 3):
        gen = generate_grothendieck(s, depth)
        assert families(gen.site) == {("0", ("id_0",)), ("1", ("id_1",)), ("1", ("u",))}
    trees = cov_trees(s, 2)["1"]
    assert [T.label() for T in trees] == ["*", "U[u:*]"]


@pytest.mark.parametrize("name", sorted(CORPUS))
def test_embedded_covers_reproduce_the_original(name):
    s = CORPUS[name]
    for U in s.covers:
        T = CovTree(U.target, U.name, tuple((i, CovTree(s.base.dom[a])) for i, a in U.family))
        assert sorted(a for _, a in tree_family(s, T)) == list(U.arrows)


@given(random_sites(), st.integers(1, 2))
def test_generation_is_monotone_in_depth(s, depth):
    assert families(generate_grothendieck(s, depth).site) <= families(generate_grothendieck(s, depth + 1).site)


@given(random_sites(), st.integers(1, 3))
def test_generation_is_sound(s, depth):
    fix = sieve_topology_fixpoint(s)
    for U in generate_grothendieck(s, depth).site.covers:
        assert generated_sieve(s.base, U.arrows) in fix[U.target]


@given(random_sites(), st.integers(1, 3))
def test_generated_site_has_m(s, depth):
    assert check_M(generate_grothendieck(s, depth).site).ok


@given(random_sites())
def test_saturated_generation_is_a_strong_grothendieck_site(s):
    assume(check_C(s).ok)
    g2 = generate_grothendieck(s, 2).site
    assume(families(g2) == families(generate_grothendieck(s, 3).site))
    assert check_M(g2).ok and check_L(g2).ok and check_strong_C(g2).ok


@given(random_sites(), st.integers(2, 3))
def test_generation_keeps_the_sheaves(s, depth):
    assume(check_C(s).ok)
    assert same_sheaves(s, generate_grothendieck(s, depth).site, 2).equal


@pytest.mark.parametrize("name", sorted(CORPUS))
def test_generation_keeps_collection(name):
    s = CORPUS[name]
    assert is_collection_site(generate_grothendieck(s, 2).site).holds == is_collection_site(s).holds


# sieve oracle

def test_empty_coverage_has_only_maximal_sieves():
    fix = sieve_topology_fixpoint(CORPUS["empty"])
    assert fix == {C: frozenset({frozenset(ARROW.arrows_into(C))}) for C in ARROW.objects}


def test_sierpinski_covering_sieves():
    fix = sieve_topology_fixpoint(CORPUS["sierpinski"])
    assert fix["1"] == {frozenset({"u", "id_1"}), frozenset({"u"})}
    assert fix["0"] == {frozenset({"id_0"})}
    assert len(all_sieves(ARROW, "1")) == 3


@given(random_sites())
def test_closure_is_idempotent(s):
    fix = sieve_topology_fixpoint(s)
    assert close_topology(s.base, fix) == fix
