"""W-types of polynomial functors on presheaves.

For ``f: B -> A`` a morphism of presheaves, a term is a :class:`WTree` whose
head is an element ``(a, C)`` of ``|A|`` and whose children are indexed by the
fiber of the induced base map ``g`` over that head, i.e. by elements
``((a, C), ((β, b), D))`` with ``(β, b) ∈ B_a(D)``.  The presheaf W-type
consists of the natural terms, built level by level.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Hashable, Mapping

from ._core import Counter, InputError, canonical, label, sort_key
from .finset import FinFunction, FinSet, WTree
from .presheaf import (
    Presheaf,
    PresheafMorphism,
    _build,
    empty,
    fiber_presheaf,
    nat_transformations,
    validate_morphism,
)

__all__ = [
    "fiber_presheaf",
    "polynomial_presheaf",
    "induced_base_map",
    "root",
    "restrict_term",
    "is_composable",
    "is_natural",
    "term_subterms",
    "WTypePresheaf",
    "wtype_presheaf",
    "kleene_presheaf",
    "term_of_kleene",
    "kleene_comparison",
    "MinimalityVerdict",
    "check_minimality",
    "wtype_presheaf_saturation",
]


def _fiber_keys(f: PresheafMorphism, a: Hashable, C: str) -> tuple:
    """Elements ``((β, b), D)`` of ``|B_a|`` in canonical order."""
    c = f.base
    A, B = f.cod, f.dom
    out = []
    for D in c.objects:
        for beta in c.hom(D, C):
            target = A.act(a, beta)
            for b in B(D):
                if f(D, b) == target:
                    out.append(((beta, b), D))
    return canonical(out)


def polynomial_presheaf(f: PresheafMorphism, X: Presheaf) -> Presheaf:
    """``P_f(X)(C) = {(a, t) | a ∈ A(C), t: B_a -> X natural}``.

    ``t`` is encoded as the sorted tuple of pairs ``((β, b), x)``; restriction is
    ``(a, t)·α = (a·α, α*t)`` with ``α*t(β, b) = t(αβ, b)``.
    """
    if X.base != f.base:
        raise InputError("presheaves live over different bases")
    c = f.base
    A = f.cod
    vals = {}
    for C in c.objects:
        elems = []
        for a in A(C):
            Ba, _ = fiber_presheaf(f, a, C)
            for t in nat_transformations(Ba, X):
                pairs = [(bx, t.components[D].table[bx]) for D in c.objects for bx in Ba(D)]
                elems.append((a, tuple(sorted(pairs, key=lambda kv: sort_key(kv[0])))))
        vals[C] = elems

    def act(elem, alpha):
        a, t = elem
        table = dict(t)
        a2 = A.act(a, alpha)
        pairs = [((beta, b), table[(c.compose(alpha, beta), b)])
                 for (beta, b), _D in _fiber_keys(f, a2, c.dom[alpha])]
        return (a2, tuple(sorted(pairs, key=lambda kv: sort_key(kv[0]))))

    return _build(c, vals, act, check=True)


def induced_base_map(f: PresheafMorphism) -> FinFunction:
    """``g: Σ_{(a, C) ∈ |A|} |B_a| -> |A|``, whose fiber over ``(a, C)`` is ``|B_a|``."""
    c = f.base
    A = f.cod
    heads = [(a, C) for C in c.objects for a in A(C)]
    dom = [((a, C), key) for a, C in heads for key in _fiber_keys(f, a, C)]
    return FinFunction(FinSet(dom), FinSet(heads), {e: e[0] for e in dom}, check=False)


def root(T: WTree) -> str:
    """``γ(T)``: the object recorded in the head."""
    return T.head[1]


def restrict_term(f: PresheafMorphism, T: WTree, alpha: str) -> WTree:
    """``T·α = sup_{(a·α, C')} α*(t)`` for ``α: C' -> C`` with ``γ(T) = C``."""
    c = f.base
    if c.cod[alpha] != root(T):
        raise InputError(f"term rooted at {root(T)} cannot be restricted along {alpha}")
    a, C = T.head
    a2 = f.cod.act(a, alpha)
    C2 = c.dom[alpha]
    head2 = (a2, C2)
    old = dict(T.children)
    children = {}
    for (beta, b), D in _fiber_keys(f, a2, C2):
        src = ((a, C), ((c.compose(alpha, beta), b), D))
        try:
            children[(head2, ((beta, b), D))] = old[src]
        except KeyError:
            raise InputError(f"term has no child at {label(src)}") from None
    return WTree(head2, children)


def _composable_here(f: PresheafMorphism, T: WTree) -> bool:
    a, C = T.head
    if C not in f.base.objects or a not in f.cod(C):
        return False
    expected = {((a, C), key) for key in _fiber_keys(f, a, C)}
    if set(k for k, _ in T.children) != expected:
        return False
    for (_, ((beta, b), D)), child in T.children:
        if root(child) != f.base.dom[beta]:
            return False
    return True


def is_composable(f: PresheafMorphism, T: WTree) -> bool:
    """Every subterm ``sup_{(a, C)} t`` has ``γ(t(β, b)) = dom β``."""
    return _composable_here(f, T) and all(is_composable(f, ch) for _, ch in T.children)


def is_natural(f: PresheafMorphism, T: WTree) -> bool:
    """Composable and ``t(β, b)·γ = t(βγ, b·γ)`` at every subterm."""
    return _natural_checker(f)(T)


_CHECKERS: dict[int, tuple[PresheafMorphism, object]] = {}


def _natural_checker(f: PresheafMorphism):
    hit = _CHECKERS.get(id(f))
    if hit is not None and hit[0] is f:
        return hit[1]
    c = f.base
    B = f.dom

    @lru_cache(maxsize=None)
    def check(T: WTree) -> bool:
        if not _composable_here(f, T):
            return False
        head = T.head
        kids = dict(T.children)
        for (_, ((beta, b), D)), child in T.children:
            if not check(child):
                return False
            for gamma in c.arrows_into(D):
                key = (head, ((c.compose(beta, gamma), B.act(b, gamma)), c.dom[gamma]))
                if restrict_term(f, child, gamma) != kids[key]:
                    return False
        return True

    if len(_CHECKERS) > 64:
        _CHECKERS.clear()
    _CHECKERS[id(f)] = (f, check)
    return check


def term_subterms(T: WTree) -> set[WTree]:
    out = {T}
    for _, ch in T.children:
        out |= term_subterms(ch)
    return out


@dataclass(frozen=True)
class WTypePresheaf:
    """Truncated W-type: ``levels[h]`` is the presheaf of natural terms of height ``<= h``."""

    f: PresheafMorphism
    depth: int
    levels: tuple[Presheaf, ...]
    S: PresheafMorphism = field(repr=False)

    @property
    def W(self) -> Presheaf:
        return self.levels[self.depth]

    def saturated(self) -> bool:
        return self.depth >= 1 and self.levels[self.depth] == self.levels[self.depth - 1]


def _natural_children(f: PresheafMorphism, a, C, lower: Mapping[str, tuple], counter: Counter):
    """All natural child assignments ``t: B_a -> lower`` with correct roots (own backtracking)."""
    c = f.base
    B = f.dom
    head = (a, C)
    keys = _fiber_keys(f, a, C)
    # Constraints: the child at (β, b) restricted along γ is the child at (βγ, b·γ).
    links = {k: [] for k in keys}
    for k in keys:
        (beta, b), D = k
        for gamma in c.arrows_into(D):
            if c.is_identity(gamma):
                continue
            k2 = ((c.compose(beta, gamma), B.act(b, gamma)), c.dom[gamma])
            links[k].append((gamma, k2))
    back = {k: [] for k in keys}
    for k, ls in links.items():
        for gamma, k2 in ls:
            back[k2].append((gamma, k))
    assign: dict = {}

    def consistent(k, T) -> bool:
        for gamma, k2 in links[k]:
            if k2 in assign and restrict_term(f, T, gamma) != assign[k2]:
                return False
        for gamma, k0 in back[k]:
            if k0 in assign and restrict_term(f, assign[k0], gamma) != T:
                return False
        return True

    def rec(i):
        if i == len(keys):
            counter.tick()
            yield WTree(head, {(head, k): T for k, T in assign.items()})
            return
        k = keys[i]
        for T in lower[k[1]]:
            if consistent(k, T):
                assign[k] = T
                yield from rec(i + 1)
                del assign[k]

    yield from rec(0)


def wtype_presheaf(f: PresheafMorphism, depth: int) -> WTypePresheaf:
    """Natural terms of height ``<= depth`` and ``S: P_f(W_{depth-1}) -> W_depth``.

    Levels are built bottom-up; a new term is ``sup_{(a, C)} t`` with ``t`` a
    natural choice of lower-level terms.  ``S`` is checked to be a natural
    isomorphism.
    """
    if depth < 1:
        raise InputError("depth must be >= 1")
    c = f.base
    counter = Counter("wtype_presheaf")
    levels = [empty(c)]
    for _ in range(depth):
        lower = {C: levels[-1](C).elements for C in c.objects}
        vals = {C: [T for a in f.cod(C) for T in _natural_children(f, a, C, lower, counter)]
                for C in c.objects}
        levels.append(_build(c, vals, lambda T, alpha: restrict_term(f, T, alpha), check=True))
    S = structure_morphism(f, levels[depth - 1], levels[depth])
    return WTypePresheaf(f, depth, tuple(levels), S)


def structure_morphism(f: PresheafMorphism, lower: Presheaf, upper: Presheaf) -> PresheafMorphism:
    """``S_C(a, t) = sup_{(a, C)} t`` as a morphism ``P_f(lower) -> upper``; must be an iso."""
    Pf = polynomial_presheaf(f, lower)
    comps = {}
    for C in f.base.objects:
        table = {}
        for a, t in Pf(C):
            head = (a, C)
            T = WTree(head, {(head, (bb, f.base.dom[bb[0]])): child for bb, child in t})
            if T not in upper(C):
                raise AssertionError(f"S_{C} leaves the next level at {T.label()}")
            table[(a, t)] = T
        comps[C] = FinFunction(Pf(C), upper(C), table, check=False)
    S = PresheafMorphism(Pf, upper, comps, check=False)
    if not validate_morphism(S).ok:
        raise AssertionError("S is not natural")
    if not S.is_iso():
        raise AssertionError("S is not a bijection onto the next level")
    return S


def kleene_presheaf(f: PresheafMorphism, depth: int) -> list[Presheaf]:
    """``K_0 = ∅`` and ``K_{d+1} = P_f(K_d)``."""
    ks = [empty(f.base)]
    for _ in range(depth):
        ks.append(polynomial_presheaf(f, ks[-1]))
    return ks


def term_of_kleene(c, elem: tuple, C: str) -> WTree:
    """Canonical map from a Kleene element ``(a, t)`` at ``C`` to a term."""
    a, t = elem
    head = (a, C)
    return WTree(head, {(head, ((beta, b), c.dom[beta])): term_of_kleene(c, x, c.dom[beta])
                        for (beta, b), x in t})


def kleene_comparison(f: PresheafMorphism, K: Presheaf, W: Presheaf) -> PresheafMorphism:
    """The comparison ``K_d -> W_d``; raises unless it is a natural isomorphism."""
    comps = {}
    for C in f.base.objects:
        table = {}
        for e in K(C):
            T = term_of_kleene(f.base, e, C)
            if T not in W(C):
                raise AssertionError(f"Kleene element {label(e)} has no matching term")
            table[e] = T
        comps[C] = FinFunction(K(C), W(C), table, check=False)
    m = PresheafMorphism(K, W, comps, check=False)
    if not validate_morphism(m).ok or not m.is_iso():
        raise AssertionError("Kleene comparison is not a natural isomorphism")
    return m


@dataclass(frozen=True)
class MinimalityVerdict:
    closed: bool
    least_subalgebra_is_w: bool
    missing: tuple[WTree, ...]
    regenerated: tuple[WTree, ...]

    @property
    def passed(self) -> bool:
        return self.closed and not self.missing and self.least_subalgebra_is_w


def _close(f: PresheafMorphism, W: WTypePresheaf, start: Mapping[str, set]) -> dict[str, set]:
    """Close a family of terms under ``S`` inside the truncation."""
    current = {C: set(start.get(C, ())) for C in f.base.objects}
    while True:
        added = False
        for C in f.base.objects:
            for T in W.W(C):
                if T in current[C]:
                    continue
                # L = {T | T ∈ K(γ(T))}: a term is generated once all its children are.
                if all(ch in current[root(ch)] for _, ch in T.children):
                    current[C].add(T)
                    added = True
        if not added:
            return current


def check_minimality(f: PresheafMorphism, K: Mapping[str, set], depth: int) -> MinimalityVerdict:
    """Does the candidate ``K ⊆ W_depth`` equal ``W``, with ``W`` free of proper subalgebras?"""
    W = wtype_presheaf(f, depth)
    for C, ts in K.items():
        for T in ts:
            if T not in W.W(C):
                raise InputError(f"{T.label()} is not a natural term of height <= {depth} at {C}")
    closure = _close(f, W, K)
    regenerated = canonical(T for C in f.base.objects for T in closure[C] - set(K.get(C, ())))
    missing = canonical(T for C in f.base.objects for T in W.W(C).elements
                        if T not in K.get(C, ()))
    least = _close(f, W, {})
    least_is_w = all(least[C] == set(W.W(C).elements) for C in f.base.objects)
    return MinimalityVerdict(not regenerated, least_is_w, missing, regenerated)


def wtype_presheaf_saturation(f: PresheafMorphism, max_depth: int) -> int | None:
    """Least ``d`` with ``W_d = W_{d+1}``, if reached by ``max_depth``."""
    W = wtype_presheaf(f, max_depth + 1)
    for d in range(max_depth + 1):
        if W.levels[d] == W.levels[d + 1]:
            return d
    return None
