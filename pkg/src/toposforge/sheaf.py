"""Sheaves on finite sites.

The sheaf condition is checked on covering families (unique amalgamation of
compatible families).  An independent check runs against the covering sieves
of the generated Grothendieck topology, which is also where sheafification
happens: the plus construction, applied twice, as a colimit over covering
sieves.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Mapping

from ._core import BudgetExceeded, Counter, InputError, canonical, label, sort_key
from .cat import FinCategory
from .finset import FinFunction, FinSet
from .presheaf import (
    Presheaf,
    PresheafMorphism,
    _build,
    count_nat,
    enumerate_presheaves,
    iter_presheaves,
    image,
    nat_transformations,
    presheaf_sum,
    quotient,
    sieve_presheaf,
    subpresheaves,
)
from .site import CoveringFamily, Site, Sieve, is_collection_site, pullback_sieve, sieve_topology_fixpoint

__all__ = [
    "FamilyCheck",
    "SheafVerdict",
    "compatible_families",
    "is_sheaf_for",
    "is_sheaf",
    "is_separated",
    "is_j_sheaf",
    "is_locally_surjective",
    "is_sheaf_cover",
    "Sheafification",
    "plus",
    "sheafify",
    "sheafify_map",
    "SheafColimit",
    "sheaf_sum",
    "sheaf_quotient",
    "SameSheavesVerdict",
    "same_sheaves",
    "enumerate_sheaves",
]


@dataclass(frozen=True)
class FamilyCheck:
    """One compatible family for one cover and its amalgamations."""

    cover: str
    family: tuple[tuple[Hashable, Hashable], ...]
    amalgamations: tuple[Hashable, ...]

    @property
    def exists(self) -> bool:
        return len(self.amalgamations) >= 1

    @property
    def unique(self) -> bool:
        return len(self.amalgamations) <= 1


@dataclass(frozen=True)
class SheafVerdict:
    checks: tuple[FamilyCheck, ...]

    @property
    def is_sheaf(self) -> bool:
        return all(ch.exists and ch.unique for ch in self.checks)

    @property
    def is_separated(self) -> bool:
        return all(ch.unique for ch in self.checks)

    def failures(self) -> tuple[FamilyCheck, ...]:
        return tuple(ch for ch in self.checks if not (ch.exists and ch.unique))

    def __bool__(self) -> bool:
        return self.is_sheaf


def _pair_constraints(c: FinCategory, U: CoveringFamily):
    """``(i, j, β, γ)`` with ``α_i β = α_j γ``."""
    out = []
    fam = U.family
    for (i, ai), (j, aj) in itertools.product(fam, fam):
        for D in c.objects:
            for beta in c.hom(D, c.dom[ai]):
                h = c.compose(ai, beta)
                for gamma in c.hom(D, c.dom[aj]):
                    if c.compose(aj, gamma) == h:
                        out.append((i, j, beta, gamma))
    return out


def compatible_families(P: Presheaf, U: CoveringFamily) -> list[tuple[tuple[Hashable, Hashable], ...]]:
    """All ``(x_i)`` with ``x_i·β = x_j·γ`` whenever ``α_i β = α_j γ``."""
    c = P.base
    constraints = _pair_constraints(c, U)
    idx = U.indices
    pos = {i: n for n, i in enumerate(idx)}
    by_last: dict[int, list] = {n: [] for n in range(len(idx))}
    for i, j, beta, gamma in constraints:
        by_last[max(pos[i], pos[j])].append((i, j, beta, gamma))
    pools = [P(c.dom[U.arrow(i)]).elements for i in idx]
    out = []
    chosen: dict = {}

    def rec(n):
        if n == len(idx):
            out.append(tuple((i, chosen[i]) for i in idx))
            return
        i = idx[n]
        for x in pools[n]:
            chosen[i] = x
            if all(P.act(chosen[a], beta) == P.act(chosen[b], gamma) for a, b, beta, gamma in by_last[n]):
                rec(n + 1)
        chosen.pop(i, None)

    rec(0)
    return out


def is_sheaf_for(P: Presheaf, s: Site) -> SheafVerdict:
    """Enumerate every compatible family of every cover with its amalgamations."""
    if P.base != s.base:
        raise InputError("presheaf and site have different bases")
    checks = []
    for U in s.covers:
        C = U.target
        for fam in compatible_families(P, U):
            amalg = tuple(x for x in P(C) if all(P.act(x, U.arrow(i)) == xi for i, xi in fam))
            checks.append(FamilyCheck(U.name, fam, amalg))
    return SheafVerdict(tuple(checks))


def is_sheaf(P: Presheaf, s: Site) -> bool:
    return is_sheaf_for(P, s).is_sheaf


def is_separated(P: Presheaf, s: Site) -> bool:
    return is_sheaf_for(P, s).is_separated


def _topology(s_or_J) -> dict[str, frozenset[Sieve]]:
    if isinstance(s_or_J, Site):
        return sieve_topology_fixpoint(s_or_J)
    return dict(s_or_J)


def _matching(P: Presheaf, C: str, S: Sieve) -> list[tuple]:
    """Matching families for ``S`` as sorted ``((f, x_f), ...)`` tuples, i.e. ``Nat(S, P)``."""
    c = P.base
    Sp = sieve_presheaf(c, C, S)
    out = []
    for theta in nat_transformations(Sp, P):
        out.append(tuple(sorted(((f, theta(c.dom[f], f)) for f in S), key=sort_key)))
    return out


def is_j_sheaf(P: Presheaf, J) -> bool:
    """Sieve form: ``P(C) -> Match(S, P)`` is bijective for every covering sieve ``S``."""
    J = _topology(J)
    c = P.base
    for C in c.objects:
        for S in J[C]:
            fams = _matching(P, C, S)
            images = [tuple(sorted(((f, P.act(x, f)) for f in S), key=sort_key)) for x in P(C)]
            if len(set(images)) != len(images) or set(images) != set(fams):
                return False
    return True


def is_locally_surjective(f: PresheafMorphism, s) -> bool:
    """For each ``y ∈ Q(C)``, the sieve ``{α | y·α ∈ im f}`` is covering."""
    J = _topology(s)
    c = f.base
    Q = f.cod
    im = {C: f.components[C].image() for C in c.objects}
    for C in c.objects:
        for y in Q(C):
            S = frozenset(a for a in c.arrows_into(C) if Q.act(y, a) in im[c.dom[a]])
            if S not in J[C]:
                return False
    return True


def is_sheaf_cover(f: PresheafMorphism, s: Site) -> bool:
    """Categorical cover among sheaves: ``f`` factors through no proper subsheaf of its codomain."""
    Q = f.cod
    c = f.base
    im = {C: f.components[C].image() for C in c.objects}
    full = {C: frozenset(Q(C)) for C in c.objects}
    for sub in subpresheaves(Q):
        if sub == full:
            continue
        if any(x not in sub[C] for C in c.objects for x in im[C]):
            continue
        S = _build(c, {C: sub[C] for C in c.objects}, Q.act)
        if is_sheaf(S, s):
            return False
    return True


@dataclass(frozen=True)
class Sheafification:
    sheaf: Presheaf
    unit: PresheafMorphism


def plus(P: Presheaf, J) -> Sheafification:
    """``P⁺(C) = colim_{S ∈ J(C)} Match(S, P)`` with its canonical map from ``P``.

    Two matching families are identified when they agree on some common
    covering sieve.  A class is labelled by its least member.
    """
    J = _topology(J)
    c = P.base
    reps: dict[str, dict] = {}
    vals = {}
    for C in c.objects:
        sieves = sorted(J[C], key=lambda S: (len(S), sorted(S)))
        members = [(S, fam) for S in sieves for fam in _matching(P, C, S)]
        parent = list(range(len(members)))

        def find(n):
            while parent[n] != n:
                parent[n] = parent[parent[n]]
                n = parent[n]
            return n

        for a, b in itertools.combinations(range(len(members)), 2):
            (S1, x1), (S2, x2) = members[a], members[b]
            d1, d2 = dict(x1), dict(x2)
            common = S1 & S2
            if any(T <= common and all(d1[g] == d2[g] for g in T) for T in J[C]):
                ra, rb = find(a), find(b)
                if ra != rb:
                    parent[max(ra, rb)] = min(ra, rb)
        cls = {}
        for n, (S, fam) in enumerate(members):
            cls.setdefault(find(n), []).append((tuple(sorted(S)), fam))
        table = {}
        for group in cls.values():
            rep = min(group, key=sort_key)
            for S, fam in group:
                table[(S, fam)] = rep
        reps[C] = table
        vals[C] = set(table.values())

    def act(elem, a):
        S, fam = elem
        d = dict(fam)
        S2 = pullback_sieve(c, frozenset(S), a)
        fam2 = tuple(sorted(((g, d[c.compose(a, g)]) for g in S2), key=sort_key))
        return reps[c.dom[a]][(tuple(sorted(S2)), fam2)]

    Pp = _build(c, vals, act, check=True)
    comps = {}
    for C in c.objects:
        top = tuple(sorted(c.arrows_into(C)))
        comps[C] = {x: reps[C][(top, tuple(sorted(((g, P.act(x, g)) for g in top), key=sort_key)))]
                    for x in P(C)}
    return Sheafification(Pp, PresheafMorphism(P, Pp, comps))


def sheafify(P: Presheaf, s) -> Sheafification:
    """``aP = P⁺⁺`` with unit ``η⁺ ∘ η``."""
    J = _topology(s)
    first = plus(P, J)
    second = plus(first.sheaf, J)
    return Sheafification(second.sheaf, second.unit.after(first.unit))


def sheafify_map(f: PresheafMorphism, s, dom: Sheafification | None = None,
                  cod: Sheafification | None = None) -> PresheafMorphism:
    """``a(f): aP -> aQ``, determined by ``a(f) ∘ η_P = η_Q ∘ f``.

    Precomputed sheafifications of the domain and codomain may be passed in.
    """
    J = _topology(s)
    aP = dom or sheafify(f.dom, J)
    aQ = cod or sheafify(f.cod, J)
    target = aQ.unit.after(f)
    pinned: dict = {}
    for C in f.base.objects:
        for x in f.dom(C):
            pinned.setdefault((C, aP.unit(C, x)), set()).add(target(C, x))
    if any(len(v) > 1 for v in pinned.values()):
        raise AssertionError("η_Q ∘ f does not factor through η_P")

    def allowed(C, x):
        return pinned.get((C, x), aQ.sheaf(C).elements)

    for g in nat_transformations(aP.sheaf, aQ.sheaf, allowed=allowed):
        if g.after(aP.unit) == target:
            return g
    raise AssertionError("no induced map between sheafifications")


@dataclass(frozen=True)
class SheafColimit:
    sheaf: Presheaf
    maps: tuple[PresheafMorphism, ...]
    route: str


def _route(s: Site) -> str:
    if is_collection_site(s).holds:
        return "presheaf colimit then plus construction (collection site)"
    return "presheaf colimit then plus construction"


def sheaf_sum(F: Presheaf, G: Presheaf, s: Site) -> SheafColimit:
    """``a(F + G)`` with the sheafified injections."""
    S, inl, inr = presheaf_sum(F, G)
    a = sheafify(S, s)
    return SheafColimit(a.sheaf, (a.unit.after(inl), a.unit.after(inr)), _route(s))


def sheaf_quotient(r1: PresheafMorphism, r2: PresheafMorphism, s: Site) -> SheafColimit:
    """``a(F / R)`` with the sheafified projection."""
    Q, q = quotient(r1, r2)
    a = sheafify(Q, s)
    return SheafColimit(a.sheaf, (a.unit.after(q),), _route(s))


@dataclass(frozen=True)
class SameSheavesVerdict:
    equal: bool
    complete: bool
    size_bound: int
    checked: int
    witnesses: tuple[tuple[Presheaf, str], ...] = field(default=())

    def __bool__(self) -> bool:
        return self.equal


def same_sheaves(s1: Site, s2: Site, size_bound: int, counter: Counter | None = None) -> SameSheavesVerdict:
    """Compare sheaf conditions on every presheaf with values of size ``<= size_bound``.

    Witnesses name the site for which the presheaf is a sheaf.  If the
    enumeration budget runs out, the verdict covers what was checked.
    """
    if s1.base != s2.base:
        raise InputError("sites have different base categories")
    counter = counter or Counter("same_sheaves")
    witnesses = []
    checked = 0
    complete = True
    try:
        for P in iter_presheaves(s1.base, size_bound, counter):
            checked += 1
            a, b = is_sheaf(P, s1), is_sheaf(P, s2)
            if a != b:
                witnesses.append((P, "first" if a else "second"))
    except BudgetExceeded:
        complete = False
    return SameSheavesVerdict(not witnesses, complete, size_bound, checked, tuple(witnesses))


def enumerate_sheaves(s: Site, size_bound: int) -> list[Presheaf]:
    """Sheaves with values of size ``<= size_bound``, up to iso."""
    return [P for P in enumerate_presheaves(s.base, size_bound) if is_sheaf(P, s)]
