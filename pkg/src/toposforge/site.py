"""Sites on finite categories.

A site assigns to each object ``C`` a list of covering families
``(α_i: C_i -> C | i ∈ I)``.  Besides the axiom checkers this module builds
the inductively generated Grothendieck site (covering families indexed by
well-founded trees) and, as an independent oracle, the least Grothendieck
topology of sieves containing the given covers.
"""

from __future__ import annotations

import itertools
from collections import Counter as Multiset
from dataclasses import dataclass, field
from functools import cached_property
from typing import Hashable, Iterable, Mapping, Sequence

from ._core import InputError, canonical, label, sort_key
from .cat import FinCategory
from .finset import FinFunction, FinSet

__all__ = [
    "CoveringFamily",
    "Site",
    "Sieve",
    "SiteVerdict",
    "check_C",
    "check_strong_C",
    "check_M",
    "check_L",
    "CollectionSpanVerdict",
    "is_collection_span",
    "is_collection_site",
    "has_small_covers",
    "CovTree",
    "GeneratedSite",
    "generate_grothendieck",
    "cov_trees",
    "tree_family",
    "generated_sieve",
    "pullback_sieve",
    "all_sieves",
    "sieve_topology_fixpoint",
    "close_topology",
]

Sieve = frozenset  # a precomposition-closed set of arrow names with a common codomain


@dataclass(frozen=True)
class CoveringFamily:
    """``(α_i: C_i -> C | i ∈ I)``; ``family`` lists ``(index, arrow)`` pairs."""

    name: str
    target: str
    family: tuple[tuple[Hashable, str], ...]

    def __post_init__(self):
        fam = tuple(sorted(((i, a) for i, a in self.family), key=lambda p: sort_key(p[0])))
        idx = [i for i, _ in fam]
        if len(set(idx)) != len(idx):
            raise InputError(f"cover {self.name!r} repeats an index")
        object.__setattr__(self, "family", fam)

    @property
    def indices(self) -> tuple:
        return tuple(i for i, _ in self.family)

    @property
    def arrows(self) -> tuple[str, ...]:
        """The arrows as a sorted multiset."""
        return tuple(sorted(a for _, a in self.family))

    def arrow(self, i: Hashable) -> str:
        for j, a in self.family:
            if j == i:
                return a
        raise KeyError(i)

    def __len__(self) -> int:
        return len(self.family)


class Site:
    """A finite category with covering families."""

    def __init__(self, base: FinCategory, covers: Iterable[CoveringFamily]):
        self.base = base
        covers = tuple(covers)
        names = [U.name for U in covers]
        if len(set(names)) != len(names):
            raise InputError("cover names must be distinct")
        for U in covers:
            if U.target not in base.objects:
                raise InputError(f"cover {U.name!r} targets unknown object {U.target!r}")
            for i, a in U.family:
                if a not in base.arrows:
                    raise InputError(f"cover {U.name!r} uses unknown arrow {a!r}")
                if base.cod[a] != U.target:
                    raise InputError(f"cover {U.name!r}: arrow {a} does not have codomain {U.target}")
        self.covers: tuple[CoveringFamily, ...] = tuple(sorted(covers, key=lambda U: (U.target, U.name)))
        self._by_name = {U.name: U for U in self.covers}

    def __repr__(self) -> str:
        return f"Site({len(self.base.objects)} objects, {len(self.covers)} covers)"

    def cover(self, name: str) -> CoveringFamily:
        return self._by_name[name]

    @cached_property
    def _by_target(self) -> dict[str, tuple[CoveringFamily, ...]]:
        out: dict[str, list] = {C: [] for C in self.base.objects}
        for U in self.covers:
            out[U.target].append(U)
        return {C: tuple(v) for C, v in out.items()}

    def covers_of(self, C: str) -> tuple[CoveringFamily, ...]:
        return self._by_target[C]

    def square(self) -> tuple[FinFunction, FinFunction, FinFunction, FinFunction]:
        """``(φ, m, target, cod)`` with ``cod ∘ m = target ∘ φ`` checked."""
        c = self.base
        Cov = FinSet(U.name for U in self.covers)
        uCov = FinSet((U.name, i) for U in self.covers for i in U.indices)
        phi = FinFunction(uCov, Cov, {e: e[0] for e in uCov})
        m = FinFunction(uCov, c.arrows, {(U.name, i): a for U in self.covers for i, a in U.family})
        target = FinFunction(Cov, c.objects, {U.name: U.target for U in self.covers})
        cod = c.cod_map()
        if cod.after(m) != target.after(phi):
            raise AssertionError("site square does not commute")
        return phi, m, target, cod


def generated_sieve(c: FinCategory, arrows: Iterable[str]) -> Sieve:
    """Least sieve containing the arrows (all share a codomain)."""
    return frozenset(c.compose(a, g) for a in arrows for g in c.arrows_into(c.dom[a]))


def pullback_sieve(c: FinCategory, S: Sieve, f: str) -> Sieve:
    """``f*S = {g | f ∘ g ∈ S}``."""
    return frozenset(g for g in c.arrows_into(c.dom[f]) if c.compose(f, g) in S)


def all_sieves(c: FinCategory, C: str) -> tuple[Sieve, ...]:
    into = c.arrows_into(C)
    out = []
    for r in range(len(into) + 1):
        for sub in itertools.combinations(into, r):
            S = frozenset(sub)
            if all(c.compose(a, g) in S for a in S for g in c.arrows_into(c.dom[a])):
                out.append(S)
    return tuple(out)


def _factors(c: FinCategory, h: str, through: Iterable[str]) -> bool:
    return any(c.factors_through(h, a) for a in through)


@dataclass(frozen=True)
class SiteVerdict:
    axiom: str
    failures: tuple[str, ...]
    choices: Mapping = field(default_factory=dict, compare=False)

    @property
    def ok(self) -> bool:
        return not self.failures


def _c_choice(s: Site, U: CoveringFamily, f: str) -> str | None:
    c = s.base
    arrows = U.arrows
    for V in s.covers_of(c.dom[f]):
        if all(_factors(c, c.compose(f, b), arrows) for b in V.arrows):
            return V.name
    return None


def _check_C(s: Site) -> tuple[tuple[str, ...], dict]:
    c = s.base
    bad, choice = [], {}
    for U in s.covers:
        for f in c.arrows_into(U.target):
            V = _c_choice(s, U, f)
            if V is None:
                bad.append(f"no cover of {c.dom[f]} refines {U.name} along {f}")
            else:
                choice[(U.name, f)] = V
    return tuple(bad), choice


def check_C(s: Site) -> SiteVerdict:
    """(C): every cover pulled back along any ``f: D -> C`` is refined by a cover of ``D``."""
    bad, choice = _check_C(s)
    return SiteVerdict("C", bad, choice)


def check_strong_C(s: Site) -> SiteVerdict:
    """(C) with an explicit choice function ``(U, f) ↦ V`` (first cover in canonical order)."""
    bad, choice = _check_C(s)
    return SiteVerdict("strong C", bad, choice if not bad else {})


def check_M(s: Site) -> SiteVerdict:
    """(M): each object has a cover containing its identity."""
    c = s.base
    bad, witness = [], {}
    for C in c.objects:
        hit = [U.name for U in s.covers_of(C) if c.id(C) in U.arrows]
        if hit:
            witness[C] = hit[0]
        else:
            bad.append(f"no cover of {C} contains {c.id(C)}")
    return SiteVerdict("M", tuple(bad), witness)


def check_L(s: Site) -> SiteVerdict:
    """(L): covers of the domains of a cover compose to something refined by a cover.

    Choices of covers ``V_i`` matter only through the sieve generated by the
    composites ``α_i β_ij``, so they are explored up to that sieve.  The
    choice table maps ``(U, sieve)`` to the witness cover.
    """
    c = s.base
    bad, choice = [], {}
    for U in s.covers:
        reach: dict[Sieve, tuple] = {frozenset(): ()}
        for i, a in U.family:
            options = {}
            for V in s.covers_of(c.dom[a]):
                S = generated_sieve(c, (c.compose(a, b) for b in V.arrows))
                options.setdefault(S, V.name)
            nxt: dict[Sieve, tuple] = {}
            for R, picks in reach.items():
                for S, V in options.items():
                    nxt.setdefault(R | S, picks + ((i, V),))
            reach = nxt
        for R, picks in sorted(reach.items(), key=lambda kv: sorted(kv[0])):
            W = next((W.name for W in s.covers_of(U.target) if all(g in R for g in W.arrows)), None)
            if W is None:
                desc = ", ".join(f"{label(i)}↦{V}" for i, V in picks)
                bad.append(f"composite of {U.name} with ({desc}) is refined by no cover")
            else:
                choice[(U.name, R)] = W
    return SiteVerdict("L", tuple(bad), choice)


@dataclass(frozen=True)
class CollectionSpanVerdict:
    holds: bool
    bound: int
    lifts: str
    instances: int
    counterexample: tuple | None = None

    def __bool__(self) -> bool:
        return self.holds


def _fiber_covers(n: int, bound: int):
    """Surjections onto an ``n``-element fiber up to iso over it: fiber-size vectors."""
    for total in range(n, bound + 1):
        for sizes in itertools.product(range(1, total - n + 2), repeat=n):
            if sum(sizes) == total:
                yield sizes


def is_collection_span(
    g: FinFunction,
    h: FinFunction,
    over: FinFunction | None = None,
    bound: int | None = None,
    lifts: str = "any",
) -> CollectionSpanVerdict:
    """Does every cover ``F ↠ D_c`` get refined by some fiber ``D_{c'} ↠ D_c`` over ``B``?

    ``over: C -> A`` restricts ``c'`` to the slice of ``c``.  Covers ``F`` are
    enumerated up to iso by fiber sizes, with ``|F| <= bound`` (default
    ``|D_c| + 2``).  With ``lifts="epi"`` the factorization ``D_{c'} -> F``
    must itself be surjective, which rules out the section-based lifts.
    """
    if g.dom != h.dom:
        raise InputError("g and h must share a domain")
    if over is not None and over.dom != g.cod:
        raise InputError("over must be defined on the codomain of g")
    if lifts not in ("any", "epi"):
        raise InputError("lifts must be 'any' or 'epi'")
    fibers = {c: g.fiber(c) for c in g.cod}
    slice_of = (lambda c: over(c)) if over is not None else (lambda c: None)
    instances = 0
    worst_bound = 0
    for c in g.cod:
        Dc = fibers[c]
        n = len(Dc)
        b = n + 2 if bound is None else bound
        worst_bound = max(worst_bound, b)
        for sizes in _fiber_covers(n, b):
            instances += 1
            need = dict(zip(Dc, sizes))
            if not any(_refines(fibers[c2], Dc, h, need, lifts)
                       for c2 in g.cod if slice_of(c2) == slice_of(c)):
                return CollectionSpanVerdict(False, worst_bound, lifts, instances, (c, sizes))
    return CollectionSpanVerdict(True, worst_bound, lifts, instances)


def _refines(src: tuple, Dc: tuple, h: FinFunction, need: Mapping, lifts: str) -> bool:
    """Is there ``p: src ↠ Dc`` over ``B`` factoring through the cover with fiber sizes ``need``?"""
    options = [[x for x in Dc if h(x) == h(y)] for y in src]
    for images in itertools.product(*options):
        counts = Multiset(images)
        if len(counts) != len(Dc):
            continue
        if lifts == "any" or all(counts[x] >= need[x] for x in Dc):
            return True
    return False


def is_collection_site(s: Site, bound: int | None = None, lifts: str = "any") -> CollectionSpanVerdict:
    """The span ``(φ, m)`` is a collection span over the objects."""
    phi, m, target, _ = s.square()
    return is_collection_span(phi, m, over=target, bound=bound, lifts=lifts)


def has_small_covers(s: Site, k) -> bool:
    """``φ`` belongs to the class ``k`` (anything with a ``contains`` method)."""
    phi, *_ = s.square()
    return k.contains(phi)


@dataclass(frozen=True)
class CovTree:
    """Either the leaf ``*`` at ``root`` or ``sup_U(t)`` for a cover ``U`` of ``root``."""

    root: str
    cover: str | None = None
    children: tuple[tuple[Hashable, "CovTree"], ...] = ()

    @cached_property
    def height(self) -> int:
        return 1 + max((t.height for _, t in self.children), default=0)

    def is_leaf(self) -> bool:
        return self.cover is None

    def label(self) -> str:
        if self.cover is None:
            return "*"
        return self.cover + "[" + ",".join(f"{label(i)}:{t.label()}" for i, t in self.children) + "]"

    def sort_key(self) -> tuple:
        return (self.height, self.label())


def tree_family(s: Site, T: CovTree) -> tuple[tuple[Hashable, str], ...]:
    """``M(T)``: the leaf at ``C`` gives ``id_C``; ``(i, k)`` gives ``m(i) ∘ M(k)``."""
    c = s.base
    if T.is_leaf():
        return (("*", c.id(T.root)),)
    U = s.cover(T.cover)
    out = []
    for i, child in T.children:
        a = U.arrow(i)
        for k, b in tree_family(s, child):
            out.append(((i, k), c.compose(a, b)))
    return tuple(out)


def cov_trees(s: Site, depth: int) -> dict[str, tuple[CovTree, ...]]:
    """All trees of height ``<= depth`` per object."""
    if depth < 1:
        raise InputError("depth must be >= 1")
    c = s.base
    levels: dict[str, list[CovTree]] = {C: [] for C in c.objects}
    for _ in range(depth):
        nxt = {}
        for C in c.objects:
            trees = [CovTree(C)]
            for U in s.covers_of(C):
                pools = [[(i, t) for t in levels[c.dom[a]]] for i, a in U.family]
                for pick in itertools.product(*pools):
                    trees.append(CovTree(C, U.name, tuple(pick)))
            nxt[C] = trees
        levels = nxt
    return {C: tuple(sorted(ts, key=sort_key)) for C, ts in levels.items()}


@dataclass(frozen=True)
class GeneratedSite:
    site: Site
    registry: Mapping[str, tuple[CovTree, ...]]
    depth: int


def generate_grothendieck(s: Site, depth: int) -> GeneratedSite:
    """Covers indexed by trees of height ``<= depth``, one per distinct arrow multiset.

    The registry maps each resulting cover name to every tree producing it.
    """
    covers = []
    registry: dict[str, list[CovTree]] = {}
    for C, trees in cov_trees(s, depth).items():
        seen: dict[tuple, str] = {}
        for T in trees:
            fam = tree_family(s, T)
            key = tuple(sorted(a for _, a in fam))
            name = seen.get(key)
            if name is None:
                name = f"{C}:{T.label()}"
                seen[key] = name
                covers.append(CoveringFamily(name, C, fam))
                registry[name] = []
            registry[name].append(T)
    site = Site(s.base, covers)
    return GeneratedSite(site, {k: tuple(v) for k, v in registry.items()}, depth)


def close_topology(c: FinCategory, J: Mapping[str, Iterable[Sieve]]) -> dict[str, frozenset[Sieve]]:
    """Least Grothendieck topology containing ``J``: maximal sieves, pullback, local character."""
    sieves = {C: all_sieves(c, C) for C in c.objects}
    top = {C: frozenset(c.arrows_into(C)) for C in c.objects}
    cur = {C: set(J.get(C, ())) | {top[C]} for C in c.objects}
    changed = True
    while changed:
        changed = False
        for C in c.objects:
            for S in list(cur[C]):
                for f in c.arrows_into(C):
                    P = pullback_sieve(c, S, f)
                    if P not in cur[c.dom[f]]:
                        cur[c.dom[f]].add(P)
                        changed = True
        for C in c.objects:
            for R in sieves[C]:
                if R in cur[C]:
                    continue
                for S in list(cur[C]):
                    if all(pullback_sieve(c, R, f) in cur[c.dom[f]] for f in S):
                        cur[C].add(R)
                        changed = True
                        break
    return {C: frozenset(v) for C, v in cur.items()}


def sieve_topology_fixpoint(s: Site) -> dict[str, frozenset[Sieve]]:
    """Covering sieves of the least Grothendieck topology in which every cover generates a covering sieve."""
    c = s.base
    J = {C: [generated_sieve(c, U.arrows) for U in s.covers_of(C)] for C in c.objects}
    return close_topology(c, J)
