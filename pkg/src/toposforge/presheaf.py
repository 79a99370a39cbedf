"""Finite-set-valued presheaves on a :class:`~toposforge.cat.FinCategory`.

A presheaf stores, for every arrow ``α: D -> C``, the restriction
``P(C) -> P(D)`` written ``x ↦ x·α``.  Limits, colimits, images and quotients
are computed objectwise; exponentials and dependent products are computed by
enumerating natural transformations.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Hashable, Iterable, Iterator, Mapping, NamedTuple

from ._core import Counter, InputError, canonical, label, sort_key
from .cat import FinCategory
from .finset import FinFunction, FinSet, quotient as set_quotient

__all__ = [
    "Presheaf",
    "PresheafMorphism",
    "PresheafVerdict",
    "validate_presheaf",
    "validate_morphism",
    "yoneda",
    "terminal",
    "empty",
    "constant",
    "product",
    "pullback",
    "equalizer",
    "presheaf_sum",
    "image",
    "quotient",
    "nat_transformations",
    "count_nat",
    "exponential",
    "exponential_adjunction_check",
    "fiber_presheaf",
    "pi_presheaf",
    "pi_adjunction_check",
    "underlying",
    "underlying_map",
    "underlying_projection",
    "is_cover",
    "enumerate_presheaves",
    "iter_presheaves",
    "canonical_form",
    "find_isomorphism",
    "is_isomorphic",
    "subpresheaves",
    "sieve_presheaf",
    "relabeled",
]


class Presheaf:
    """A contravariant functor ``base -> FinSet``."""

    def __init__(
        self,
        base: FinCategory,
        values: Mapping[str, FinSet | Iterable],
        restrict: Mapping[str, FinFunction | Mapping] | None = None,
        check: bool = True,
    ):
        self.base = base
        vals = {}
        for C in base.objects:
            v = values.get(C, ())
            vals[C] = v if isinstance(v, FinSet) else FinSet(v)
        extra = set(values) - set(base.objects)
        if extra:
            raise InputError(f"values given for unknown objects {sorted(extra)}")
        self.values: dict[str, FinSet] = vals
        restrict = dict(restrict or {})
        extra = set(restrict) - set(base.arrows)
        if extra:
            raise InputError(f"restrictions given for unknown arrows {sorted(extra)}")
        self.restrict: dict[str, FinFunction] = {}
        for a in base.arrows:
            src, dst = vals[base.cod[a]], vals[base.dom[a]]
            r = restrict.get(a)
            if r is None:
                if base.is_identity(a):
                    r = FinFunction.identity(src)
                elif not src:
                    r = FinFunction(src, dst, {}, check=False)
                else:
                    raise InputError(f"missing restriction along {a}")
            elif not isinstance(r, FinFunction):
                r = FinFunction(src, dst, r)
            elif r.dom != src or r.cod != dst:
                raise InputError(f"restriction along {a} has the wrong shape")
            self.restrict[a] = r
        self._hash: int | None = None
        if check:
            verdict = validate_presheaf(self)
            if not verdict.ok:
                raise InputError("invalid presheaf: " + "; ".join(verdict.violations))

    def __call__(self, C: str) -> FinSet:
        return self.values[C]

    def act(self, x: Hashable, alpha: str) -> Hashable:
        """``x · α``."""
        return self.restrict[alpha].table[x]

    def sizes(self) -> dict[str, int]:
        return {C: len(v) for C, v in self.values.items()}

    def total_size(self) -> int:
        return sum(len(v) for v in self.values.values())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Presheaf):
            return False
        return (self.base == other.base and self.values == other.values
                and self.restrict == other.restrict)

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(tuple(sorted((C, v) for C, v in self.values.items())))
        return self._hash

    def __repr__(self) -> str:
        body = ", ".join(f"{C}:{len(v)}" for C, v in sorted(self.values.items()))
        return f"Presheaf({body})"

    def sort_key(self) -> tuple:
        return tuple((C, self.values[C].sort_key()) for C in self.base.objects) + tuple(
            (a, self.restrict[a].sort_key()) for a in self.base.arrows)


class PresheafMorphism:
    """A natural transformation, stored as one finite function per object."""

    def __init__(self, dom: Presheaf, cod: Presheaf, components: Mapping[str, FinFunction | Mapping],
                 check: bool = True):
        if dom.base != cod.base:
            raise InputError("presheaf morphism between different bases")
        self.dom = dom
        self.cod = cod
        comps = {}
        for C in dom.base.objects:
            f = components.get(C)
            if f is None:
                if dom(C):
                    raise InputError(f"missing component at {C}")
                f = FinFunction(dom(C), cod(C), {}, check=False)
            elif not isinstance(f, FinFunction):
                f = FinFunction(dom(C), cod(C), f)
            elif f.dom != dom(C) or f.cod != cod(C):
                raise InputError(f"component at {C} has the wrong shape")
            comps[C] = f
        self.components: dict[str, FinFunction] = comps
        self._hash: int | None = None
        if check:
            verdict = validate_morphism(self)
            if not verdict.ok:
                raise InputError("not natural: " + "; ".join(verdict.violations))

    @property
    def base(self) -> FinCategory:
        return self.dom.base

    def __call__(self, C: str, x: Hashable) -> Hashable:
        return self.components[C].table[x]

    @classmethod
    def identity(cls, P: Presheaf) -> PresheafMorphism:
        return cls(P, P, {C: FinFunction.identity(P(C)) for C in P.base.objects}, check=False)

    def after(self, other: PresheafMorphism) -> PresheafMorphism:
        """``self ∘ other``."""
        if other.cod != self.dom:
            raise InputError("composite of presheaf morphisms undefined")
        return PresheafMorphism(other.dom, self.cod,
                                {C: self.components[C].after(other.components[C])
                                 for C in self.base.objects}, check=False)

    def is_mono(self) -> bool:
        return all(f.is_injective() for f in self.components.values())

    def is_epi(self) -> bool:
        return all(f.is_surjective() for f in self.components.values())

    def is_iso(self) -> bool:
        return self.is_mono() and self.is_epi()

    def key(self) -> tuple:
        return tuple((C, tuple((sort_key(x), sort_key(y)) for x, y in
                               ((x, self.components[C].table[x]) for x in self.dom(C))))
                     for C in self.base.objects)

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, PresheafMorphism) and self.dom == other.dom
                and self.cod == other.cod and self.components == other.components)

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(tuple(frozenset(f.table.items()) for f in self.components.values()))
        return self._hash

    def sort_key(self) -> tuple:
        return self.key()

    def __repr__(self) -> str:
        return f"PresheafMorphism({self.dom!r} -> {self.cod!r})"


@dataclass(frozen=True)
class PresheafVerdict:
    violations: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def validate_presheaf(P: Presheaf) -> PresheafVerdict:
    """Check identities act trivially and ``x·(g∘f) = (x·g)·f`` for all composable pairs."""
    c = P.base
    bad = []
    for X in c.objects:
        r = P.restrict[c.id(X)]
        if any(r.table[x] != x for x in P(X)):
            bad.append(f"restriction along {c.id(X)} is not the identity")
    for (g, f), gf in c.comp.items():
        rg, rf, rgf = P.restrict[g], P.restrict[f], P.restrict[gf]
        for x in P(c.cod[g]):
            if rgf.table[x] != rf.table[rg.table[x]]:
                bad.append(f"x·({g}∘{f}) != (x·{g})·{f} at x={label(x)}")
                break
    return PresheafVerdict(tuple(bad))


def validate_morphism(f: PresheafMorphism) -> PresheafVerdict:
    c = f.base
    bad = []
    for a in c.arrows:
        C, D = c.cod[a], c.dom[a]
        for x in f.dom(C):
            if f(D, f.dom.act(x, a)) != f.cod.act(f(C, x), a):
                bad.append(f"naturality square for {a} fails at {label(x)}")
                break
    return PresheafVerdict(tuple(bad))


def _build(base: FinCategory, values: dict[str, Iterable], act: Callable[[Hashable, str], Hashable],
           check: bool = False) -> Presheaf:
    vals = {C: v if isinstance(v, FinSet) else FinSet(v) for C, v in values.items()}
    restrict = {a: FinFunction(vals[base.cod[a]], vals[base.dom[a]],
                               {x: act(x, a) for x in vals[base.cod[a]]}, check=check)
                for a in base.arrows}
    return Presheaf(base, vals, restrict, check=check)


def yoneda(c: FinCategory, C: str) -> Presheaf:
    """``y(C) = Hom(-, C)`` with restriction by precomposition."""
    if C not in c.objects:
        raise InputError(f"unknown object {C}")
    return _build(c, {D: c.hom(D, C) for D in c.objects}, lambda beta, a: c.compose(beta, a))


def terminal(c: FinCategory) -> Presheaf:
    return _build(c, {C: ("*",) for C in c.objects}, lambda x, a: x)


def empty(c: FinCategory) -> Presheaf:
    return _build(c, {C: () for C in c.objects}, lambda x, a: x)


def constant(c: FinCategory, elements: Iterable) -> Presheaf:
    els = FinSet(elements)
    return _build(c, {C: els for C in c.objects}, lambda x, a: x)


def _same_base(*ps) -> FinCategory:
    base = ps[0].base
    for p in ps[1:]:
        if p.base != base:
            raise InputError("presheaves live over different bases")
    return base


class Span(NamedTuple):
    obj: Presheaf
    p1: PresheafMorphism
    p2: PresheafMorphism


def product(P: Presheaf, Q: Presheaf) -> Span:
    c = _same_base(P, Q)
    R = _build(c, {C: [(x, y) for x in P(C) for y in Q(C)] for C in c.objects},
               lambda xy, a: (P.act(xy[0], a), Q.act(xy[1], a)))
    return Span(R, _proj(R, P, 0), _proj(R, Q, 1))


def _proj(R: Presheaf, P: Presheaf, i: int) -> PresheafMorphism:
    return PresheafMorphism(R, P, {C: FinFunction(R(C), P(C), {e: e[i] for e in R(C)}, check=False)
                                   for C in R.base.objects}, check=False)


def pullback(f: PresheafMorphism, g: PresheafMorphism) -> Span:
    """Objectwise pullback of ``f: P -> R`` and ``g: Q -> R``."""
    if f.cod != g.cod:
        raise InputError("pullback needs a common codomain")
    c = f.base
    P, Q = f.dom, g.dom
    R = _build(c, {C: [(x, y) for x in P(C) for y in Q(C) if f(C, x) == g(C, y)] for C in c.objects},
               lambda xy, a: (P.act(xy[0], a), Q.act(xy[1], a)))
    return Span(R, _proj(R, P, 0), _proj(R, Q, 1))


def equalizer(f: PresheafMorphism, g: PresheafMorphism) -> tuple[Presheaf, PresheafMorphism]:
    if f.dom != g.dom or f.cod != g.cod:
        raise InputError("equalizer needs parallel morphisms")
    P = f.dom
    E = _build(P.base, {C: [x for x in P(C) if f(C, x) == g(C, x)] for C in P.base.objects}, P.act)
    return E, _inclusion(E, P)


def _inclusion(S: Presheaf, P: Presheaf) -> PresheafMorphism:
    return PresheafMorphism(S, P, {C: FinFunction(S(C), P(C), {x: x for x in S(C)}, check=False)
                                   for C in P.base.objects}, check=False)


def presheaf_sum(P: Presheaf, Q: Presheaf) -> Span:
    """Objectwise disjoint sum with injections; elements are tagged ``(0, x)`` / ``(1, y)``."""
    c = _same_base(P, Q)
    S = _build(c, {C: [(0, x) for x in P(C)] + [(1, y) for y in Q(C)] for C in c.objects},
               lambda e, a: (e[0], (P if e[0] == 0 else Q).act(e[1], a)))
    inl = PresheafMorphism(P, S, {C: {x: (0, x) for x in P(C)} for C in c.objects}, check=False)
    inr = PresheafMorphism(Q, S, {C: {y: (1, y) for y in Q(C)} for C in c.objects}, check=False)
    return Span(S, inl, inr)


def image(f: PresheafMorphism) -> tuple[Presheaf, PresheafMorphism, PresheafMorphism]:
    """Cover/mono factorization ``P -> Im f -> Q``."""
    Q = f.cod
    c = f.base
    vals = {C: f.components[C].image() for C in c.objects}
    for a in c.arrows:
        for y in vals[c.cod[a]]:
            if Q.act(y, a) not in vals[c.dom[a]]:
                raise AssertionError("image is not closed under restriction")
    Im = _build(c, vals, Q.act)
    cover = PresheafMorphism(f.dom, Im, {C: FinFunction(f.dom(C), vals[C], f.components[C].table,
                                                        check=False) for C in c.objects},
                             check=False)
    return Im, cover, _inclusion(Im, Q)


def is_cover(f: PresheafMorphism) -> bool:
    """Cover in presheaves: the image is everything."""
    Im, _, _ = image(f)
    return all(len(Im(C)) == len(f.cod(C)) for C in f.base.objects)


def quotient(r1: PresheafMorphism, r2: PresheafMorphism) -> tuple[Presheaf, PresheafMorphism]:
    """Objectwise quotient by an equivalence relation ``R => P``."""
    if r1.dom != r2.dom or r1.cod != r2.cod:
        raise InputError("relation legs must be parallel")
    P = r1.cod
    c = P.base
    projections = {}
    for C in c.objects:
        try:
            projections[C] = set_quotient(r1.components[C], r2.components[C]).projection
        except InputError as e:
            raise InputError(f"at object {C}: {e}") from None
    vals = {C: projections[C].cod for C in c.objects}

    def act(cls, a):
        return projections[c.dom[a]](P.act(cls, a))

    for a in c.arrows:
        q_src, q_dst = projections[c.cod[a]], projections[c.dom[a]]
        for x in P(c.cod[a]):
            if q_dst(P.act(x, a)) != q_dst(P.act(q_src(x), a)):
                raise InputError("relation is not closed under restriction")
    Qt = _build(c, vals, act)
    return Qt, PresheafMorphism(P, Qt, projections, check=False)


def nat_transformations(
    P: Presheaf,
    Q: Presheaf,
    allowed: Callable[[str, Hashable], Iterable] | None = None,
    counter: Counter | None = None,
) -> Iterator[PresheafMorphism]:
    """Enumerate all natural transformations ``P -> Q``.

    Backtracking over elements of ``P``; each choice is propagated along every
    restriction.  ``allowed(C, x)`` optionally narrows the candidate images of
    ``x ∈ P(C)`` (used for maps over a base).
    """
    c = _same_base(P, Q)
    counter = counter or Counter("nat_transformations")
    into = {C: [(a, c.dom[a]) for a in c.arrows_into(C) if not c.is_identity(a)] for C in c.objects}
    order = sorted(c.objects, key=lambda C: (-len(into[C]), C))
    elems = [(C, x) for C in order for x in P(C)]
    cands = {}
    for C, x in elems:
        cands[(C, x)] = Q(C).elements if allowed is None else canonical(allowed(C, x))
    permitted = None if allowed is None else {k: frozenset(v) for k, v in cands.items()}
    assign: dict = {}

    def propagate(C, x, y, trail) -> bool:
        stack = [(C, x, y)]
        while stack:
            C, x, y = stack.pop()
            key = (C, x)
            if key in assign:
                if assign[key] != y:
                    return False
                continue
            if permitted is not None and y not in permitted[key]:
                return False
            assign[key] = y
            trail.append(key)
            for a, D in into[C]:
                stack.append((D, P.act(x, a), Q.act(y, a)))
        return True

    def rec(i):
        while i < len(elems) and elems[i] in assign:
            i += 1
        if i == len(elems):
            counter.tick()
            comps = {C: FinFunction(P(C), Q(C), {x: assign[(C, x)] for x in P(C)}, check=False)
                     for C in c.objects}
            yield PresheafMorphism(P, Q, comps, check=False)
            return
        C, x = elems[i]
        for y in cands[(C, x)]:
            trail: list = []
            if propagate(C, x, y, trail):
                yield from rec(i + 1)
            for key in trail:
                del assign[key]

    yield from rec(0)


def count_nat(P: Presheaf, Q: Presheaf) -> int:
    return sum(1 for _ in nat_transformations(P, Q))


def _nat_key(theta: PresheafMorphism) -> tuple:
    return tuple((C, tuple(theta.components[C].table[x] for x in theta.dom(C)))
                 for C in theta.base.objects)


def exponential(P: Presheaf, Q: Presheaf) -> Presheaf:
    """``Q^P(C) = Nat(y(C) × P, Q)``, restricted by precomposition with ``y(α) × P``.

    An element is the tuple of component tables of the transformation, keyed by
    ``(β, x)`` with ``β: D -> C``.
    """
    c = _same_base(P, Q)
    vals = {}
    for C in c.objects:
        yP = product(yoneda(c, C), P).obj
        vals[C] = [_as_element(theta) for theta in nat_transformations(yP, Q)]

    def act(elem, a):
        table = dict(elem)
        out = []
        for D in c.objects:
            for beta in c.hom(D, c.dom[a]):
                for x in P(D):
                    out.append(((beta, x), table[(c.compose(a, beta), x)]))
        return tuple(sorted(out, key=lambda kv: sort_key(kv[0])))

    return _build(c, vals, act)


def _as_element(theta: PresheafMorphism) -> tuple:
    out = []
    for C in theta.base.objects:
        for bx, q in theta.components[C].table.items():
            out.append((bx, q))
    return tuple(sorted(out, key=lambda kv: sort_key(kv[0])))


def exponential_adjunction_check(R: Presheaf, P: Presheaf, Q: Presheaf) -> tuple[int, int]:
    """Counts of ``Nat(R × P, Q)`` and ``Nat(R, Q^P)``; currying is a bijection iff equal."""
    left = count_nat(product(R, P).obj, Q)
    right = count_nat(R, exponential(P, Q))
    return left, right


def fiber_presheaf(f: PresheafMorphism, a: Hashable, C: str) -> tuple[Presheaf, PresheafMorphism]:
    """``B_a(D) = {(β: D -> C, b ∈ B(D)) | f(b) = a·β}`` and its projection to ``y(C)``."""
    A, B = f.cod, f.dom
    c = f.base
    if a not in A(C):
        raise InputError(f"{label(a)} is not an element of A({C})")
    vals = {D: [(beta, b) for beta in c.hom(D, C) for b in B(D) if f(D, b) == A.act(a, beta)]
            for D in c.objects}
    Ba = _build(c, vals, lambda e, d: (c.compose(e[0], d), B.act(e[1], d)))
    yC = yoneda(c, C)
    proj = PresheafMorphism(Ba, yC, {D: {e: e[0] for e in Ba(D)} for D in c.objects}, check=False)
    return Ba, proj


def _over(g: PresheafMorphism, target: Callable[[str, Hashable], Hashable]):
    gf = {C: g.components[C].fibers() for C in g.base.objects}

    def allowed(C, x):
        return gf[C].get(target(C, x), ())

    return allowed


def pi_presheaf(f: PresheafMorphism, g: PresheafMorphism) -> PresheafMorphism:
    """``Π_f(g) -> A`` for ``f: B -> A`` and ``g: X -> B``.

    Over ``a ∈ A(C)`` the elements are natural sections ``s: B_a -> X`` of ``g``
    (``g ∘ s`` is the second projection), encoded as ``(a, ((β, b), x), ...)``.
    """
    if g.cod != f.dom:
        raise InputError("pi_presheaf needs g: X -> B with B the domain of f")
    A, X = f.cod, g.dom
    c = f.base
    vals = {}
    for C in c.objects:
        elems = []
        for a in A(C):
            Ba, _ = fiber_presheaf(f, a, C)
            for s in nat_transformations(Ba, X, allowed=_over(g, lambda D, e: e[1])):
                elems.append((a, _as_element(s)))
        vals[C] = elems

    def act(elem, alpha):
        a, s = elem
        table = dict(s)
        a2 = A.act(a, alpha)
        D = c.dom[alpha]
        out = []
        for E in c.objects:
            for beta in c.hom(E, D):
                for b in f.dom(E):
                    if f(E, b) == A.act(a2, beta):
                        out.append(((beta, b), table[(c.compose(alpha, beta), b)]))
        return (a2, tuple(sorted(out, key=lambda kv: sort_key(kv[0]))))

    Pi = _build(c, vals, act)
    return PresheafMorphism(Pi, A, {C: {e: e[0] for e in Pi(C)} for C in c.objects}, check=False)


def pi_adjunction_check(f: PresheafMorphism, g: PresheafMorphism, y: PresheafMorphism) -> tuple[int, int]:
    """Counts of ``Hom_/B(f*Y, X)`` and ``Hom_/A(Y, Π_f X)`` for ``y: Y -> A``."""
    if y.cod != f.cod:
        raise InputError("y must live over the codomain of f")
    pb = pullback(y, f)
    left = sum(1 for _ in nat_transformations(pb.obj, g.dom,
                                              allowed=_over(g, lambda C, e: e[1])))
    pi = pi_presheaf(f, g)
    right = sum(1 for _ in nat_transformations(y.dom, pi.dom,
                                               allowed=_over(pi, lambda C, e: y(C, e))))
    return left, right


def underlying(P: Presheaf) -> FinSet:
    """``|P| = {(x, C) | x ∈ P(C)}``."""
    return FinSet((x, C) for C in P.base.objects for x in P(C))


def underlying_projection(P: Presheaf) -> FinFunction:
    U = underlying(P)
    return FinFunction(U, P.base.objects, {e: e[1] for e in U}, check=False)


def underlying_map(f: PresheafMorphism) -> FinFunction:
    """``|f|: |P| -> |Q|`` over the objects."""
    return FinFunction(underlying(f.dom), underlying(f.cod),
                       {(x, C): (f(C, x), C) for C in f.base.objects for x in f.dom(C)},
                       check=False)


def sieve_presheaf(c: FinCategory, C: str, arrows: Iterable[str]) -> Presheaf:
    """A sieve on ``C`` (a precomposition-closed set of arrows) as a subpresheaf of ``y(C)``."""
    S = frozenset(arrows)
    vals = {D: [b for b in c.hom(D, C) if b in S] for D in c.objects}
    for D in c.objects:
        for b in vals[D]:
            for a in c.arrows_into(D):
                if c.compose(b, a) not in S:
                    raise InputError("not a sieve: not closed under precomposition")
    return _build(c, vals, lambda beta, a: c.compose(beta, a))


def subpresheaves(P: Presheaf) -> Iterator[dict[str, frozenset]]:
    """All restriction-closed families of subsets of ``P``."""
    c = P.base
    objs = list(c.objects)

    def closed(choice):
        for a in c.arrows:
            C, D = c.cod[a], c.dom[a]
            if C in choice and D in choice:
                if any(P.act(x, a) not in choice[D] for x in choice[C]):
                    return False
        return True

    def rec(i, choice):
        if i == len(objs):
            yield dict(choice)
            return
        C = objs[i]
        xs = P(C).elements
        for r in range(len(xs) + 1):
            for sub in itertools.combinations(xs, r):
                choice[C] = frozenset(sub)
                if closed(choice):
                    yield from rec(i + 1, choice)
                del choice[C]

    yield from rec(0, {})


def canonical_form(P: Presheaf) -> tuple:
    """Isomorphism-invariant encoding: the least table encoding over all relabelings."""
    c = P.base
    objs = list(c.objects)
    perms_per = [list(itertools.permutations(P(C).elements)) for C in objs]
    best = None
    for perms in itertools.product(*perms_per):
        pos = {C: {x: i for i, x in enumerate(order)} for C, order in zip(objs, perms)}
        code = tuple(len(P(C)) for C in objs) + tuple(
            tuple(pos[c.dom[a]][P.act(x, a)] for x in order)
            for a in c.arrows for order in [perms[objs.index(c.cod[a])]])
        if best is None or code < best:
            best = code
    return best


def find_isomorphism(P: Presheaf, Q: Presheaf) -> PresheafMorphism | None:
    if P.sizes() != Q.sizes():
        return None
    for theta in nat_transformations(P, Q):
        if theta.is_iso():
            return theta
    return None


def is_isomorphic(P: Presheaf, Q: Presheaf) -> bool:
    return find_isomorphism(P, Q) is not None


def enumerate_presheaves(base: FinCategory, max_size: int, counter: Counter | None = None) -> list[Presheaf]:
    """All presheaves with every value of size ``<= max_size``, one per isomorphism class."""
    return list(iter_presheaves(base, max_size, counter))


def iter_presheaves(base: FinCategory, max_size: int, counter: Counter | None = None) -> Iterator[Presheaf]:
    """Lazy form of :func:`enumerate_presheaves`.

    Values are labelled ``"0", "1", ...``.  Restrictions are assigned arrow by arrow
    and pruned as soon as a composite can be checked.
    """
    counter = counter or Counter("enumerate_presheaves")
    objs = list(base.objects)
    arrows = [a for a in base.arrows if not base.is_identity(a)]
    checks: dict[str, list[tuple[str, str, str]]] = {a: [] for a in arrows}
    pos = {a: i for i, a in enumerate(arrows)}
    for (g, f), gf in base.comp.items():
        if base.is_identity(g) or base.is_identity(f):
            continue
        last = max(pos[g], pos[f], pos.get(gf, -1))
        checks[arrows[last]].append((g, f, gf))
    seen = set()
    for sizes in itertools.product(range(max_size + 1), repeat=len(objs)):
        vals = {C: tuple(str(i) for i in range(n)) for C, n in zip(objs, sizes)}
        assign: dict[str, dict] = {}

        def value(a, x):
            if base.is_identity(a):
                return x
            return assign[a][x]

        def rec(i):
            if i == len(arrows):
                counter.tick()
                restrict = {a: dict(t) for a, t in assign.items()}
                P = Presheaf(base, vals, restrict, check=False)
                key = canonical_form(P)
                if key not in seen:
                    seen.add(key)
                    yield P
                return
            a = arrows[i]
            src, dst = vals[base.cod[a]], vals[base.dom[a]]
            for images in itertools.product(dst, repeat=len(src)):
                assign[a] = dict(zip(src, images))
                ok = True
                for g, f, gf in checks[a]:
                    for x in vals[base.cod[g]]:
                        if value(gf, x) != value(f, value(g, x)):
                            ok = False
                            break
                    if not ok:
                        break
                if ok:
                    yield from rec(i + 1)
                del assign[a]

        yield from rec(0)


def relabeled(P: Presheaf, names: Callable[[str, int], str] | None = None) -> tuple[Presheaf, PresheafMorphism]:
    """An isomorphic copy with string elements, numbered per object in canonical order."""
    names = names or (lambda C, i: str(i))
    ren = {C: {x: names(C, i) for i, x in enumerate(P(C))} for C in P.base.objects}
    Q = _build(P.base, {C: list(ren[C].values()) for C in P.base.objects},
               lambda y, a, inv={C: {v: k for k, v in r.items()} for C, r in ren.items()}:
               ren[P.base.dom[a]][P.act(inv[P.base.cod[a]][y], a)])
    return Q, PresheafMorphism(P, Q, ren, check=False)
