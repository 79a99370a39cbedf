"""Finite sets and functions as a desk-scale Pi-W-pretopos.

Everything here is immutable.  Composite elements are plain tuples (pairs,
tagged summands, dependent functions) or :class:`WTree` terms, ordered by
:func:`toposforge._core.sort_key` so that every construction is reproducible.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Any, Callable, Hashable, Iterable, Iterator, Mapping, NamedTuple

from ._core import Counter, InputError, canonical, label, sort_key

__all__ = [
    "FinSet",
    "FinFunction",
    "Square",
    "Signature",
    "WTree",
    "pullback",
    "image_factorization",
    "is_cover",
    "is_epi",
    "is_quasi_pullback",
    "quotient",
    "equivalence_closure",
    "disjoint_sum",
    "sum_maps",
    "copair",
    "is_disjoint_sum",
    "is_stable_sum",
    "pi_f",
    "pi_adjunction_check",
    "polynomial_apply",
    "polynomial_map",
    "wtype_enumerate",
    "kleene_iterate",
    "tree_of",
    "wtype_saturation",
    "structure_map",
    "subterms",
    "paths_from",
    "is_path",
    "check_wtype_characterization",
    "all_functions",
    "hom_over",
    "sections",
    "nno_signature",
]


class FinSet:
    """A finite set with canonically ordered elements."""

    __slots__ = ("elements", "_members", "_hash")

    def __init__(self, elements: Iterable[Hashable] = ()):
        members = frozenset(elements)
        self._members = members
        self.elements = canonical(members)
        self._hash: int | None = None

    @classmethod
    def of(cls, *elements: Hashable) -> FinSet:
        return cls(elements)

    def __iter__(self) -> Iterator:
        return iter(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def __contains__(self, x: object) -> bool:
        return x in self._members

    def __eq__(self, other: object) -> bool:
        return isinstance(other, FinSet) and self._members == other._members

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self._members)
        return self._hash

    def __le__(self, other: FinSet) -> bool:
        return self._members <= other._members

    def __repr__(self) -> str:
        return "FinSet{" + ", ".join(label(x) for x in self.elements) + "}"

    def sort_key(self) -> tuple:
        return tuple(sort_key(x) for x in self.elements)

    @property
    def members(self) -> frozenset:
        return self._members


class FinFunction:
    """A total function between finite sets, given by its table."""

    __slots__ = ("dom", "cod", "table", "_hash")

    def __init__(self, dom: FinSet, cod: FinSet, table: Mapping | Iterable, check: bool = True):
        table = dict(table)
        if check:
            if set(table) != dom.members:
                missing = [x for x in dom if x not in table]
                extra = [x for x in table if x not in dom]
                raise InputError(
                    f"table must be defined exactly on the domain "
                    f"(missing {[label(x) for x in missing]}, extra {[label(x) for x in extra]})"
                )
            for x, y in table.items():
                if y not in cod:
                    raise InputError(f"value {label(y)} of {label(x)} is outside the codomain")
        self.dom = dom
        self.cod = cod
        self.table = table
        self._hash: int | None = None

    @classmethod
    def identity(cls, X: FinSet) -> FinFunction:
        return cls(X, X, {x: x for x in X}, check=False)

    @classmethod
    def from_callable(cls, dom: FinSet, cod: FinSet, fn: Callable[[Any], Any]) -> FinFunction:
        return cls(dom, cod, {x: fn(x) for x in dom})

    @classmethod
    def constant(cls, dom: FinSet, cod: FinSet, y: Hashable) -> FinFunction:
        return cls(dom, cod, {x: y for x in dom})

    def __call__(self, x: Hashable) -> Any:
        return self.table[x]

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, FinFunction)
            and self.dom == other.dom
            and self.cod == other.cod
            and self.table == other.table
        )

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.dom, self.cod, frozenset(self.table.items())))
        return self._hash

    def __repr__(self) -> str:
        body = ", ".join(f"{label(x)}->{label(self.table[x])}" for x in self.dom)
        return f"FinFunction({body} : {len(self.dom)}->{len(self.cod)})"

    def sort_key(self) -> tuple:
        return (self.dom.sort_key(), self.cod.sort_key(),
                tuple(sort_key(self.table[x]) for x in self.dom))

    def after(self, other: FinFunction) -> FinFunction:
        """``self ∘ other``."""
        if other.cod != self.dom:
            raise InputError("composite undefined: codomain/domain mismatch")
        return FinFunction(other.dom, self.cod, {x: self.table[y] for x, y in other.table.items()},
                           check=False)

    def then(self, other: FinFunction) -> FinFunction:
        """``other ∘ self``."""
        return other.after(self)

    def image(self) -> FinSet:
        return FinSet(self.table.values())

    def is_injective(self) -> bool:
        return len(set(self.table.values())) == len(self.dom)

    def is_surjective(self) -> bool:
        return len(set(self.table.values())) == len(self.cod)

    def is_bijective(self) -> bool:
        return self.is_injective() and self.is_surjective()

    def fiber(self, y: Hashable) -> tuple:
        return tuple(x for x in self.dom if self.table[x] == y)

    def fibers(self) -> dict:
        out: dict = {y: [] for y in self.cod}
        for x in self.dom:
            out[self.table[x]].append(x)
        return {y: tuple(xs) for y, xs in out.items()}

    def fiber_sizes(self) -> tuple[int, ...]:
        """Sorted fibre cardinalities: a complete isomorphism invariant of the arrow."""
        return tuple(sorted(len(xs) for xs in self.fibers().values()))

    def max_fiber(self) -> int:
        return max(self.fiber_sizes(), default=0)

    def inverse(self) -> FinFunction:
        if not self.is_bijective():
            raise InputError("only bijections are invertible")
        return FinFunction(self.cod, self.dom, {y: x for x, y in self.table.items()}, check=False)


class Pullback(NamedTuple):
    obj: FinSet
    p1: FinFunction
    p2: FinFunction


def pullback(f: FinFunction, g: FinFunction) -> Pullback:
    """The pullback of ``f: B -> A`` and ``g: C -> A`` as the set of pairs ``(b, c)``."""
    if f.cod != g.cod:
        raise InputError("pullback needs a common codomain")
    by_value: dict = {}
    for c in g.dom:
        by_value.setdefault(g.table[c], []).append(c)
    pairs = [(b, c) for b in f.dom for c in by_value.get(f.table[b], ())]
    P = FinSet(pairs)
    return Pullback(P,
                    FinFunction(P, f.dom, {p: p[0] for p in P}, check=False),
                    FinFunction(P, g.dom, {p: p[1] for p in P}, check=False))


def image_factorization(f: FinFunction) -> tuple[FinFunction, FinFunction]:
    """Split ``f`` as a surjection onto its range followed by the inclusion."""
    im = f.image()
    cover = FinFunction(f.dom, im, f.table, check=False)
    mono = FinFunction(im, f.cod, {y: y for y in im}, check=False)
    return cover, mono


def is_cover(f: FinFunction) -> bool:
    return f.is_surjective()


def is_epi(f: FinFunction) -> bool:
    """Right-cancellability, tested against all pairs of maps into a two-element set."""
    two = FinSet.of(0, 1)
    tests = list(all_functions(f.cod, two))
    seen: dict = {}
    for h in tests:
        key = tuple(h.table[f.table[x]] for x in f.dom)
        if key in seen and seen[key] != h:
            return False
        seen[key] = h
    return True


@dataclass(frozen=True)
class Square:
    """A square ``top: D -> B``, ``left: D -> C``, ``right: B -> A``, ``bottom: C -> A``."""

    top: FinFunction
    left: FinFunction
    right: FinFunction
    bottom: FinFunction

    def check_boundary(self) -> None:
        if self.top.dom != self.left.dom:
            raise InputError("top and left must share their domain")
        if self.top.cod != self.right.dom or self.left.cod != self.bottom.dom:
            raise InputError("square edges do not meet")
        if self.right.cod != self.bottom.cod:
            raise InputError("right and bottom must share their codomain")

    def commutes(self) -> bool:
        self.check_boundary()
        return all(self.right(self.top(d)) == self.bottom(self.left(d)) for d in self.top.dom)

    def comparison(self) -> FinFunction:
        """The induced map ``D -> B x_A C``."""
        if not self.commutes():
            raise InputError("square does not commute")
        P = pullback(self.right, self.bottom).obj
        return FinFunction(self.top.dom, P, {d: (self.top(d), self.left(d)) for d in self.top.dom},
                           check=False)

    def is_pullback(self) -> bool:
        return self.comparison().is_bijective()


def is_quasi_pullback(sq: Square) -> bool:
    return sq.comparison().is_surjective()


class Quotient(NamedTuple):
    obj: FinSet
    projection: FinFunction


def _relation_pairs(r1: FinFunction, r2: FinFunction) -> set:
    if r1.dom != r2.dom or r1.cod != r2.cod:
        raise InputError("relation legs must share domain and codomain")
    return {(r1(r), r2(r)) for r in r1.dom}


def check_equivalence_relation(r1: FinFunction, r2: FinFunction) -> list[str]:
    """Names of the equivalence-relation axioms that ``(r1, r2)`` violates."""
    pairs = _relation_pairs(r1, r2)
    X = r1.cod
    failed = []
    if len(pairs) != len(r1.dom):
        failed.append("jointly monic")
    if any((x, x) not in pairs for x in X):
        failed.append("reflexive")
    if any((y, x) not in pairs for x, y in pairs):
        failed.append("symmetric")
    if any((x, z) not in pairs for x, y in pairs for y2, z in pairs if y == y2):
        failed.append("transitive")
    return failed


def quotient(r1: FinFunction, r2: FinFunction) -> Quotient:
    """``X/R`` for an equivalence relation ``R => X``; classes are named by their least member."""
    failed = check_equivalence_relation(r1, r2)
    if failed:
        raise InputError("not an equivalence relation: fails " + ", ".join(failed))
    X = r1.cod
    pairs = _relation_pairs(r1, r2)
    rep = {}
    for x in X:
        rep[x] = min((y for y in X if (x, y) in pairs), key=sort_key)
    Q = FinSet(rep.values())
    q = FinFunction(X, Q, rep, check=False)
    kernel = pullback(q, q).obj
    # X/R must be effective: its kernel pair is R again, and q coequalizes r1, r2.
    assert kernel.members == frozenset(pairs)
    assert all(q(r1(r)) == q(r2(r)) for r in r1.dom)
    return Quotient(Q, q)


def equivalence_closure(X: FinSet, pairs: Iterable[tuple]) -> tuple[FinFunction, FinFunction]:
    """Least equivalence relation on ``X`` containing ``pairs``, as two legs out of a set of pairs."""
    parent = {x: x for x in X}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for x, y in pairs:
        if x not in X or y not in X:
            raise InputError("relation pair outside the carrier")
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[rx] = ry
    R = FinSet((x, y) for x in X for y in X if find(x) == find(y))
    return (FinFunction(R, X, {p: p[0] for p in R}, check=False),
            FinFunction(R, X, {p: p[1] for p in R}, check=False))


class Sum(NamedTuple):
    obj: FinSet
    inl: FinFunction
    inr: FinFunction


def disjoint_sum(X: FinSet, Y: FinSet) -> Sum:
    """Tagged union ``X + Y`` with elements ``(0, x)`` and ``(1, y)``."""
    S = FinSet([(0, x) for x in X] + [(1, y) for y in Y])
    return Sum(S,
               FinFunction(X, S, {x: (0, x) for x in X}, check=False),
               FinFunction(Y, S, {y: (1, y) for y in Y}, check=False))


def sum_maps(f: FinFunction, g: FinFunction) -> FinFunction:
    """``f + g : B + B' -> A + A'``."""
    dom = disjoint_sum(f.dom, g.dom).obj
    cod = disjoint_sum(f.cod, g.cod).obj
    table = {(0, x): (0, f(x)) for x in f.dom}
    table.update({(1, x): (1, g(x)) for x in g.dom})
    return FinFunction(dom, cod, table, check=False)


def copair(f: FinFunction, g: FinFunction) -> FinFunction:
    """``[f, g] : B + B' -> A`` for maps with a common codomain."""
    if f.cod != g.cod:
        raise InputError("copairing needs a common codomain")
    dom = disjoint_sum(f.dom, g.dom).obj
    table = {(0, x): f(x) for x in f.dom}
    table.update({(1, x): g(x) for x in g.dom})
    return FinFunction(dom, f.cod, table, check=False)


def is_disjoint_sum(inl: FinFunction, inr: FinFunction) -> bool:
    """Both legs mono, their intersection empty, and jointly covering."""
    if inl.cod != inr.cod:
        return False
    if not (inl.is_injective() and inr.is_injective()):
        return False
    if len(pullback(inl, inr).obj):
        return False
    return inl.image().members | inr.image().members == inl.cod.members


def is_stable_sum(inl: FinFunction, inr: FinFunction, h: FinFunction) -> bool:
    """Pulling the sum back along ``h: Z -> X+Y`` yields a sum decomposition of ``Z``."""
    if h.cod != inl.cod:
        raise InputError("h must land in the sum")
    p = pullback(h, inl)
    q = pullback(h, inr)
    return is_disjoint_sum(p.p1, q.p1)


def all_functions(X: FinSet, Y: FinSet) -> Iterator[FinFunction]:
    xs = X.elements
    for values in itertools.product(Y.elements, repeat=len(xs)):
        yield FinFunction(X, Y, dict(zip(xs, values)), check=False)


def hom_over(u: FinFunction, v: FinFunction) -> Iterator[FinFunction]:
    """All maps ``h: dom u -> dom v`` with ``v ∘ h = u``."""
    if u.cod != v.cod:
        raise InputError("hom_over needs maps into a common base")
    vf = v.fibers()
    xs = u.dom.elements
    for values in itertools.product(*(vf[u(x)] for x in xs)):
        yield FinFunction(u.dom, v.dom, dict(zip(xs, values)), check=False)


def sections(g: FinFunction) -> Iterator[FinFunction]:
    """All ``s`` with ``g ∘ s = id``."""
    return hom_over(FinFunction.identity(g.cod), g)


def pi_f(f: FinFunction, g: FinFunction) -> FinFunction:
    """Dependent product ``Pi_f(g) -> A`` for ``f: B -> A`` and ``g: X -> B``.

    The fibre over ``a`` consists of the sections of ``g`` over ``B_a``, encoded
    as ``(a, ((b, x), ...))``.
    """
    if g.cod != f.dom:
        raise InputError("pi_f needs g: X -> B with B the domain of f")
    gf = g.fibers()
    ff = f.fibers()
    elems = []
    for a in f.cod:
        bs = ff[a]
        for choice in itertools.product(*(gf[b] for b in bs)):
            elems.append((a, tuple(zip(bs, choice))))
    P = FinSet(elems)
    return FinFunction(P, f.cod, {e: e[0] for e in P}, check=False)


def pi_adjunction_check(f: FinFunction, g: FinFunction, y: FinFunction) -> tuple[int, int, bool]:
    """Compare ``Hom_/B(f*Y, X)`` with ``Hom_/A(Y, Pi_f X)`` for ``y: Y -> A``.

    Returns both counts and whether transposition is a bijection between them.
    """
    if y.cod != f.cod:
        raise InputError("y must live over the codomain of f")
    pb = pullback(y, f)  # elements (y_elem, b)
    over_b = pb.p2
    left = list(hom_over(over_b, g))
    pi = pi_f(f, g)
    right = set(hom_over(y, pi))
    ff = f.fibers()
    transposed = set()
    for phi in left:
        table = {}
        for e in y.dom:
            a = y(e)
            table[e] = (a, tuple((b, phi((e, b))) for b in ff[a]))
        transposed.add(FinFunction(y.dom, pi.dom, table, check=False))
    bijective = len(transposed) == len(left) and transposed == right
    return len(left), len(right), bijective


class Signature:
    """A map ``f: B -> A`` read as a signature: constructor ``a`` has arity ``B_a``."""

    __slots__ = ("f", "_fibers")

    def __init__(self, f: FinFunction):
        self.f = f
        self._fibers = f.fibers()

    @property
    def A(self) -> FinSet:
        return self.f.cod

    @property
    def B(self) -> FinSet:
        return self.f.dom

    def arity(self, a: Hashable) -> tuple:
        return self._fibers[a]

    def __repr__(self) -> str:
        return "Signature(" + ", ".join(f"{label(a)}/{len(self._fibers[a])}" for a in self.A) + ")"


def nno_signature() -> Signature:
    """The sum inclusion ``1 -> 1 + 1`` with summands named ``z`` and ``s``."""
    one = FinSet.of("p")
    return Signature(FinFunction(one, FinSet.of("z", "s"), {"p": "s"}))


class WTree:
    """A well-founded term ``sup_head(children)``; ``children`` maps arity elements to subterms."""

    __slots__ = ("head", "children", "_index", "_hash", "_key", "height")

    def __init__(self, head: Hashable, children: Mapping | Iterable = ()):
        items = children.items() if isinstance(children, Mapping) else children
        self.children = tuple(sorted(items, key=lambda kv: sort_key(kv[0])))
        self.head = head
        self._index: dict | None = None
        self._hash: int | None = None
        self._key: tuple | None = None
        self.height = 1 + max((c.height for _, c in self.children), default=0)

    def child(self, b: Hashable) -> WTree:
        if self._index is None:
            self._index = dict(self.children)
        return self._index[b]

    def arity(self) -> tuple:
        return tuple(b for b, _ in self.children)

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        return (isinstance(other, WTree) and hash(self) == hash(other)
                and self.head == other.head and self.children == other.children)

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.head, self.children))
        return self._hash

    def sort_key(self) -> tuple:
        if self._key is None:
            self._key = (self.height, sort_key(self.head),
                         tuple((sort_key(b), c.sort_key()) for b, c in self.children))
        return self._key

    def label(self) -> str:
        if not self.children:
            return label(self.head)
        inner = ",".join(f"{label(b)}:{c.label()}" for b, c in self.children)
        return f"{label(self.head)}[{inner}]"

    def __repr__(self) -> str:
        return f"WTree({self.label()})"


def is_term_of(sig: Signature, w: WTree) -> bool:
    if w.head not in sig.A:
        return False
    if w.arity() != tuple(canonical(sig.arity(w.head))):
        return False
    return all(is_term_of(sig, c) for _, c in w.children)


def polynomial_apply(sig: Signature, X: FinSet) -> FinSet:
    """``P_f(X) = Σ_a X^{B_a}``; elements ``(a, ((b, x), ...))``."""
    out = []
    for a in sig.A:
        bs = sig.arity(a)
        for values in itertools.product(X.elements, repeat=len(bs)):
            out.append((a, tuple(zip(bs, values))))
    return FinSet(out)


def polynomial_map(sig: Signature, h: FinFunction) -> FinFunction:
    """Action of ``P_f`` on a map ``h: X -> Y``."""
    dom = polynomial_apply(sig, h.dom)
    cod = polynomial_apply(sig, h.cod)
    return FinFunction(dom, cod,
                       {(a, t): (a, tuple((b, h(x)) for b, x in t)) for a, t in dom},
                       check=False)


def wtype_enumerate(sig: Signature, depth: int) -> FinSet:
    """All terms of height at most ``depth``."""
    if depth < 1:
        raise InputError("depth must be at least 1")
    counter = Counter("wtype_enumerate")
    level: list[WTree] = []
    for _ in range(depth):
        nxt = []
        for a in sig.A:
            bs = canonical(sig.arity(a))
            for kids in itertools.product(level, repeat=len(bs)):
                counter.tick()
                nxt.append(WTree(a, zip(bs, kids)))
        level = nxt
    return FinSet(level)


def kleene_iterate(sig: Signature, depth: int) -> list[FinSet]:
    """``[P_f^0(∅), ..., P_f^depth(∅)]`` built with :func:`polynomial_apply`."""
    out = [FinSet()]
    for _ in range(depth):
        out.append(polynomial_apply(sig, out[-1]))
    return out


def tree_of(element: tuple) -> WTree:
    """Canonical bijection from Kleene-iterate elements ``(a, t)`` to terms."""
    a, t = element
    return WTree(a, [(b, tree_of(x)) for b, x in t])


def wtype_saturation(sig: Signature, max_depth: int) -> int | None:
    """Least ``d <= max_depth`` with ``W_d = W_{d+1}`` (the W-type is then finite), else ``None``."""
    prev = 0
    for d in range(1, max_depth + 2):
        n = len(wtype_enumerate(sig, d))
        if d > 1 and n == prev:
            return d - 1
        prev = n
    return None


def structure_map(sig: Signature, V: FinSet) -> FinFunction:
    """``sup: P_f(V) -> V`` for a set of terms closed under ``sup``."""
    dom = polynomial_apply(sig, V)
    table = {}
    for a, t in dom:
        w = WTree(a, t)
        if w not in V:
            raise InputError(f"{w.label()} is not in the carrier; it is not closed under sup")
        table[(a, t)] = w
    return FinFunction(dom, V, table, check=False)


def subterms(w: WTree) -> FinSet:
    seen = {w}
    stack = [w]
    while stack:
        v = stack.pop()
        for _, c in v.children:
            if c not in seen:
                seen.add(c)
                stack.append(c)
    return FinSet(seen)


def paths_from(w: WTree) -> Iterator[tuple]:
    """All paths ``<w_0, b_0, ..., w_n>`` starting at ``w``."""
    yield (w,)
    for b, c in w.children:
        for rest in paths_from(c):
            yield (w, b) + rest


def is_path(sig: Signature, seq: tuple) -> bool:
    if len(seq) % 2 == 0:
        return False
    for i in range(0, len(seq) - 1, 2):
        w, b, nxt = seq[i], seq[i + 1], seq[i + 2]
        if not isinstance(w, WTree) or b not in sig.B:
            return False
        if sig.f(b) != w.head:
            return False
        if b not in w.arity() or w.child(b) != nxt:
            return False
    return isinstance(seq[-1], WTree)


@dataclass(frozen=True)
class CharacterizationVerdict:
    m_iso: bool
    no_proper_subalgebra: bool
    least_subalgebra: FinSet
    iterations: int

    @property
    def is_wtype(self) -> bool:
        return self.m_iso and self.no_proper_subalgebra


def check_wtype_characterization(sig: Signature, V: FinSet, m: FinFunction,
                                 depth: int | None = None) -> CharacterizationVerdict:
    """Decide whether ``(V, m)`` is the (finite) W-type of ``sig``.

    ``m`` must be a map ``P_f(V) -> V``.  The least subalgebra is computed by
    closing the empty set under ``m``; ``depth`` caps the number of rounds.
    """
    expected = polynomial_apply(sig, V)
    if m.dom != expected or m.cod != V:
        raise InputError("m must be a map P_f(V) -> V")
    limit = len(V) + 1 if depth is None else depth
    K: frozenset = frozenset()
    rounds = 0
    while rounds < limit:
        nxt = frozenset(m(x) for x in expected if all(v in K for _, v in x[1]))
        rounds += 1
        if nxt == K:
            break
        K = nxt
    return CharacterizationVerdict(m.is_bijective(), K == V.members, FinSet(K), rounds)
