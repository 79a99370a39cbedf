"""Classes of small maps, checked over a finite probe.

Axiom quantifiers range over a :class:`ProbeUniverse` of finite sets (or a
:class:`PresheafProbe` / :class:`SheafProbe` for induced classes).  Every
verdict names its probe, counts instances per axiom and marks whether each
failure lives entirely inside the probe.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Hashable, Iterable, Mapping, Sequence

from ._core import InputError, canonical, label, sort_key
from .cat import FinCategory
from .finset import (
    FinFunction,
    FinSet,
    Signature,
    Square,
    all_functions,
    copair,
    disjoint_sum,
    is_cover,
    is_quasi_pullback,
    pi_f,
    pullback as set_pullback,
    quotient as set_quotient,
    sections,
    sum_maps,
    wtype_enumerate,
    wtype_saturation,
)
from .presheaf import (
    Presheaf,
    PresheafMorphism,
    enumerate_presheaves,
    nat_transformations,
    presheaf_sum,
    pullback as psh_pullback,
    underlying_map,
)
from .site import CoveringFamily, Site, has_small_covers, is_collection_site, is_collection_span

__all__ = [
    "MapClass",
    "FiberBound",
    "AllMaps",
    "Explicit",
    "Predicate",
    "InducedClass",
    "ProbeUniverse",
    "PresheafProbe",
    "SheafProbe",
    "Failure",
    "AxiomVerdict",
    "check_stable",
    "check_locally_full",
    "check_pi_w_closure",
    "UniversalMap",
    "Representation",
    "find_representation",
    "CAVerdict",
    "check_collection_axiom",
    "CollectionSpanData",
    "collsp_construct",
    "EquivalentSite",
    "equiv_collection_site",
    "induce_presheaf_class",
    "induce_sheaf_class",
    "synthesize_class",
]


# ---------------------------------------------------------------- classes


class MapClass:
    """A decidable class of maps; subclasses provide ``name`` and ``contains``."""

    def contains(self, f) -> bool:
        raise NotImplementedError

    def __contains__(self, f) -> bool:
        return self.contains(f)

    def __repr__(self) -> str:
        return self.name


@dataclass(frozen=True, repr=False)
class FiberBound(MapClass):
    """Maps all of whose fibers have at most ``bound`` elements."""

    bound: int

    def __post_init__(self):
        if self.bound < 0:
            raise InputError("fiber bound must be non-negative")

    @property
    def name(self) -> str:
        return f"fiber_bound({self.bound})"

    def contains(self, f: FinFunction) -> bool:
        return f.max_fiber() <= self.bound


@dataclass(frozen=True, repr=False)
class AllMaps(MapClass):
    name: str = "all"

    def contains(self, f) -> bool:
        return True


@dataclass(frozen=True, repr=False)
class Explicit(MapClass):
    """The listed maps, closed under isomorphism of maps (same multiset of fiber sizes)."""

    maps: tuple[FinFunction, ...]

    @property
    def name(self) -> str:
        return f"explicit({len(self.maps)} maps)"

    @cached_property
    def _profiles(self) -> frozenset:
        return frozenset(f.fiber_sizes() for f in self.maps)

    def contains(self, f: FinFunction) -> bool:
        return f.fiber_sizes() in self._profiles


@dataclass(frozen=True, repr=False)
class Predicate(MapClass):
    name: str
    test: Callable[[FinFunction], bool] = field(compare=False)

    def contains(self, f: FinFunction) -> bool:
        return bool(self.test(f))


@dataclass(frozen=True, repr=False)
class InducedClass(MapClass):
    """``f`` is small iff ``Σ_{C0} |f|`` belongs to ``base``."""

    base: MapClass
    category: FinCategory = field(compare=False)
    kind: str = "presheaf"
    warnings: tuple[str, ...] = ()

    @property
    def name(self) -> str:
        return f"induced_{self.kind}({self.base.name})"

    def contains(self, f: PresheafMorphism) -> bool:
        return self.base.contains(underlying_map(f))


def _cod_warning(S: MapClass, c: FinCategory) -> tuple[str, ...]:
    if S.contains(c.cod_map()):
        return ()
    return (f"cod: C1 -> C0 is not small for {S.name}; the transfer hypothesis is unmet",)


def induce_presheaf_class(S: MapClass, base: FinCategory) -> InducedClass:
    """Pointwise-small presheaf morphisms; warns when ``cod`` is not small."""
    return InducedClass(S, base, "presheaf", _cod_warning(S, base))


def induce_sheaf_class(S: MapClass, s: Site) -> InducedClass:
    """Pointwise-small sheaf morphisms; warns when ``cod`` is not small."""
    return InducedClass(S, s.base, "sheaf", _cod_warning(S, s.base))


def synthesize_class(maps: Iterable[FinFunction]) -> FiberBound:
    """The least fiber-bound class containing the given maps."""
    return FiberBound(max((f.max_fiber() for f in maps), default=0))


# ---------------------------------------------------------------- probes


class ProbeUniverse:
    """All subsets of ``{"0", ..., "N-1"}`` and all functions among them.

    ``extended_into(B)`` supplies canonical maps into ``B`` with fibers of
    size up to ``N``; their domains may exceed the carrier, and instances using
    them are marked as leaving the probe.
    """

    def __init__(self, carrier: int):
        if carrier < 0:
            raise InputError("carrier size must be non-negative")
        self.carrier = carrier
        labels = [str(i) for i in range(carrier)]
        self._objects = tuple(FinSet(sub) for r in range(carrier + 1)
                              for sub in itertools.combinations(labels, r))
        self._maps = tuple(f for X in self._objects for Y in self._objects for f in all_functions(X, Y))
        into: dict[FinSet, list] = {X: [] for X in self._objects}
        out: dict[FinSet, list] = {X: [] for X in self._objects}
        for f in self._maps:
            into[f.cod].append(f)
            out[f.dom].append(f)
        self._into = {k: tuple(v) for k, v in into.items()}
        self._out = {k: tuple(v) for k, v in out.items()}

    @property
    def name(self) -> str:
        return f"finset probe, carrier {self.carrier}"

    def objects(self) -> tuple[FinSet, ...]:
        return self._objects

    def maps(self) -> tuple[FinFunction, ...]:
        return self._maps

    def maps_into(self, A: FinSet) -> tuple[FinFunction, ...]:
        return self._into.get(A, ())

    def maps_out(self, B: FinSet) -> tuple[FinFunction, ...]:
        return self._out.get(B, ())

    def extended_into(self, B: FinSet) -> tuple[FinFunction, ...]:
        out = []
        for sizes in itertools.product(range(self.carrier + 1), repeat=len(B)):
            dom = FinSet((b, j) for b, n in zip(B, sizes) for j in range(n))
            if len(dom) <= self.carrier:
                continue
            out.append(FinFunction(dom, B, {e: e[0] for e in dom}, check=False))
        return tuple(out)

    def size(self, X: FinSet) -> int:
        return len(X)

    @staticmethod
    def dom(f):
        return f.dom

    @staticmethod
    def cod(f):
        return f.cod

    @staticmethod
    def pullback(f, g):
        return set_pullback(f, g)

    @staticmethod
    def is_epi(f) -> bool:
        return f.is_surjective()

    @staticmethod
    def sum_maps(f, g):
        return sum_maps(f, g)

    @staticmethod
    def compose(g, f):
        return g.after(f)

    @staticmethod
    def identity(X):
        return FinFunction.identity(X)

    @staticmethod
    def diagonal(f):
        kp = set_pullback(f, f).obj
        return FinFunction(f.dom, kp, {x: (x, x) for x in f.dom}, check=False)

    @staticmethod
    def describe(f) -> str:
        return f"{label(tuple(f.dom))}->{label(tuple(f.cod))} {{{', '.join(f'{label(x)}:{label(f(x))}' for x in f.dom)}}}"


class PresheafProbe:
    """Presheaves with values of size ``<= carrier`` (up to iso) and all morphisms among them."""

    kind = "presheaf"

    def __init__(self, base: FinCategory, carrier: int):
        self.base = base
        self.carrier = carrier
        self._objects = tuple(self._make_objects())
        self._maps = tuple(m for P in self._objects for Q in self._objects
                           for m in nat_transformations(P, Q))
        into: dict = {P: [] for P in self._objects}
        out: dict = {P: [] for P in self._objects}
        for m in self._maps:
            into[m.cod].append(m)
            out[m.dom].append(m)
        self._into = {k: tuple(v) for k, v in into.items()}
        self._out = {k: tuple(v) for k, v in out.items()}

    def _make_objects(self):
        return enumerate_presheaves(self.base, self.carrier)

    @property
    def name(self) -> str:
        return f"{self.kind} probe, carrier {self.carrier}"

    def objects(self):
        return self._objects

    def maps(self):
        return self._maps

    def maps_into(self, A):
        return self._into.get(A, ())

    def maps_out(self, B):
        return self._out.get(B, ())

    def extended_into(self, B):
        return ()

    def size(self, X: Presheaf) -> int:
        return max((len(v) for v in X.values.values()), default=0)

    @staticmethod
    def dom(f):
        return f.dom

    @staticmethod
    def cod(f):
        return f.cod

    @staticmethod
    def pullback(f, g):
        return psh_pullback(f, g)

    def is_epi(self, f) -> bool:
        return f.is_epi()

    def sum_maps(self, f, g):
        src, i1, i2 = presheaf_sum(f.dom, g.dom)
        tgt, j1, j2 = presheaf_sum(f.cod, g.cod)
        comps = {C: {(0, x): (0, f(C, x)) for x in f.dom(C)} | {(1, y): (1, g(C, y)) for y in g.dom(C)}
                 for C in self.base.objects}
        return PresheafMorphism(src, tgt, comps, check=False)

    @staticmethod
    def compose(g, f):
        return g.after(f)

    @staticmethod
    def identity(X):
        return PresheafMorphism.identity(X)

    @staticmethod
    def diagonal(f):
        kp = psh_pullback(f, f).obj
        return PresheafMorphism(f.dom, kp, {C: {x: (x, x) for x in f.dom(C)} for C in f.base.objects},
                                check=False)

    @staticmethod
    def describe(f) -> str:
        return f"{f.dom!r} -> {f.cod!r}"


class SheafProbe(PresheafProbe):
    """Sheaves with values of size ``<= carrier``; epis are the locally surjective maps."""

    kind = "sheaf"

    def __init__(self, site: Site, carrier: int):
        from .sheaf import sieve_topology_fixpoint

        self.site = site
        self._J = sieve_topology_fixpoint(site)
        self._cache: dict = {}
        self._sheaves: dict = {}
        super().__init__(site.base, carrier)

    def _make_objects(self):
        from .sheaf import is_sheaf

        return [P for P in enumerate_presheaves(self.base, self.carrier) if is_sheaf(P, self.site)]

    def is_epi(self, f) -> bool:
        from .sheaf import is_locally_surjective

        return is_locally_surjective(f, self.site)

    def _is_sheaf(self, P: Presheaf) -> bool:
        from .sheaf import is_j_sheaf

        if P not in self._sheaves:
            self._sheaves[P] = is_j_sheaf(P, self._J)
        return self._sheaves[P]

    def _sheafify(self, P: Presheaf):
        from .sheaf import sheafify

        if P not in self._cache:
            self._cache[P] = sheafify(P, self._J)
        return self._cache[P]

    def sum_maps(self, f, g):
        from .sheaf import sheafify_map

        raw = super().sum_maps(f, g)
        if self._is_sheaf(raw.dom) and self._is_sheaf(raw.cod):
            return raw
        return sheafify_map(raw, self._J, self._sheafify(raw.dom), self._sheafify(raw.cod))


# ---------------------------------------------------------------- verdicts


@dataclass(frozen=True)
class Failure:
    axiom: str
    witness: str
    within_probe: bool


@dataclass
class AxiomVerdict:
    """Per-axiom instance and failure counts over a named probe."""

    probe: str
    klass: str
    instances: dict[str, int] = field(default_factory=dict)
    failure_counts: dict[str, int] = field(default_factory=dict)
    outside_probe: dict[str, int] = field(default_factory=dict)
    failures: list[Failure] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    keep: int = 5

    def _start(self, axiom: str) -> None:
        self.instances.setdefault(axiom, 0)
        self.failure_counts.setdefault(axiom, 0)
        self.outside_probe.setdefault(axiom, 0)

    def record(self, axiom: str, ok: bool, within: bool, witness: Callable[[], str]) -> None:
        self.instances[axiom] += 1
        if not within:
            self.outside_probe[axiom] += 1
        if not ok:
            self.failure_counts[axiom] += 1
            if sum(1 for f in self.failures if f.axiom == axiom and f.within_probe == within) < self.keep:
                self.failures.append(Failure(axiom, witness(), within))

    def passed(self, axiom: str | None = None) -> bool:
        axioms = [axiom] if axiom else list(self.instances)
        return all(self.failure_counts.get(a, 0) == 0 for a in axioms)

    def passed_within_probe(self, axiom: str | None = None) -> bool:
        return not any(f.within_probe and (axiom is None or f.axiom == axiom) for f in self.failures)

    def witnesses(self, axiom: str) -> list[Failure]:
        return [f for f in self.failures if f.axiom == axiom]

    @property
    def ok(self) -> bool:
        return self.passed()

    def summary(self) -> dict:
        return {
            "probe": self.probe,
            "class": self.klass,
            "axioms": {a: {"instances": self.instances[a], "failures": self.failure_counts[a],
                           "outside_probe": self.outside_probe[a]} for a in self.instances},
            "witnesses": [{"axiom": f.axiom, "witness": f.witness, "within_probe": f.within_probe}
                          for f in self.failures],
            "notes": list(self.notes),
        }


# ---------------------------------------------------------------- stability


def check_stable(S: MapClass, P) -> AxiomVerdict:
    """S1 (pullback), S2 (descent along epis) and S3 (sums), exhaustively over ``P``."""
    v = AxiomVerdict(P.name, S.name)
    n = P.carrier
    for ax in ("S1", "S2", "S3"):
        v._start(ax)
    for A in P.objects():
        into = P.maps_into(A)
        for f in into:
            f_small = S.contains(f)
            for g in into:
                pb, p1, p2 = P.pullback(f, g)
                within = P.size(pb) <= n
                g_small = S.contains(p2)
                if f_small:
                    v.record("S1", g_small, within,
                             lambda: f"f = {P.describe(f)} small, pullback along {P.describe(g)} is not")
                if P.is_epi(g) and g_small:
                    v.record("S2", f_small, within,
                             lambda: f"pullback of {P.describe(f)} along epi {P.describe(g)} small, f is not")
    small = [f for f in P.maps() if S.contains(f)]
    for f, g in itertools.product(small, small):
        s = P.sum_maps(f, g)
        within = P.size(P.dom(s)) <= n and P.size(P.cod(s)) <= n
        v.record("S3", S.contains(s), within,
                 lambda: f"{P.describe(f)} + {P.describe(g)} is not small")
    return v


@dataclass
class LocallyFullVerdict(AxiomVerdict):
    identities_small: bool = False
    split_applicable: bool = False

    @property
    def s4(self) -> bool:
        return self.passed("S4")

    @property
    def s4a(self) -> bool:
        return self.passed("S4a")

    @property
    def s4b(self) -> bool:
        return self.passed("S4b")

    @property
    def split_agrees(self) -> bool | None:
        """S4 ⇔ S4a ∧ S4b, reported only where identities are small and S1 holds."""
        if not self.split_applicable:
            return None
        return self.s4 == (self.s4a and self.s4b)


def check_locally_full(S: MapClass, P, stable: AxiomVerdict | None = None) -> LocallyFullVerdict:
    """S4 on every commuting triangle ``h = f ∘ g`` with ``f`` small, plus S4a and S4b."""
    v = LocallyFullVerdict(P.name, S.name)
    n = P.carrier
    for ax in ("S4", "S4a", "S4b"):
        v._start(ax)
    for B in P.objects():
        firsts = P.maps_into(B) + tuple(P.extended_into(B))
        for f in P.maps_out(B):
            f_small = S.contains(f)
            for g in firsts:
                h = P.compose(f, g)
                within = P.size(P.dom(g)) <= n
                g_small, h_small = S.contains(g), S.contains(h)
                if f_small:
                    v.record("S4", g_small == h_small, within,
                             lambda: (f"f = {P.describe(f)} small, g = {P.describe(g)} "
                                      f"{'small' if g_small else 'not small'}, f∘g "
                                      f"{'small' if h_small else 'not small'}"))
                    if g_small:
                        v.record("S4a", h_small, within,
                                 lambda: (f"f = {P.describe(f)} and g = {P.describe(g)} small, "
                                          f"composite fibers {h.fiber_sizes() if hasattr(h, 'fiber_sizes') else ''}"))
    for f in P.maps():
        if S.contains(f):
            d = P.diagonal(f)
            v.record("S4b", S.contains(d), P.size(P.cod(d)) <= n,
                     lambda: f"diagonal of {P.describe(f)} is not small")
    v.identities_small = all(S.contains(P.identity(X)) for X in P.objects())
    stable = stable or check_stable(S, P)
    v.split_applicable = v.identities_small and stable.passed("S1")
    return v


# ---------------------------------------------------------------- ΠW closure


def _partitions_within(f: FinFunction):
    """Equivalence relations on ``dom f`` contained in the kernel of ``f``."""
    blocks_per_fiber = []
    for y, fib in f.fibers().items():
        blocks_per_fiber.append(list(_set_partitions(list(fib))))
    for choice in itertools.product(*blocks_per_fiber):
        yield [blk for part in choice for blk in part]


def _set_partitions(xs):
    if not xs:
        yield []
        return
    head, rest = xs[0], xs[1:]
    for part in _set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[head] + part[i]] + part[i + 1:]
        yield [[head]] + part


def check_pi_w_closure(S: MapClass, P: ProbeUniverse, w_depth: int | None = None) -> AxiomVerdict:
    """Closure of each slice of small maps under sums, quotients, ``Π`` and finite W-types.

    ``Π_f(g)`` is tried with ``g`` ranging over probe maps and the extended maps
    of the probe.  W-types are only available when they are finite, so
    signatures with an infinite W-type are skipped and counted in a note.
    """
    v = AxiomVerdict(P.name, S.name)
    n = P.carrier
    for ax in ("sum", "quotient", "pi", "W"):
        v._start(ax)
    for X in P.objects():
        small = [f for f in P.maps_into(X) if S.contains(f)]
        for f, g in itertools.product(small, small):
            s = copair(f, g)
            v.record("sum", S.contains(s), len(s.dom) <= n,
                     lambda: f"[{P.describe(f)}, {P.describe(g)}] is not small")
        for f in small:
            for blocks in _partitions_within(f):
                pairs = [(a, b) for blk in blocks for a in blk for b in blk]
                R = FinSet(pairs)
                r1 = FinFunction(R, f.dom, {p: p[0] for p in R}, check=False)
                r2 = FinFunction(R, f.dom, {p: p[1] for p in R}, check=False)
                Q, q = set_quotient(r1, r2)
                induced = FinFunction(Q, X, {cls: f(cls) for cls in Q}, check=False)
                v.record("quotient", S.contains(induced), True,
                         lambda: f"quotient of {P.describe(f)} is not small")
    for A in P.objects():
        for f in P.maps_into(A):
            if not S.contains(f):
                continue
            B = f.dom
            for g in P.maps_into(B) + P.extended_into(B):
                if not S.contains(g):
                    continue
                pi = pi_f(f, g)
                within = len(g.dom) <= n and len(pi.dom) <= n
                v.record("pi", S.contains(pi), within,
                         lambda: (f"Π_f(g) for f = {P.describe(f)}, g with fibers {g.fiber_sizes()}: "
                                  f"fibers {pi.fiber_sizes()}"))
    skipped = 0
    one = FinSet(["*"])
    for f in P.maps():
        A, B = f.cod, f.dom
        if not (S.contains(FinFunction.constant(A, one, "*")) and S.contains(FinFunction.constant(B, one, "*"))):
            continue
        sig = Signature(f)
        arities = {len(sig.arity(a)) for a in A}
        # With a nullary and a non-nullary constructor the W-type is infinite.
        if 0 in arities and len(arities) > 1:
            skipped += 1
            continue
        d = wtype_saturation(sig, w_depth or 3)
        if d is None:
            skipped += 1
            continue
        W = wtype_enumerate(sig, max(d, 1))
        w = FinFunction.constant(W, one, "*")
        v.record("W", S.contains(w), len(W) <= n,
                 lambda: f"W-type of {P.describe(f)} has {len(W)} terms")
    if skipped:
        v.notes.append(f"{skipped} signatures with infinite W-types skipped")
    return v


# ---------------------------------------------------------------- representability


@dataclass(frozen=True)
class UniversalMap:
    """``π: E -> U``; here ``U`` lists fiber sizes and ``E_u = {(u, 0), ..., (u, u-1)}``."""

    pi: FinFunction

    @classmethod
    def from_sizes(cls, sizes: Iterable[int]) -> UniversalMap:
        U = FinSet(sorted(set(sizes)))
        E = FinSet((u, j) for u in U for j in range(u))
        return cls(FinFunction(E, U, {e: e[0] for e in E}, check=False))

    @property
    def U(self) -> FinSet:
        return self.pi.cod

    @property
    def E(self) -> FinSet:
        return self.pi.dom

    def fiber(self, u) -> tuple:
        return self.pi.fiber(u)


@dataclass(frozen=True)
class Representation:
    universal: UniversalMap | None
    witnesses: int
    failure: str | None = None

    @property
    def ok(self) -> bool:
        return self.failure is None


def _classify(f: FinFunction, pi: FinFunction):
    """Both squares of the representing diagram with ``p = id``; ``None`` if some fiber has no match."""
    by_size: dict[int, Hashable] = {}
    for u in pi.cod:
        by_size.setdefault(len(pi.fiber(u)), u)
    A = f.cod
    cls = {}
    for a in A:
        u = by_size.get(len(f.fiber(a)))
        if u is None:
            return None
        cls[a] = u
    k = FinFunction(A, pi.cod, cls, check=False)
    pb = set_pullback(k, pi)
    to_B = {}
    for a in A:
        for e, b in zip(pi.fiber(cls[a]), f.fiber(a)):
            to_B[(a, e)] = b
    top = FinFunction(pb.obj, f.dom, to_B, check=False)
    left = Square(top=top, left=pb.p1, right=f, bottom=FinFunction.identity(A))
    right = Square(top=pb.p2, left=pb.p1, right=pi, bottom=k)
    return left, right


def find_representation(S: MapClass, P: ProbeUniverse, pi: UniversalMap | None = None) -> Representation:
    """Build (or take) ``π`` and represent every small probe map as a double pullback of it.

    The default ``π`` has one fiber per size occurring among small probe maps.
    """
    small = [f for f in P.maps() if S.contains(f)]
    if pi is None:
        pi = UniversalMap.from_sizes({n for f in small for n in f.fiber_sizes()} | {0})
    if not S.contains(pi.pi):
        return Representation(pi, 0, f"the universal map {P.describe(pi.pi)} is not small")
    count = 0
    for f in small:
        sq = _classify(f, pi.pi)
        if sq is None:
            return Representation(pi, count, f"{P.describe(f)} has a fiber of a size not in U")
        left, right = sq
        if not (left.is_pullback() and right.is_pullback() and is_cover(left.bottom)):
            return Representation(pi, count, f"squares for {P.describe(f)} are not pullbacks")
        count += 1
    return Representation(pi, count)


# ---------------------------------------------------------------- collection


@dataclass(frozen=True)
class CAWitness:
    route: str
    Y: FinSet
    B: FinSet
    g: FinFunction
    to_C: FinFunction
    q: FinFunction


@dataclass
class CAVerdict:
    probe: str
    klass: str
    lifts: str
    bound: int
    instances: int = 0
    routes: dict[str, int] = field(default_factory=dict)
    counterexample: str | None = None
    collection_map: object = None

    @property
    def ok(self) -> bool:
        return self.counterexample is None


def _ca_square(f, e, g, to_C, q) -> Square:
    return Square(top=e.after(to_C), left=g, right=f, bottom=q)


def _ca_search(S, f: FinFunction, e: FinFunction, lifts: str, bound: int):
    X = f.cod
    if lifts == "any":
        for s in sections(e):
            g, q = f, FinFunction.identity(X)
            if S.contains(g):
                return CAWitness("sections", X, f.dom, g, s, q)
            break
        g = f.after(e)
        if S.contains(g):
            return CAWitness("pullback", X, e.dom, g, FinFunction.identity(e.dom), FinFunction.identity(X))
    C = e.dom
    for total in range(len(X), bound + 1):
        for sizes in itertools.product(range(1, total - len(X) + 2), repeat=len(X)):
            if sum(sizes) != total:
                continue
            Y = FinSet((x, j) for x, n in zip(X, sizes) for j in range(n))
            q = FinFunction(Y, X, {y: y[0] for y in Y}, check=False)
            cand = [(y, c) for y in Y for c in C if q(y) == f(e(c))]
            need = {(y, a) for y in Y for a in f.dom if q(y) == f(a)}
            for r in range(len(need), len(cand) + 1):
                for sub in itertools.combinations(cand, r):
                    B = FinSet(sub)
                    if {(y, e(c)) for y, c in sub} != need:
                        continue
                    to_C = FinFunction(B, C, {b: b[1] for b in B}, check=False)
                    if lifts == "epi" and not to_C.is_surjective():
                        continue
                    g = FinFunction(B, Y, {b: b[0] for b in B}, check=False)
                    if S.contains(g):
                        return CAWitness("search", Y, B, g, to_C, q)
    return None


def check_collection_axiom(S: MapClass, P: ProbeUniverse, lifts: str = "any",
                           bound: int | None = None) -> CAVerdict:
    """(CA) for every small ``f: A -> X`` and epi ``C ↠ A`` of the probe.

    Witnesses are tried in order: a section of the epi, the composite
    ``f ∘ e``, then a bounded search with ``|Y| <= bound``.  With
    ``lifts="epi"`` the map ``B -> C`` must be surjective.  The verdict also
    reports whether the universal small map is a collection map.
    """
    if lifts not in ("any", "epi"):
        raise InputError("lifts must be 'any' or 'epi'")
    bound = P.carrier + 1 if bound is None else bound
    v = CAVerdict(P.name, S.name, lifts, bound)
    for f in P.maps():
        if not S.contains(f):
            continue
        for e in P.maps_into(f.dom):
            if not e.is_surjective():
                continue
            v.instances += 1
            w = _ca_search(S, f, e, lifts, bound)
            if w is None:
                v.counterexample = f"no quasi-pullback for f = {P.describe(f)}, epi {P.describe(e)}"
                break
            sq = _ca_square(f, e, w.g, w.to_C, w.q)
            if not (sq.commutes() and is_quasi_pullback(sq) and w.q.is_surjective() and S.contains(w.g)):
                raise AssertionError("collection witness does not verify")
            v.routes[w.route] = v.routes.get(w.route, 0) + 1
        if v.counterexample:
            break
    rep = find_representation(S, P)
    if rep.universal is not None:
        pi = rep.universal.pi
        h = FinFunction.constant(pi.dom, FinSet(["*"]), "*") if pi.dom else FinFunction(pi.dom, FinSet(["*"]), {})
        v.collection_map = is_collection_span(pi, h, lifts=lifts)
    return v


@dataclass(frozen=True)
class CollectionSpanData:
    """``D --h--> B`` over ``C --> A`` with ``g: D -> C``; see :func:`collsp_construct`."""

    D: FinSet
    C: FinSet
    g: FinFunction
    h: FinFunction
    bottom: FinFunction
    quasi_pullback: bool
    g_small: bool
    collection_span: bool

    @property
    def ok(self) -> bool:
        return self.quasi_pullback and self.g_small and self.collection_span


def _covers_between(src: tuple, dst: tuple):
    for images in itertools.product(dst, repeat=len(src)):
        if set(images) == set(dst):
            yield tuple(zip(src, images))


def collsp_construct(f: FinFunction, S: MapClass, pi: UniversalMap, lifts: str = "any") -> CollectionSpanData:
    """``C = Σ_{a ∈ A, u ∈ U} {p: E_u ↠ B_a}``, with ``g``-fiber ``E_u`` over ``(a, u, p)`` and ``h`` acting by ``p``."""
    if not S.contains(f):
        raise InputError(f"the map is not in {S.name}")
    A = f.cod
    triples = []
    for a in A:
        Ba = f.fiber(a)
        for u in pi.U:
            for p in _covers_between(pi.fiber(u), Ba):
                triples.append((a, u, p))
    C = FinSet(triples)
    D = FinSet((t, e) for t in C for e in pi.fiber(t[1]))
    g = FinFunction(D, C, {d: d[0] for d in D}, check=False)
    h = FinFunction(D, f.dom, {d: dict(d[0][2])[d[1]] for d in D}, check=False)
    bottom = FinFunction(C, A, {t: t[0] for t in C}, check=False)
    sq = Square(top=h, left=g, right=f, bottom=bottom)
    qp = sq.commutes() and is_quasi_pullback(sq)
    span = is_collection_span(g, h, over=bottom, lifts=lifts).holds
    return CollectionSpanData(D, C, g, h, bottom, qp, S.contains(g), span)


@dataclass(frozen=True)
class EquivalentSite:
    site: Site
    collection_site: bool
    small_covers: bool
    same_sheaves: bool
    size_bound: int


def equiv_collection_site(s: Site, S: MapClass, pi: UniversalMap, size_bound: int = 2) -> EquivalentSite:
    """Replace ``φ`` by the collection span of :func:`collsp_construct`; covers become ``m ∘ h``."""
    from .sheaf import same_sheaves

    if not has_small_covers(s, S):
        raise InputError(f"the site does not have {S.name}-small covers")
    phi, m, target, _ = s.square()
    data = collsp_construct(phi, S, pi)
    if not data.ok:
        raise AssertionError("collection span construction does not verify")
    covers = []
    for t in data.C:
        U_name, u, p = t
        U = s.cover(U_name)
        fam = tuple((e, m(dict(p)[e])) for e in pi.fiber(u))
        name = f"{U_name}/{u}/" + ",".join(f"{label(e)}>{label(i[1])}" for e, i in p)
        covers.append(CoveringFamily(name, U.target, fam))
    new = Site(s.base, covers)
    verdict = same_sheaves(s, new, size_bound)
    return EquivalentSite(new, is_collection_site(new).holds, has_small_covers(new, S),
                          verdict.equal and verdict.complete, size_bound)
