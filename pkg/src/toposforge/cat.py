"""Finitely presented categories.

Arrows are named by strings; the identity on ``X`` is always the arrow
``id_X``.  Composition ``g ∘ f`` is looked up in a table keyed by ``(g, f)``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

from ._core import InputError, canonical
from .finset import FinFunction, FinSet

__all__ = [
    "FinCategory",
    "CategoryVerdict",
    "CatPresentation",
    "validate_category",
    "compile_presentation",
    "identity_name",
    "poset_category",
]


def identity_name(obj: str) -> str:
    return f"id_{obj}"


class FinCategory:
    """A finite category given by objects, named arrows and a composition table."""

    def __init__(
        self,
        objects: Iterable[str],
        arrows: Iterable[tuple[str, str, str]] = (),
        compose: Iterable[tuple[str, str, str]] = (),
        *,
        implicit_identities: bool = True,
        check: bool = True,
    ):
        self.objects = FinSet(objects)
        self.dom: dict[str, str] = {}
        self.cod: dict[str, str] = {}
        self.ident: dict[str, str] = {}
        if implicit_identities:
            for X in self.objects:
                i = identity_name(X)
                self.dom[i] = self.cod[i] = X
                self.ident[X] = i
        for name, d, c in arrows:
            if name in self.dom and not (implicit_identities and name in self.ident.values()):
                raise InputError(f"duplicate arrow name {name!r}")
            if d not in self.objects or c not in self.objects:
                raise InputError(f"arrow {name!r} has an endpoint outside the objects")
            self.dom[name] = d
            self.cod[name] = c
            if name == identity_name(d) and d == c:
                self.ident[d] = name
        self.arrows = FinSet(self.dom)
        self.comp: dict[tuple[str, str], str] = {}
        if implicit_identities:
            for a in self.arrows:
                self.comp[(self.ident[self.cod[a]], a)] = a
                self.comp[(a, self.ident[self.dom[a]])] = a
        for g, f, gf in compose:
            for n in (g, f, gf):
                if n not in self.dom:
                    raise InputError(f"composition mentions unknown arrow {n!r}")
            if (g, f) in self.comp and self.comp[(g, f)] != gf:
                raise InputError(f"conflicting composites for ({g}, {f})")
            self.comp[(g, f)] = gf
        if check:
            verdict = validate_category(self)
            if not verdict.ok:
                raise InputError("invalid category: " + "; ".join(verdict.violations))

    def __repr__(self) -> str:
        return f"FinCategory({len(self.objects)} objects, {len(self.arrows)} arrows)"

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, FinCategory) and self.objects == other.objects
                and self.dom == other.dom and self.cod == other.cod and self.comp == other.comp)

    def __hash__(self) -> int:
        return hash((self.objects, self.arrows))

    def id(self, X: str) -> str:
        return self.ident[X]

    def compose(self, g: str, f: str) -> str:
        """``g ∘ f``."""
        try:
            return self.comp[(g, f)]
        except KeyError:
            raise InputError(f"{g} ∘ {f} is undefined") from None

    @cached_property
    def _homs(self) -> dict[tuple[str, str], tuple[str, ...]]:
        out: dict[tuple[str, str], list[str]] = {}
        for a in self.arrows:
            out.setdefault((self.dom[a], self.cod[a]), []).append(a)
        return {k: tuple(v) for k, v in out.items()}

    def hom(self, D: str, C: str) -> tuple[str, ...]:
        return self._homs.get((D, C), ())

    @cached_property
    def _into(self) -> dict[str, tuple[str, ...]]:
        return {C: tuple(a for a in self.arrows if self.cod[a] == C) for C in self.objects}

    def arrows_into(self, C: str) -> tuple[str, ...]:
        return self._into[C]

    def factorizations(self, h: str, g: str) -> tuple[str, ...]:
        """All ``k`` with ``g ∘ k = h``."""
        if self.cod[h] != self.cod[g]:
            return ()
        return tuple(k for k in self.hom(self.dom[h], self.dom[g]) if self.comp[(g, k)] == h)

    def factors_through(self, h: str, g: str) -> bool:
        return bool(self.factorizations(h, g))

    def is_identity(self, a: str) -> bool:
        return self.ident.get(self.dom[a]) == a

    def op(self) -> FinCategory:
        arrows = [(a, self.cod[a], self.dom[a]) for a in self.arrows if not self.is_identity(a)]
        compose = [(f, g, gf) for (g, f), gf in self.comp.items()
                   if not (self.is_identity(g) or self.is_identity(f))]
        return FinCategory(self.objects, arrows, compose)

    def cod_map(self) -> FinFunction:
        """``cod: C_1 -> C_0`` as a finite function."""
        return FinFunction(self.arrows, self.objects, self.cod)

    def generating_data(self) -> tuple[list, list]:
        """Non-identity arrows and composites, i.e. the serializable part."""
        arrows = [(a, self.dom[a], self.cod[a]) for a in self.arrows if not self.is_identity(a)]
        compose = sorted((g, f, gf) for (g, f), gf in self.comp.items()
                         if not (self.is_identity(g) or self.is_identity(f)))
        return arrows, compose


@dataclass(frozen=True)
class CategoryVerdict:
    violations: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def validate_category(c: FinCategory) -> CategoryVerdict:
    """List every violated category law."""
    bad: list[str] = []
    for X in c.objects:
        i = c.ident.get(X)
        if i is None:
            bad.append(f"missing identity on {X}")
        elif c.dom[i] != X or c.cod[i] != X:
            bad.append(f"identity {i} does not have dom = cod = {X}")
    for (g, f), gf in c.comp.items():
        if c.cod[f] != c.dom[g]:
            bad.append(f"composite {g} ∘ {f} defined for non-composable pair")
            continue
        if c.dom[gf] != c.dom[f] or c.cod[gf] != c.cod[g]:
            bad.append(f"composite {g} ∘ {f} = {gf} has wrong dom/cod")
    for f in c.arrows:
        for g in c.arrows:
            if c.cod[f] == c.dom[g] and (g, f) not in c.comp:
                bad.append(f"composite {g} ∘ {f} missing")
    if bad:
        return CategoryVerdict(tuple(bad))
    for f in c.arrows:
        if c.comp[(c.ident[c.cod[f]], f)] != f or c.comp[(f, c.ident[c.dom[f]])] != f:
            bad.append(f"unit law fails at {f}")
    for f in c.arrows:
        for g in c.arrows:
            if c.cod[f] != c.dom[g]:
                continue
            for h in c.arrows:
                if c.cod[g] != c.dom[h]:
                    continue
                if c.comp[(h, c.comp[(g, f)])] != c.comp[(c.comp[(h, g)], f)]:
                    bad.append(f"associativity fails at ({h}, {g}, {f})")
    return CategoryVerdict(tuple(bad))


def poset_category(objects: Sequence[str], relations: Iterable[tuple[str, str, str]]) -> FinCategory:
    """Category of a finite preorder from named generating relations ``(name, x, y)`` with x <= y.

    Composites of generators are named ``g.f``; each hom-set has at most one arrow.
    """
    gens = list(relations)
    pres = CatPresentation(tuple(objects), tuple(gens), ())
    # Thin category: identify all parallel words.
    words: dict[tuple[str, str], list[tuple[str, ...]]] = {}
    for w in _words(pres, len(objects)):
        words.setdefault(_word_ends(pres, w), []).append(w)
    rels = []
    for ws in words.values():
        ws.sort(key=lambda w: (len(w), w))
        rels += [(_as_path(pres, w), _as_path(pres, ws[0])) for w in ws[1:]]
    return compile_presentation(CatPresentation(tuple(objects), tuple(gens), tuple(rels)), budget=10_000)


@dataclass(frozen=True)
class CatPresentation:
    """Generators ``(name, dom, cod)`` and relations between paths.

    A path is a sequence of generator names in composition order, so
    ``("g", "f")`` stands for ``g ∘ f``; ``("id_X",)`` is the empty path at ``X``.
    """

    objects: tuple[str, ...]
    generators: tuple[tuple[str, str, str], ...]
    relations: tuple[tuple[tuple[str, ...], tuple[str, ...]], ...] = field(default=())

    def op(self) -> CatPresentation:
        return CatPresentation(
            self.objects,
            tuple((n, c, d) for n, d, c in self.generators),
            tuple((tuple(reversed(l)), tuple(reversed(r))) for l, r in self.relations),
        )


def _gen_table(p: CatPresentation) -> dict[str, tuple[str, str]]:
    table = {}
    for n, d, c in p.generators:
        if n in table or n.startswith("id_"):
            raise InputError(f"bad or duplicate generator name {n!r}")
        if d not in p.objects or c not in p.objects:
            raise InputError(f"generator {n!r} has an endpoint outside the objects")
        table[n] = (d, c)
    return table


def _word_ends(p: CatPresentation, w: tuple) -> tuple[str, str]:
    # Words are diagrammatic: w[0] is applied first.  Empty words carry their object.
    if w and w[0].startswith("@"):
        return (w[0][1:], w[0][1:])
    gens = _gen_table(p)
    return (gens[w[0]][0], gens[w[-1]][1])


def _words(p: CatPresentation, max_len: int):
    gens = _gen_table(p)
    for X in p.objects:
        yield ("@" + X,)
    frontier = [(g,) for g in gens]
    for _ in range(max_len):
        yield from frontier
        frontier = [w + (g,) for w in frontier for g in gens if gens[w[-1]][1] == gens[g][0]]


def _as_path(p: CatPresentation, w: tuple) -> tuple[str, ...]:
    if w and w[0].startswith("@"):
        return (identity_name(w[0][1:]),)
    return tuple(reversed(w))


def _path_to_word(p: CatPresentation, path: Sequence[str]) -> tuple[str, ...]:
    gens = _gen_table(p)
    if len(path) == 1 and path[0].startswith("id_"):
        X = path[0][3:]
        if X not in p.objects:
            raise InputError(f"unknown identity {path[0]!r}")
        return ("@" + X,)
    for n in path:
        if n not in gens:
            raise InputError(f"relation mentions unknown generator {n!r}")
    w = tuple(reversed(path))
    for a, b in zip(w, w[1:]):
        if gens[a][1] != gens[b][0]:
            raise InputError(f"relation path {'∘'.join(path)} is not composable")
    return w


def compile_presentation(p: CatPresentation, budget: int) -> FinCategory:
    """Close a presentation under composition, modulo its relations.

    Words of growing length are identified by the congruence generated by the
    relations until every word of the maximal length reduces to a shorter one.
    Raises :class:`InputError` when more than ``budget`` arrows appear.
    """
    gens = _gen_table(p)
    if budget < len(gens) + len(p.objects):
        raise InputError("budget must cover generators and identities")
    rels = []
    for l, r in p.relations:
        lw, rw = _path_to_word(p, l), _path_to_word(p, r)
        if _word_ends(p, lw) != _word_ends(p, rw):
            raise InputError(f"relation {l} = {r} relates non-parallel paths")
        rels.append((lw, rw))

    def concat(u: tuple, v: tuple) -> tuple:
        if u[0].startswith("@"):
            return v
        if v[0].startswith("@"):
            return u
        return u + v

    def length(w: tuple) -> int:
        return 0 if w[0].startswith("@") else len(w)

    L = 1
    while True:
        words = [w for w in _words(p, L)]
        if sum(1 for w in words if length(w) == L) == 0:
            # No words of length L at all: the free category is finite.
            pass
        parent = {w: w for w in words}

        def find(w):
            while parent[w] != w:
                parent[w] = parent[parent[w]]
                w = parent[w]
            return w

        index = set(words)
        for lw, rw in rels:
            for u in words:
                for side_a, side_b in ((lw, rw), (rw, lw)):
                    a_in = concat(u, side_a) if _compatible(p, u, side_a) else None
                    if a_in is None or a_in not in index:
                        continue
                    b_in = concat(u, side_b)
                    if b_in not in index:
                        continue
                    for v in words:
                        if not _compatible(p, side_a, v):
                            continue
                        x, y = concat(a_in, v), concat(b_in, v)
                        if x in index and y in index:
                            rx, ry = find(x), find(y)
                            if rx != ry:
                                parent[rx] = ry
        classes: dict[tuple, list[tuple]] = {}
        for w in words:
            classes.setdefault(find(w), []).append(w)
        short_classes = [ws for ws in classes.values() if min(map(length, ws)) < L]
        if len(short_classes) > budget:
            raise InputError("category not finite within budget")
        closed = all(min(map(length, ws)) < L for ws in classes.values())
        if closed:
            cat = _build(p, classes, find, L, concat, length)
            if cat is not None:
                if len(cat.arrows) > budget:
                    raise InputError("category not finite within budget")
                return cat
        L += 1
        if L > budget:
            raise InputError("category not finite within budget")


def _compatible(p: CatPresentation, u: tuple, v: tuple) -> bool:
    return _word_ends(p, u)[1] == _word_ends(p, v)[0]


def _build(p, classes, find, L, concat, length) -> FinCategory | None:
    def key(w):
        return (length(w), w)

    rep = {root: min(ws, key=key) for root, ws in classes.items()}

    def reduce(w: tuple) -> tuple:
        while length(w) >= L:
            head = w[:L]
            w = concat(rep[find(head)], w[L:]) if len(w) > L else rep[find(head)]
        return rep[find(w)]

    arrows = sorted({rep[r] for r in classes}, key=key)

    def name(w: tuple) -> str:
        if w[0].startswith("@"):
            return identity_name(w[0][1:])
        return ".".join(reversed(w))

    data = []
    for w in arrows:
        if not w[0].startswith("@"):
            d, c = _word_ends(p, w)
            data.append((name(w), d, c))
    compose = []
    for f in arrows:
        for g in arrows:
            if _compatible(p, f, g) and not f[0].startswith("@") and not g[0].startswith("@"):
                compose.append((name(g), name(f), name(reduce(concat(f, g)))))
    try:
        cat = FinCategory(p.objects, data, compose)
    except InputError:
        return None
    for l, r in p.relations:
        lw, rw = _path_to_word(p, l), _path_to_word(p, r)
        if reduce(lw) != reduce(rw):
            return None
    return cat
