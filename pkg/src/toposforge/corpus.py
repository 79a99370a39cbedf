"""Small named categories, sites and presheaves used by tests, demos and the CLI."""

from __future__ import annotations

from .cat import CatPresentation, FinCategory, compile_presentation, poset_category
from .presheaf import Presheaf, constant, terminal, yoneda
from .site import CoveringFamily, Site

__all__ = ["bases", "sites", "site", "non_separated", "presheaves"]


def _arrow() -> FinCategory:
    return poset_category(["0", "1"], [("u", "0", "1")])


def bases() -> dict[str, FinCategory]:
    return {
        "point": FinCategory(["*"]),
        "discrete2": FinCategory(["a", "b"]),
        "arrow": _arrow(),
        "idempotent": compile_presentation(
            CatPresentation(("*",), (("e", "*", "*"),), ((("e", "e"), ("e",)),)), budget=100),
        "involution": compile_presentation(
            CatPresentation(("*",), (("s", "*", "*"),), ((("s", "s"), ("id_*",)),)), budget=100),
    }


def sites() -> dict[str, Site]:
    """The site corpus.

    ``sierpinski`` and ``chain`` fail (C): a cover is pulled back to an object
    without any cover at all.
    """
    arrow = _arrow()
    cospan = FinCategory(["a", "b", "c"], [("p", "a", "c"), ("q", "b", "c")])
    chain = poset_category(["0", "1", "2"], [("a", "0", "1"), ("b", "1", "2")])
    parallel = FinCategory(["0", "1"], [("s", "0", "1"), ("t", "0", "1")])
    idem = bases()["idempotent"]
    return {
        "empty": Site(arrow, []),
        "sierpinski": Site(arrow, [CoveringFamily("U", "1", (("u", "u"),))]),
        "cospan": Site(cospan, [
            CoveringFamily("Uc", "c", (("p", "p"), ("q", "q"))),
            CoveringFamily("Ua", "a", (("1", "id_a"),)),
            CoveringFamily("Ub", "b", (("1", "id_b"),)),
        ]),
        "chain": Site(chain, [CoveringFamily("U", "2", (("b", "b"),))]),
        "parallel": Site(parallel, [
            CoveringFamily("U", "1", (("s", "s"), ("t", "t"))),
            CoveringFamily("V", "0", (("1", "id_0"),)),
        ]),
        "idempotent": Site(idem, [CoveringFamily("E", "*", (("e", "e"),))]),
    }


def site(name: str) -> Site:
    return sites()[name]


def non_separated() -> Presheaf:
    """Over ``0 -> 1``: two sections at 1 restricting to the same section at 0."""
    c = _arrow()
    return Presheaf(c, {"0": ["r"], "1": ["p", "q"]}, {"u": {"p": "r", "q": "r"}})


def presheaves(c: FinCategory) -> dict[str, Presheaf]:
    """Representables, the terminal presheaf and a two-point constant presheaf."""
    out = {f"y({C})": yoneda(c, C) for C in c.objects}
    out["1"] = terminal(c)
    out["2"] = constant(c, ["x", "y"])
    return out
