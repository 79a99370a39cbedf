"""Command-line front end: JSON documents in, reports out.

Documents are UTF-8 JSON objects with a ``kind``.  A ``corpus`` document
bundles named documents; other documents are named after their file stem.
Presheaves, sites and morphisms refer to other documents by name.

Exit codes: 0 when every check passes, 1 when a check fails, 2 on invalid
input (with the location of the problem).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Sequence

from . import corpus as builtin
from ._core import BudgetExceeded, InputError, label
from .cat import FinCategory, validate_category
from .finset import FinFunction, FinSet, Signature, check_wtype_characterization, kleene_iterate, \
    structure_map, tree_of, wtype_enumerate, wtype_saturation
from .presheaf import Presheaf, PresheafMorphism, constant, relabeled, validate_morphism, validate_presheaf
from .sheaf import is_sheaf_for, is_sheaf, same_sheaves, sheafify
from .site import CoveringFamily, Site, check_L, check_M, check_strong_C, generate_grothendieck
from .smallmap import (
    AllMaps,
    Explicit,
    FiberBound,
    MapClass,
    PresheafProbe,
    ProbeUniverse,
    SheafProbe,
    check_collection_axiom,
    check_locally_full,
    check_pi_w_closure,
    check_stable,
    collsp_construct,
    equiv_collection_site,
    find_representation,
    induce_presheaf_class,
    induce_sheaf_class,
)
from .wpresheaf import kleene_comparison, kleene_presheaf, wtype_presheaf

KINDS = ("category", "presheaf", "presheaf_morphism", "site", "map_class", "function", "corpus")


class DocumentError(InputError):
    """Invalid input, with a dotted location inside the bundle."""

    def __init__(self, where: str, message: str):
        super().__init__(f"{where}: {message}")
        self.where = where


# ---------------------------------------------------------------- serialization


def dumps(doc: Any) -> str:
    """Canonical JSON text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def category_doc(c: FinCategory) -> dict:
    proper = [a for a in c.arrows if not c.is_identity(a)]
    return {
        "kind": "category",
        "objects": list(c.objects),
        "arrows": [{"name": a, "dom": c.dom[a], "cod": c.cod[a]} for a in proper],
        "compose": [[g, f, c.compose(g, f)] for g in proper for f in proper if c.cod[f] == c.dom[g]],
    }


def presheaf_doc(P: Presheaf, category: str) -> dict:
    if not all(isinstance(x, str) for C in P.base.objects for x in P(C)):
        P, _ = relabeled(P)
    c = P.base
    return {
        "kind": "presheaf",
        "category": category,
        "values": {C: list(P(C)) for C in c.objects},
        "restrict": {a: {x: P.act(x, a) for x in P(c.cod[a])} for a in c.arrows if not c.is_identity(a)},
    }


def morphism_doc(f: PresheafMorphism, dom: str, cod: str) -> dict:
    return {
        "kind": "presheaf_morphism",
        "dom": dom,
        "cod": cod,
        "components": {C: {x: f(C, x) for x in f.dom(C)} for C in f.base.objects},
    }


def site_doc(s: Site, category: str) -> dict:
    return {
        "kind": "site",
        "category": category,
        "covers": [{"name": U.name, "target": U.target,
                    "family": [{"index": i if isinstance(i, (str, int)) else label(i), "arrow": a}
                               for i, a in U.family]}
                   for U in s.covers],
    }


def function_doc(f: FinFunction) -> dict:
    return {"kind": "function", "dom": [label(x) for x in f.dom], "cod": [label(y) for y in f.cod],
            "table": {label(x): label(f(x)) for x in f.dom}}


def class_doc(S: MapClass) -> dict:
    if isinstance(S, FiberBound):
        return {"kind": "map_class", "class": "fiber_bound", "bound": S.bound}
    if isinstance(S, AllMaps):
        return {"kind": "map_class", "class": "all"}
    if isinstance(S, Explicit):
        return {"kind": "map_class", "class": "explicit", "maps": [function_doc(f) for f in S.maps]}
    raise InputError(f"{S.name} has no document form")


def builtin_bundle() -> dict:
    """The built-in corpus (bases, sites, sample presheaves, a signature) as one bundle."""
    items: dict[str, dict] = {}
    cats = dict(builtin.bases())
    sites = builtin.sites()
    for name, s in sites.items():
        cname = next((k for k, c in cats.items() if c == s.base), None)
        if cname is None:
            cname = f"{name}_base"
            cats[cname] = s.base
        items[f"site_{name}"] = site_doc(s, cname)
    for name, c in cats.items():
        items[name] = category_doc(c)
    items["P_nonsep"] = presheaf_doc(builtin.non_separated(), "arrow")
    for pname, P in builtin.presheaves(cats["arrow"]).items():
        items[f"arrow_{pname.replace('(', '').replace(')', '')}"] = presheaf_doc(P, "arrow")
    items["nno"] = function_doc(FinFunction(FinSet(["s0"]), FinSet(["s", "z"]), {"s0": "s"}))
    B = constant(cats["arrow"], ["s0"])
    A = constant(cats["arrow"], ["s", "z"])
    items["nno_B"] = presheaf_doc(B, "arrow")
    items["nno_A"] = presheaf_doc(A, "arrow")
    items["nno_arrow"] = morphism_doc(
        PresheafMorphism(B, A, {C: {"s0": "s"} for C in cats["arrow"].objects}), "nno_B", "nno_A")
    items["fiber_bound_2"] = {"kind": "map_class", "class": "fiber_bound", "bound": 2}
    items["all_maps"] = {"kind": "map_class", "class": "all"}
    items["two_to_one"] = function_doc(FinFunction(FinSet(["b0", "b1"]), FinSet(["a"]), {"b0": "a", "b1": "a"}))
    return {"kind": "corpus", "items": items}


# ---------------------------------------------------------------- parsing


def _need(doc: Any, key: str, typ, where: str):
    if not isinstance(doc, dict):
        raise DocumentError(where, "expected a JSON object")
    if key not in doc:
        raise DocumentError(where, f"missing field {key!r}")
    val = doc[key]
    if not isinstance(val, typ):
        raise DocumentError(f"{where}.{key}", f"expected {getattr(typ, '__name__', typ)}")
    return val


def _strings(xs: Any, where: str) -> list[str]:
    if not isinstance(xs, list) or not all(isinstance(x, str) for x in xs):
        raise DocumentError(where, "expected a list of strings")
    return xs


@dataclass
class Bundle:
    """Named documents with lazily built objects."""

    docs: dict[str, dict] = field(default_factory=dict)
    sources: list[dict] = field(default_factory=list)
    _built: dict[str, Any] = field(default_factory=dict)

    def add(self, name: str, doc: Any, where: str) -> None:
        kind = _need(doc, "kind", str, where)
        if kind not in KINDS:
            raise DocumentError(f"{where}.kind", f"unknown kind {kind!r}")
        if kind == "corpus":
            items = _need(doc, "items", dict, where)
            for k in sorted(items):
                self.add(k, items[k], f"{where}.items.{k}")
            return
        if name in self.docs:
            raise DocumentError(where, f"duplicate document name {name!r}")
        self.docs[name] = dict(doc, _where=where)

    def names(self, kind: str) -> list[str]:
        return sorted(k for k, d in self.docs.items() if d["kind"] == kind)

    def pick(self, kind: str, name: str | None) -> str:
        if name is not None:
            if name not in self.docs or self.docs[name]["kind"] != kind:
                raise DocumentError(name, f"no {kind} document with this name")
            return name
        cands = self.names(kind)
        if len(cands) != 1:
            raise DocumentError("arguments", f"choose a {kind} by name (found {len(cands)})")
        return cands[0]

    def get(self, name: str, kind: str, check: bool = True, where: str | None = None) -> Any:
        doc = self.docs.get(name)
        if doc is None:
            raise DocumentError(where or name, f"unresolved reference {name!r}")
        if doc["kind"] != kind:
            raise DocumentError(doc["_where"], f"expected a {kind}, found a {doc['kind']}")
        key = (name, check)
        if key not in self._built:
            self._built[key] = getattr(self, f"_build_{kind}")(doc, doc["_where"], check)
        return self._built[key]

    def _build_category(self, doc, where, check):
        objs = _strings(_need(doc, "objects", list, where), f"{where}.objects")
        arrows = []
        for n, a in enumerate(_need(doc, "arrows", list, where)):
            w = f"{where}.arrows.{n}"
            arrows.append((_need(a, "name", str, w), _need(a, "dom", str, w), _need(a, "cod", str, w)))
        comp = []
        for n, t in enumerate(doc.get("compose", [])):
            comp.append(tuple(_strings(t, f"{where}.compose.{n}")))
            if len(t) != 3:
                raise DocumentError(f"{where}.compose.{n}", "expected [g, f, g.f]")
        try:
            return FinCategory(objs, arrows, comp, check=check)
        except InputError as e:
            raise DocumentError(where, str(e)) from None

    def _build_presheaf(self, doc, where, check):
        c = self.get(_need(doc, "category", str, where), "category", where=f"{where}.category")
        vals = _need(doc, "values", dict, where)
        for C, xs in vals.items():
            _strings(xs, f"{where}.values.{C}")
        restrict = _need(doc, "restrict", dict, where) if "restrict" in doc else {}
        try:
            return Presheaf(c, {C: vals.get(C, []) for C in c.objects} | vals, restrict, check=check)
        except InputError as e:
            raise DocumentError(where, str(e)) from None

    def _build_presheaf_morphism(self, doc, where, check):
        P = self.get(_need(doc, "dom", str, where), "presheaf", where=f"{where}.dom")
        Q = self.get(_need(doc, "cod", str, where), "presheaf", where=f"{where}.cod")
        comps = _need(doc, "components", dict, where)
        try:
            return PresheafMorphism(P, Q, comps, check=check)
        except InputError as e:
            raise DocumentError(where, str(e)) from None

    def _build_site(self, doc, where, check):
        c = self.get(_need(doc, "category", str, where), "category", where=f"{where}.category")
        covers = []
        for n, U in enumerate(_need(doc, "covers", list, where)):
            w = f"{where}.covers.{n}"
            fam = []
            for k, e in enumerate(_need(U, "family", list, w)):
                idx = _need(e, "index", (str, int), f"{w}.family.{k}")
                fam.append((idx, _need(e, "arrow", str, f"{w}.family.{k}")))
            try:
                covers.append(CoveringFamily(_need(U, "name", str, w), _need(U, "target", str, w), tuple(fam)))
            except InputError as e:
                raise DocumentError(w, str(e)) from None
        try:
            return Site(c, covers)
        except InputError as e:
            raise DocumentError(where, str(e)) from None

    def _build_function(self, doc, where, check=True):
        dom = FinSet(_strings(_need(doc, "dom", list, where), f"{where}.dom"))
        cod = FinSet(_strings(_need(doc, "cod", list, where), f"{where}.cod"))
        try:
            return FinFunction(dom, cod, _need(doc, "table", dict, where))
        except InputError as e:
            raise DocumentError(where, str(e)) from None

    def _build_map_class(self, doc, where, check):
        kind = _need(doc, "class", str, where)
        if kind == "fiber_bound":
            bound = _need(doc, "bound", int, where)
            if bound < 0:
                raise DocumentError(f"{where}.bound", "must be non-negative")
            return FiberBound(bound)
        if kind == "all":
            return AllMaps()
        if kind == "explicit":
            maps = [self._build_function(m, f"{where}.maps.{n}")
                    for n, m in enumerate(_need(doc, "maps", list, where))]
            return Explicit(tuple(maps))
        raise DocumentError(f"{where}.class", f"unknown map class {kind!r}")


def load(paths: Sequence[str]) -> Bundle:
    b = Bundle()
    for p in paths:
        path = Path(p)
        try:
            raw = path.read_bytes()
        except OSError as e:
            raise DocumentError(p, f"cannot read: {e.strerror}") from None
        try:
            doc = json.loads(raw.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as e:
            raise DocumentError(p, f"not valid UTF-8 JSON ({e})") from None
        b.sources.append({"path": path.name, "sha256": hashlib.sha256(raw).hexdigest()})
        b.add(path.stem, doc, path.name)
    return b


# ---------------------------------------------------------------- commands


@dataclass
class Outcome:
    ok: bool
    result: dict
    bounds: dict = field(default_factory=dict)
    witnesses: list = field(default_factory=list)


def cmd_validate(b: Bundle, args) -> Outcome:
    result, ok = {}, True
    for name in sorted(b.docs):
        kind = b.docs[name]["kind"]
        violations: list[str] = []
        if kind == "category":
            violations = list(validate_category(b.get(name, kind, check=False)).violations)
        elif kind == "presheaf":
            violations = list(validate_presheaf(b.get(name, kind, check=False)).violations)
        elif kind == "presheaf_morphism":
            violations = list(validate_morphism(b.get(name, kind, check=False)).violations)
        else:
            b.get(name, kind)
        ok &= not violations
        result[name] = {"kind": kind, "ok": not violations, "violations": violations}
    return Outcome(ok, result)


def _site_name(b: Bundle, s: Site, fallback: str) -> str:
    return next((k for k in b.names("category") if b.get(k, "category") == s.base), fallback)


def cmd_gen_site(b: Bundle, args) -> Outcome:
    name = b.pick("site", args.site)
    s = b.get(name, "site")
    g = generate_grothendieck(s, args.depth)
    checks = {v.axiom: {"ok": v.ok, "failures": list(v.failures)}
              for v in (check_M(g.site), check_L(g.site), check_strong_C(g.site))}
    same = same_sheaves(s, g.site, args.max_size)
    checks["same sheaves"] = {"ok": same.equal and same.complete, "checked": same.checked,
                              "complete": same.complete}
    ok = all(v["ok"] for v in checks.values())
    cat = b.docs[name]["category"]
    return Outcome(ok, {"site": name, "covers": len(g.site.covers), "checks": checks,
                        "generated": site_doc(g.site, cat)},
                   {"depth": args.depth, "max_size": args.max_size})


def cmd_check_sheaf(b: Bundle, args) -> Outcome:
    sname, pname = b.pick("site", args.site), b.pick("presheaf", args.presheaf)
    v = is_sheaf_for(b.get(pname, "presheaf"), b.get(sname, "site"))
    wit = [{"cover": f.cover, "family": [[label(i), label(x)] for i, x in f.family],
            "amalgamations": [label(x) for x in f.amalgamations]} for f in v.failures()]
    return Outcome(v.is_sheaf, {"site": sname, "presheaf": pname, "is_sheaf": v.is_sheaf,
                                "is_separated": v.is_separated, "families": len(v.checks)}, {}, wit)


def cmd_sheafify(b: Bundle, args) -> Outcome:
    sname, pname = b.pick("site", args.site), b.pick("presheaf", args.presheaf)
    s, P = b.get(sname, "site"), b.get(pname, "presheaf")
    a = sheafify(P, s)
    Q, iso = relabeled(a.sheaf)
    unit = iso.after(a.unit)
    cat = b.docs[pname]["category"]
    ok = is_sheaf(Q, s)
    return Outcome(ok, {"site": sname, "presheaf": pname, "is_sheaf": ok, "sizes": Q.sizes(),
                        "sheaf": presheaf_doc(Q, cat),
                        "unit": {C: {x: unit(C, x) for x in P(C)} for C in P.base.objects}})


def cmd_same_sheaves(b: Bundle, args) -> Outcome:
    name = b.pick("site", args.site)
    s = b.get(name, "site")
    if args.generated is not None:
        other, oname = generate_grothendieck(s, args.generated).site, f"generated(depth {args.generated})"
    else:
        oname = b.pick("site", args.other)
        other = b.get(oname, "site")
    v = same_sheaves(s, other, args.max_size)
    cat = b.docs[name]["category"]
    wit = [{"sheaf_for": side, "presheaf": presheaf_doc(P, cat)} for P, side in v.witnesses]
    return Outcome(v.equal and v.complete,
                   {"first": name, "second": oname, "equal": v.equal, "complete": v.complete,
                    "checked": v.checked},
                   {"max_size": args.max_size}, wit)


def cmd_wtype(b: Bundle, args) -> Outcome:
    name = b.pick("function", args.map)
    sig = Signature(b.get(name, "function"))
    levels = [wtype_enumerate(sig, d) for d in range(1, args.depth + 1)]
    kleene = kleene_iterate(sig, args.depth)[1:]
    match = all(FinSet(tree_of(e) for e in K) == W for K, W in zip(kleene, levels))
    sat = wtype_saturation(sig, args.depth)
    result: dict = {"signature": name, "counts": [len(W) for W in levels], "kleene_counts": [len(K) for K in kleene],
                    "matches_kleene": match, "saturated_at": sat}
    ok = match
    if sat is not None:
        V = wtype_enumerate(sig, sat)
        c = check_wtype_characterization(sig, V, structure_map(sig, V))
        result["characterization"] = {"m_iso": c.m_iso, "no_proper_subalgebra": c.no_proper_subalgebra}
        ok &= c.is_wtype
    return Outcome(ok, result, {"depth": args.depth})


def cmd_wtype_presheaf(b: Bundle, args) -> Outcome:
    name = b.pick("presheaf_morphism", args.morphism)
    f = b.get(name, "presheaf_morphism")
    W = wtype_presheaf(f, args.depth)
    K = kleene_presheaf(f, args.depth)
    try:
        kleene_comparison(f, K[args.depth], W.W)
        match = True
    except AssertionError:
        match = False
    return Outcome(match, {"signature": name,
                           "levels": [L.sizes() for L in W.levels],
                           "matches_kleene": match, "saturated": W.saturated()},
                   {"depth": args.depth})


def _verdict_block(v) -> dict:
    out = v.summary()
    out["ok"] = v.ok
    return out


def cmd_check_class(b: Bundle, args) -> Outcome:
    name = b.pick("map_class", args.klass)
    S = b.get(name, "map_class")
    result: dict = {"class": S.name}
    bounds = {"probe": args.probe}
    if args.site or args.category:
        if args.site:
            s = b.get(b.pick("site", args.site), "site")
            T, P = induce_sheaf_class(S, s), SheafProbe(s, args.probe)
        else:
            c = b.get(b.pick("category", args.category), "category")
            T, P = induce_presheaf_class(S, c), PresheafProbe(c, args.probe)
        st = check_stable(T, P)
        lf = check_locally_full(T, P, st)
        result.update({"induced": T.name, "warnings": list(T.warnings),
                       "stable": _verdict_block(st), "locally_full": _verdict_block(lf)})
        return Outcome(st.ok and lf.ok, result, bounds)
    P = ProbeUniverse(args.probe)
    st = check_stable(S, P)
    lf = check_locally_full(S, P, st)
    pw = check_pi_w_closure(S, P)
    rep = find_representation(S, P)
    ca = check_collection_axiom(S, P, lifts=args.lifts)
    result.update({
        "stable": _verdict_block(st),
        "locally_full": _verdict_block(lf) | {"split_applicable": lf.split_applicable,
                                              "split_agrees": lf.split_agrees},
        "pi_w_closure": _verdict_block(pw),
        "representability": {"ok": rep.ok, "U": len(rep.universal.U), "E": len(rep.universal.E),
                             "represented": rep.witnesses, "failure": rep.failure},
        "collection_axiom": {"ok": ca.ok, "instances": ca.instances, "routes": ca.routes,
                             "counterexample": ca.counterexample,
                             "universal_map_is_collection_map": bool(ca.collection_map)},
    })
    ok = st.ok and lf.ok and pw.ok and rep.ok and ca.ok
    bounds["lifts"] = args.lifts
    return Outcome(ok, result, bounds)


def cmd_collsp(b: Bundle, args) -> Outcome:
    S = b.get(b.pick("map_class", args.klass), "map_class")
    fname = b.pick("function", args.map)
    f = b.get(fname, "function")
    rep = find_representation(S, ProbeUniverse(args.probe))
    d = collsp_construct(f, S, rep.universal)
    return Outcome(d.ok, {"map": fname, "class": S.name, "C": len(d.C), "D": len(d.D),
                          "quasi_pullback": d.quasi_pullback, "g_small": d.g_small,
                          "collection_span": d.collection_span,
                          "universal_fiber_sizes": [len(rep.universal.fiber(u)) for u in rep.universal.U]},
                   {"probe": args.probe})


def cmd_equiv_coll_site(b: Bundle, args) -> Outcome:
    S = b.get(b.pick("map_class", args.klass), "map_class")
    name = b.pick("site", args.site)
    s = b.get(name, "site")
    rep = find_representation(S, ProbeUniverse(args.probe))
    e = equiv_collection_site(s, S, rep.universal, args.max_size)
    ok = e.collection_site and e.small_covers and e.same_sheaves
    return Outcome(ok, {"site": name, "class": S.name, "covers": len(e.site.covers),
                        "collection_site": e.collection_site, "small_covers": e.small_covers,
                        "same_sheaves": e.same_sheaves,
                        "site_document": site_doc(e.site, b.docs[name]["category"])},
                   {"probe": args.probe, "max_size": args.max_size})


COMMANDS: dict[str, Callable[[Bundle, Any], Outcome]] = {
    "validate": cmd_validate,
    "gen-site": cmd_gen_site,
    "check-sheaf": cmd_check_sheaf,
    "sheafify": cmd_sheafify,
    "same-sheaves": cmd_same_sheaves,
    "wtype": cmd_wtype,
    "wtype-presheaf": cmd_wtype_presheaf,
    "check-class": cmd_check_class,
    "collsp": cmd_collsp,
    "equiv-coll-site": cmd_equiv_coll_site,
}


# ---------------------------------------------------------------- output


def _text(value: Any, indent: int = 0) -> list[str]:
    pad = "  " * indent
    if isinstance(value, dict):
        lines = []
        for k in sorted(value):
            v = value[k]
            if isinstance(v, (dict, list)) and v:
                lines.append(f"{pad}{k}:")
                lines.extend(_text(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {json.dumps(v, ensure_ascii=False)}")
        return lines
    if isinstance(value, list):
        if all(not isinstance(v, (dict, list)) for v in value):
            return [pad + json.dumps(value, ensure_ascii=False)]
        out = []
        for v in value:
            sub = _text(v, indent + 1)
            out.append(pad + "- " + sub[0].strip())
            out.extend(sub[1:])
        return out
    return [pad + json.dumps(value, ensure_ascii=False)]


def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return dumps(report)
    head = f"{report['command']}: {'PASS' if report.get('ok') else 'FAIL'}"
    return "\n".join([head] + _text({k: v for k, v in report.items() if k not in ("command", "ok")})) + "\n"


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="toposforge", description="Finite checks for sites, sheaves, W-types and small maps.")
    p.add_argument("--format", choices=("json", "text"), default="text")
    p.add_argument("--no-timing", action="store_true", help="omit the timing block")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name: str, help: str) -> argparse.ArgumentParser:
        q = sub.add_parser(name, help=help)
        q.add_argument("inputs", nargs="+", help="JSON documents or corpus bundles")
        return q

    sub.add_parser("corpus", help="print the built-in corpus bundle")
    add("validate", "check schemas and category/functor laws")
    q = add("gen-site", "inductively generated Grothendieck site")
    q.add_argument("--site")
    q.add_argument("--depth", type=int, default=3)
    q.add_argument("--max-size", type=int, default=2)
    for name, help in (("check-sheaf", "sheaf condition with witnesses"), ("sheafify", "associated sheaf")):
        q = add(name, help)
        q.add_argument("--site")
        q.add_argument("--presheaf")
    q = add("same-sheaves", "compare sheaf conditions of two sites")
    q.add_argument("--site")
    g = q.add_mutually_exclusive_group()
    g.add_argument("--other")
    g.add_argument("--generated", type=int, metavar="DEPTH")
    q.add_argument("--max-size", type=int, default=2)
    q = add("wtype", "W-type of a finite signature")
    q.add_argument("--map")
    q.add_argument("--depth", type=int, default=5)
    q = add("wtype-presheaf", "W-type of a presheaf morphism")
    q.add_argument("--morphism")
    q.add_argument("--depth", type=int, default=3)
    q = add("check-class", "small-map axioms over a probe")
    q.add_argument("--class", dest="klass")
    q.add_argument("--probe", type=int, default=3)
    q.add_argument("--lifts", choices=("any", "epi"), default="any")
    g = q.add_mutually_exclusive_group()
    g.add_argument("--category", help="check the induced presheaf class")
    g.add_argument("--site", help="check the induced sheaf class")
    q = add("collsp", "collection span for a small map")
    q.add_argument("--map")
    q.add_argument("--class", dest="klass")
    q.add_argument("--probe", type=int, default=3)
    q = add("equiv-coll-site", "equivalent collection site")
    q.add_argument("--site")
    q.add_argument("--class", dest="klass")
    q.add_argument("--probe", type=int, default=3)
    q.add_argument("--max-size", type=int, default=2)
    return p


def _positive(args) -> None:
    for key in ("depth", "max_size", "probe", "generated"):
        v = getattr(args, key, None)
        if v is not None and v < (0 if key in ("max_size", "probe") else 1):
            raise DocumentError("arguments", f"--{key.replace('_', '-')} out of range: {v}")


def main(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    args = build_parser().parse_args(argv)
    if args.command == "corpus":
        out.write(dumps(builtin_bundle()))
        return 0
    start = time.perf_counter()
    try:
        _positive(args)
        bundle = load(args.inputs)
        outcome = COMMANDS[args.command](bundle, args)
    except DocumentError as e:
        err.write(f"invalid input: {e}\n")
        return 2
    except InputError as e:
        err.write(f"invalid input: {e}\n")
        return 2
    except BudgetExceeded as e:
        err.write(f"budget exceeded: {e}\n")
        return 2
    report = {
        "command": args.command,
        "inputs": bundle.sources,
        "bounds": outcome.bounds,
        "result": outcome.result,
        "witnesses": outcome.witnesses,
        "ok": outcome.ok,
    }
    if not args.no_timing:
        report["timing"] = {"seconds": round(time.perf_counter() - start, 3)}
    out.write(render(report, args.format))
    return 0 if outcome.ok else 1
