"""Well-founded trees over a finite signature and over a presheaf base.

Run: python3 demos/wtypes.py
"""

from toposforge import InputError
from toposforge.corpus import bases
from toposforge.finset import (
    FinFunction,
    FinSet,
    Signature,
    check_wtype_characterization,
    kleene_iterate,
    nno_signature,
    structure_map,
    wtype_enumerate,
)
from toposforge.presheaf import PresheafMorphism, constant
from toposforge.wpresheaf import wtype_presheaf

nno = nno_signature()
print("natural numbers, terms of height <= d:")
for d in range(1, 6):
    W = wtype_enumerate(nno, d)
    K = kleene_iterate(nno, d)[d]
    print(f"  d={d}: {len(W)} terms, Kleene level has {len(K)}; longest {max(W, key=lambda w: w.height).label()}")

# A truncation is not closed under sup, so only saturated levels are algebras.
W2 = wtype_enumerate(nno, 2)
try:
    structure_map(nno, W2)
except InputError as exc:
    print("truncated carrier rejected:", exc)

# The booleans are a finite W-type: no recursion, so it saturates at once.
bools = Signature(FinFunction(FinSet(), FinSet(["false", "true"]), {}))
Wb = wtype_enumerate(bools, 1)
print("booleans accepted as a W-type:", check_wtype_characterization(bools, Wb, structure_map(bools, Wb)).is_wtype)

# The same signature read as constant presheaves over 0 -> 1.
arrow = bases()["arrow"]
f = PresheafMorphism(constant(arrow, ["*"]), constant(arrow, ["s", "z"]), {C: {"*": "s"} for C in arrow.objects})
W = wtype_presheaf(f, 3)
for C in arrow.objects:
    print(f"  W({C}) at depth 3:", [T.height for T in W.W(C)])
print("S: P_f(W_2) -> W_3 is an iso:", W.S.is_iso())
