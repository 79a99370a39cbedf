"""Classes of small maps checked over a three-point probe.

Run: python3 demos/smallmaps.py
"""

from toposforge.corpus import sites
from toposforge.smallmap import (
    AllMaps,
    FiberBound,
    ProbeUniverse,
    check_locally_full,
    check_stable,
    equiv_collection_site,
    find_representation,
)

probe = ProbeUniverse(3)
for k in (FiberBound(2), AllMaps()):
    st = check_stable(k, probe)
    lf = check_locally_full(k, probe, st)
    print(f"{k.name}: stable={st.ok} S4={lf.s4} S4a={lf.s4a} S4b={lf.s4b} split agrees={lf.split_agrees}")
    for w in lf.witnesses("S4a")[:1]:
        print("  composition witness:", w.witness)

rep = find_representation(FiberBound(2), probe)
print("universal small map: U =", list(rep.universal.U), "| represents", rep.witnesses, "maps")

eq = equiv_collection_site(sites()["cospan"], FiberBound(2), rep.universal)
print(f"cospan replaced by {len(eq.site.covers)} covers; collection={eq.collection_site} "
      f"small={eq.small_covers} same sheaves={eq.same_sheaves}")
