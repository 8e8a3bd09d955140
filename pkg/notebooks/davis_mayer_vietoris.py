"""Davis complexes of flag complexes and the Mayer-Vietoris splitting at a vertex."""

from flaggrowth import builtin, davis_betti, embedding_criterion, mv_check

for name in ["cycle_4", "octahedron", "icosahedron"]:
    L = builtin(name)
    for char in (0, 2):
        t = davis_betti(L, char)
        print(f"{name:<12} {t.field:<4} Y_L betti {t.betti}  (2^|V| = {t.index})")
    print(f"  top reduced F_2 Betti of L vanishes: {embedding_criterion(L)}")
    r = mv_check(L, L.vertices[0], 2)
    print(f"  MV at {r.vertex}: alpha={r.alpha} beta={r.beta} delta={r.delta} "
          f"exact={r.exact} surjective={r.surjective}")
