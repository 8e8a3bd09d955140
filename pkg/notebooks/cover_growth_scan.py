"""Normalized Betti numbers of Salvetti covers as the exponent grows.

For each complex the normalized value b_i / |Q| is printed next to the
reduced Betti number of L one degree down.
"""

import warnings

from flaggrowth import builtin, normalized_betti_scan

# rp2_6 is not flag; the finite covers are still well defined
warnings.simplefilter("ignore", UserWarning)

for name, ns in [("cycle_4", [1, 2, 3, 4]), ("octahedron", [1, 2, 3]), ("rp2_6", [1, 2])]:
    L = builtin(name)
    print(f"== {name}  f-vector {L.f_vector}")
    for char in (0, 2):
        for t in normalized_betti_scan(L, char, ns):
            norm = " ".join(f"{float(x):.4f}" for x in t.normalized)
            print(f"  n={t.cover:<3} {t.field:<4} betti={t.betti}  normalized=[{norm}]  target={t.target}")
