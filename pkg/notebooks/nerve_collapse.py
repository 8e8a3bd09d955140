"""Cover homology against the nerve prediction from the maximal-simplex cover."""

import warnings

from flaggrowth import builtin, collapse_report, e1_dimensions, nerve_subcomplex

# rp2_6 is not flag; the finite covers are still well defined
warnings.simplefilter("ignore", UserWarning)

for name, n in [("cycle_5", 2), ("octahedron", 2), ("rp2_6", 2)]:
    L = builtin(name)
    nerve = nerve_subcomplex(L)
    e1 = e1_dimensions(L, n)
    print(f"== {name}  n={n}  nerve f-vector {nerve.f_vector}  |Q|={e1.index}")
    for row in collapse_report(L, n, 0):
        print("  deg {degree}: cover {cover_normalized:>8}  nerve {nerve_normalized:>6}  "
              "gap {gap:>6} <= {gap_bound:>6}  {within_bound}".format(**row))
