"""The flag triangulation of RP^2 and its index-4096 cover.

Over Q and F_2 the top Betti numbers differ by one; the difference is a
single Z/2 summand in H_2 of the cover.  Takes roughly a minute.
"""

import time

from flaggrowth import CoverSpec, build_cover_complex, builtin, cover_betti, is_flag, torsion_rank_profile

L = builtin("rp2_flag")
print("flag:", is_flag(L), " f-vector:", L.f_vector)

spec = CoverSpec.uniform(L, 2)
t0 = time.perf_counter()
cx = build_cover_complex(L, spec)
print("cells per degree:", cx.dims)
tq = cover_betti(L, spec, 0, complex_=cx)
t2 = cover_betti(L, spec, 2, complex_=cx)
print("Q  :", tq.betti, [str(x) for x in tq.normalized])
print("F_2:", t2.betti, [str(x) for x in t2.normalized])
print("Z/2 summands per degree:", torsion_rank_profile(L, spec, 2, tables=(tq, t2)))
print(f"elapsed {time.perf_counter() - t0:.1f}s")
