"""Salvetti complexes of right-angled Artin groups and their abelian covers.

The cover attached to ``CoverSpec(n)`` is the one for the kernel of
A_L -> Q = prod_v Z/n_v sending each generator g_v to the unit vector e_v.
Its cells are pairs (q, sigma) with q in Q and sigma a face of L (the empty
face included), and the cube (q, sigma) with sigma = {v_1 < ... < v_k} has

    d(q, sigma) = sum_j (-1)^(j-1) [ (q + e_{v_j}, sigma - v_j) - (q, sigma - v_j) ].
"""

from __future__ import annotations

import itertools
import logging
import math
import time
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from sympy.ntheory import primitive_root

from .chains import ChainComplex, field_label, reduced_betti_at
from .complexes import SimplicialComplex, is_flag
from .linalg import SizeLimitError, SparseIntMatrix

log = logging.getLogger(__name__)

#: Default cap on the number of cells in any single degree.
DEFAULT_BUDGET = 5_000_000


class InconsistencyError(RuntimeError):
    """Computed ranks violate an identity that must hold (signals a rank failure)."""


@dataclass(frozen=True)
class CoverSpec:
    """Exponents n_v >= 1 defining Q = prod_v Z/n_v, in vertex order."""

    exponents: tuple

    @classmethod
    def uniform(cls, L: SimplicialComplex, n: int) -> "CoverSpec":
        return cls(tuple((v, int(n)) for v in L.vertices))

    @classmethod
    def of(cls, L: SimplicialComplex, spec) -> "CoverSpec":
        """Coerce an int (uniform), a mapping v -> n_v, or a CoverSpec."""
        if isinstance(spec, CoverSpec):
            out = spec
        elif isinstance(spec, int):
            out = cls.uniform(L, spec)
        else:
            out = cls(tuple(sorted((str(v), int(n)) for v, n in dict(spec).items())))
        out.validate(L)
        return out

    def __post_init__(self):
        for v, n in self.exponents:
            if n < 1:
                raise ValueError(f"exponent for {v!r} must be >= 1")
        if self.order >= 1 << 64:
            raise SizeLimitError("|Q| does not fit in 64 bits")

    def validate(self, L: SimplicialComplex):
        names = [v for v, _ in self.exponents]
        unknown = set(names) - set(L.vertices)
        if unknown:
            raise KeyError(f"unknown vertices in cover spec: {sorted(unknown)}")
        if sorted(names) != list(L.vertices):
            raise ValueError("cover spec must give one exponent per vertex")

    @property
    def mapping(self) -> dict:
        return dict(self.exponents)

    @property
    def order(self) -> int:
        return math.prod(n for _, n in self.exponents)

    def for_vertices(self, vertices) -> list[int]:
        m = self.mapping
        return [m[v] for v in vertices]

    def is_uniform(self):
        ns = {n for _, n in self.exponents}
        return len(ns) <= 1

    def describe(self) -> str:
        ns = sorted({n for _, n in self.exponents})
        if len(ns) == 1:
            return str(ns[0])
        return ";".join(f"{v}={n}" for v, n in self.exponents)


def _strides(ns):
    out = np.ones(len(ns), dtype=np.int64)
    for i in range(1, len(ns)):
        out[i] = out[i - 1] * ns[i - 1]
    return out


def build_cover_complex(L: SimplicialComplex, spec, budget: int = DEFAULT_BUDGET) -> ChainComplex:
    """Cellular chain complex of the Q-cover of the Salvetti complex of A_L."""
    spec = CoverSpec.of(L, spec)
    if not is_flag(L):
        warnings.warn(f"{L.name or 'complex'} is not flag; the Salvetti complex is not aspherical", stacklevel=2)
    ns = np.array(spec.for_vertices(L.vertices), dtype=np.int64)
    order = spec.order
    fv = L.f_vector
    dims = [order * c for c in fv]
    if max(dims) > budget:
        raise SizeLimitError(f"cover has {max(dims)} cells in one degree, budget {budget}")
    strides = _strides(ns)
    q = np.arange(order, dtype=np.int64)
    bounds = [SparseIntMatrix((0, dims[0]))]
    for k in range(1, len(fv)):
        faces = L.faces(k)
        lower = L.face_index(k - 1)
        fk, fl = len(faces), fv[k - 1]
        rows, cols, vals = [], [], []
        for a, face in enumerate(faces):
            col = q * fk + a
            for j, v in enumerate(face):
                b = lower[face[:j] + face[j + 1:]]
                sign = 1 if j % 2 == 0 else -1
                coord = (q // strides[v]) % ns[v]
                shifted = np.where(coord == ns[v] - 1, q - (ns[v] - 1) * strides[v], q + strides[v])
                rows += [shifted * fl + b, q * fl + b]
                cols += [col, col]
                vals += [np.full(order, sign), np.full(order, -sign)]
        bounds.append(SparseIntMatrix(
            (dims[k - 1], dims[k]), np.concatenate(rows), np.concatenate(cols), np.concatenate(vals)))
    name = f"cover({L.name},{spec.describe()})"
    return ChainComplex(dims, bounds, name=name)


def cell_label(L: SimplicialComplex, spec: CoverSpec, degree: int, cell: int):
    """Decode a cell id into ``(q_tuple, face_names)``."""
    ns = spec.for_vertices(L.vertices)
    fk = len(L.faces(degree))
    qi, a = divmod(cell, fk)
    coords = []
    for n in ns:
        qi, r = divmod(qi, n)
        coords.append(r)
    return tuple(coords), L.names(L.faces(degree)[a])


@dataclass
class BettiTable:
    """Betti numbers of one finite cover over one field."""

    complex: str
    cover: str
    index: int
    field: str
    betti: list
    seed: int = 0
    elapsed: float = 0.0
    target: list = field(default_factory=list)

    @property
    def normalized(self) -> list:
        return [Fraction(b, self.index) for b in self.betti]

    def euler_characteristic(self) -> int:
        return sum((-1) ** i * b for i, b in enumerate(self.betti))

    def to_dict(self, timing=True) -> dict:
        d = {
            "complex": self.complex,
            "cover": self.cover,
            "index": self.index,
            "field": self.field,
            "betti": list(self.betti),
            "normalized": [str(x) for x in self.normalized],
            "target": list(self.target),
            "seed": self.seed,
        }
        if timing:
            d["elapsed"] = round(self.elapsed, 3)
        return d


def cover_betti(L: SimplicialComplex, spec, char: int, seed: int = 0, budget: int = DEFAULT_BUDGET,
                complex_=None) -> BettiTable:
    """Betti numbers of the Q-cover over F_char (0 = Q), with the Euler check."""
    spec = CoverSpec.of(L, spec)
    t0 = time.perf_counter()
    cx = complex_ if complex_ is not None else build_cover_complex(L, spec, budget)
    betti = cx.betti(char, seed)
    elapsed = time.perf_counter() - t0
    expected = spec.order * sum((-1) ** k * c for k, c in enumerate(L.f_vector))
    got = sum((-1) ** i * b for i, b in enumerate(betti))
    if got != expected or min(betti) < 0:
        raise InconsistencyError(f"Euler characteristic {got} != {expected} for {cx.name}")
    target = [reduced_betti_at(L, i - 1, char, seed) for i in range(len(betti))]
    return BettiTable(L.name or "L", spec.describe(), spec.order, field_label(char), betti, seed, elapsed, target)


def normalized_betti_scan(L: SimplicialComplex, char: int, n_list, seed: int = 0,
                          budget: int = DEFAULT_BUDGET) -> list[BettiTable]:
    """One table per uniform exponent in ``n_list``; ``target`` holds reduced b_{i-1}(L)."""
    return [cover_betti(L, CoverSpec.uniform(L, n), char, seed, budget) for n in n_list]


def twisted_complex(L: SimplicialComplex, character, p: int, spec=None) -> ChainComplex:
    """One isotypic summand of the cover complex over F_p (p = 0: over Q).

    ``character`` maps each vertex to a unit of F_p (to +-1 when p = 0); the
    boundary is d(sigma) = sum_j (-1)^(j-1) (chi(v_j) - 1) (sigma - v_j).
    With ``spec`` given, every chi(v) must satisfy chi(v)^(n_v) = 1.
    """
    if p == 0:
        chi = {v: int(character[v]) for v in L.vertices}
        if any(x not in (1, -1) for x in chi.values()):
            raise ValueError("rational characters take values +-1")
    else:
        chi = {v: int(character[v]) % p for v in L.vertices}
        if any(x == 0 for x in chi.values()):
            raise ValueError("character values must be units")
    if spec is not None:
        spec = CoverSpec.of(L, spec)
        for v, n in spec.exponents:
            ok = chi[v] ** n == 1 if p == 0 else pow(chi[v], n, p) == 1
            if not ok:
                raise ValueError(f"chi({v}) = {chi[v]} is not an {n}-th root of unity mod {p}")
    fv = L.f_vector
    dims = list(fv)
    bounds = [SparseIntMatrix((0, dims[0]))]
    weights = []
    for v in L.vertices:
        w = chi[v] - 1
        # symmetric residue so that small integers survive reduction elsewhere
        if p and w > p // 2:
            w -= p
        weights.append(w)
    for k in range(1, len(fv)):
        lower = L.face_index(k - 1)
        rows, cols, vals = [], [], []
        for a, face in enumerate(L.faces(k)):
            for j, v in enumerate(face):
                if weights[v]:
                    rows.append(lower[face[:j] + face[j + 1:]])
                    cols.append(a)
                    vals.append(weights[v] if j % 2 == 0 else -weights[v])
        bounds.append(SparseIntMatrix((dims[k - 1], dims[k]), rows, cols, vals))
    return ChainComplex(dims, bounds, name=f"twisted({L.name})")


def characters(L: SimplicialComplex, spec, p: int):
    """All characters Q -> F_p^*, as dicts vertex -> root of unity."""
    spec = CoverSpec.of(L, spec)
    for v, n in spec.exponents:
        if n % p == 0 or (p - 1) % n:
            raise ValueError(f"F_{p} lacks the {n}-th roots of unity needed for vertex {v!r}")
    g = primitive_root(p) if p > 2 else 1
    choices = []
    for v, n in spec.exponents:
        zeta = pow(g, (p - 1) // n, p)
        choices.append([pow(zeta, k, p) for k in range(n)])
    names = [v for v, _ in spec.exponents]
    for values in itertools.product(*choices):
        yield dict(zip(names, values))


def twisted_betti_sum(L: SimplicialComplex, spec, p: int) -> list[int]:
    """Sum over all characters of the twisted Betti numbers over F_p."""
    total = [0] * (L.dim + 2)
    for chi in characters(L, spec, p):
        for i, b in enumerate(twisted_complex(L, chi, p).betti(p)):
            total[i] += b
    return total


def character_decomposition_check(L: SimplicialComplex, spec, p: int, seed: int = 0,
                                  budget: int = DEFAULT_BUDGET) -> bool:
    """Do the twisted Betti numbers over all characters add up to the cover's?"""
    spec = CoverSpec.of(L, spec)
    direct = build_cover_complex(L, spec, budget).betti(p, seed)
    return twisted_betti_sum(L, spec, p) == direct


def rational_betti_by_characters(L: SimplicialComplex, spec, seed: int = 0) -> list[int]:
    """Rational Betti numbers of an elementary abelian 2-cover via +-1 characters.

    For all n_v in {1, 2} every character of Q takes values +-1, so the
    rational group algebra splits over Q itself and the cover's rational
    homology is the sum of the small twisted summands.
    """
    spec = CoverSpec.of(L, spec)
    if any(n not in (1, 2) for _, n in spec.exponents):
        raise ValueError("character splitting over Q needs all n_v in {1, 2}")
    names = [v for v, _ in spec.exponents]
    options = [(1, -1) if n == 2 else (1,) for _, n in spec.exponents]
    total = [0] * (L.dim + 2)
    for values in itertools.product(*options):
        for i, x in enumerate(twisted_complex(L, dict(zip(names, values)), 0).betti(0, seed)):
            total[i] += x
    return total


def torsion_rank_profile(L: SimplicialComplex, spec, p: int, seed: int = 0, budget: int = DEFAULT_BUDGET,
                         complex_=None, tables=None) -> list[int]:
    """Number of Z/p^k summands in each integral homology group of the cover.

    Uses b_i(F_p) = b_i(Q) + t_p(H_i) + t_p(H_{i-1}) and solves downward from
    the top degree, where integral homology is free.
    """
    spec = CoverSpec.of(L, spec)
    if tables is None:
        cx = complex_ if complex_ is not None else build_cover_complex(L, spec, budget)
        tq = cover_betti(L, spec, 0, seed, complex_=cx)
        tp = cover_betti(L, spec, p, seed, complex_=cx)
    else:
        tq, tp = tables
    bq, bp = tq.betti, tp.betti
    top = len(bq) - 1
    t = [0] * (top + 1)
    # t_p(H_top) = 0, then t_p(H_{i-1}) = b_i(F_p) - b_i(Q) - t_p(H_i)
    for i in range(top, 0, -1):
        t[i - 1] = bp[i] - bq[i] - t[i]
    if any(x < 0 for x in t) or bp[0] - bq[0] - t[0] != 0:
        raise InconsistencyError(f"torsion ranks {t} inconsistent with Betti numbers {bq} / {bp}")
    return t
