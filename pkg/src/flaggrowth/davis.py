"""Davis complexes of right-angled Coxeter groups and Mayer-Vietoris checks.

For a flag complex L on V the cube complex Y_L has one k-cube for each face
sigma of size k and each sign vector eps on V - sigma.  It is the cover of
the cube complex of L belonging to the kernel of W_L -> (Z/2)^V; its vertex
links are copies of L and its cells are counted by 2^(|V|-k) f_{k-1}(L).
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .chains import ChainComplex, field_label, reduced_betti
from .complexes import SimplicialComplex, delete_vertex, is_flag, is_isomorphic, link, star
from .linalg import SizeLimitError, SparseIntMatrix, rank
from .salvetti import DEFAULT_BUDGET, BettiTable, InconsistencyError

log = logging.getLogger(__name__)

#: Link check covers every vertex up to this many; beyond it a random sample.
LINK_CHECK_ALL = 1 << 16
LINK_SAMPLE = 256


def _insert_bit(eps: np.ndarray, pos: int, bit: int) -> np.ndarray:
    low = eps & ((1 << pos) - 1)
    high = eps >> pos
    return (high << (pos + 1)) | (bit << pos) | low


@dataclass
class DavisComplex:
    """Y_L as a chain complex; cell id = face_index * 2^(|V|-k) + eps."""

    L: SimplicialComplex
    chain: ChainComplex

    @property
    def index(self) -> int:
        return 1 << len(self.L.vertices)

    def cell(self, degree: int, cell_id: int):
        """(face names, {vertex: +-1}) for a cell id."""
        nv = len(self.L.vertices)
        block = 1 << (nv - degree)
        a, eps = divmod(int(cell_id), block)
        face = self.L.faces(degree)[a]
        rest = [v for v in range(nv) if v not in face]
        signs = {self.L.vertices[v]: 1 if eps >> i & 1 else -1 for i, v in enumerate(rest)}
        return self.L.names(face), signs

    def face_mask(self, sub: SimplicialComplex) -> list[np.ndarray]:
        """Cells (sigma, eps) with sigma in ``sub``, per degree."""
        nv = len(self.L.vertices)
        masks = []
        for k in range(len(self.chain.dims)):
            inside = np.array([self.L.names(f) in sub for f in self.L.faces(k)], dtype=bool)
            masks.append(np.repeat(inside, 1 << (nv - k)))
        return masks

    def corners(self) -> list[np.ndarray]:
        """Vertex ids of every cube, read off the boundary matrices.

        Row c of the degree-k array lists the 2^k vertices of cube c in
        increasing order.  Raises if some cube does not have the vertex set
        of a k-cube (each corner shared by exactly k facets).
        """
        out = [np.arange(self.chain.dims[0], dtype=np.int64)[:, None]]
        for k in range(1, len(self.chain.dims)):
            b = self.chain.boundaries[k].to_scipy("csc")
            per = np.diff(b.indptr)
            if np.any(per != 2 * k):
                raise InconsistencyError(f"a {k}-cube does not have {2 * k} facets")
            faces = b.indices.reshape(-1, 2 * k)
            pts = np.sort(out[k - 1][faces].reshape(len(faces), -1), axis=1)
            # every corner of a k-cube lies on exactly k of its facets
            uniq = pts[:, ::k]
            if not np.array_equal(np.repeat(uniq, k, axis=1), pts):
                raise InconsistencyError(f"{k}-cubes do not close up")
            if k > 1 and np.any(uniq[:, 1:] == uniq[:, :-1]):
                raise InconsistencyError(f"degenerate {k}-cube")
            out.append(uniq)
        return out

    def incidence(self, corners=None) -> list[sp.csr_matrix]:
        """Per degree, a vertex-by-cube 0/1 matrix from ``corners``."""
        corners = corners if corners is not None else self.corners()
        n = self.chain.dims[0]
        out = []
        for c in corners:
            cols = np.repeat(np.arange(len(c)), c.shape[1])
            out.append(sp.csr_matrix((np.ones(c.size, dtype=np.int8), (c.ravel(), cols)),
                                     shape=(n, len(c))))
        return out

    def vertex_link(self, x: int, corners=None, incidence=None) -> SimplicialComplex:
        """Link of vertex ``x`` with vertices named by edge direction."""
        corners = corners if corners is not None else self.corners()
        inc = incidence if incidence is not None else self.incidence(corners)
        nv = len(self.L.vertices)
        edges = corners[1]
        block = 1 << (nv - 1)
        at = inc[1].indices[inc[1].indptr[x]:inc[1].indptr[x + 1]]
        # edge id // block is the index of its direction in L
        other = {int(edges[e][edges[e] != x][0]): self.L.vertices[e // block] for e in at}
        if len(set(other.values())) != len(other):
            raise InconsistencyError("two edges at one vertex share a direction")
        simplices = [[v] for v in other.values()]
        for k in range(2, len(corners)):
            cubes = inc[k].indices[inc[k].indptr[x]:inc[k].indptr[x + 1]]
            for row in corners[k][cubes]:
                simplices.append([other[int(y)] for y in row if int(y) in other])
        return SimplicialComplex(simplices)


def build_davis(L: SimplicialComplex, budget: int = DEFAULT_BUDGET, check: bool = True,
                seed: int = 0) -> DavisComplex:
    """Cellular chain complex of Y_L.

    For sigma = {v_1 < ... < v_k} the boundary is
    sum_j (-1)^(j-1) [ (eps + {v_j -> +1}, sigma - v_j) - (eps + {v_j -> -1}, sigma - v_j) ].
    With ``check`` set, d d = 0 and the vertex links are verified.
    """
    if not is_flag(L):
        raise ValueError(f"{L.name or 'L'} is not a flag complex")
    nv = len(L.vertices)
    fv = L.f_vector
    dims = [(1 << (nv - k)) * fv[k] for k in range(len(fv))]
    if max(dims) > budget:
        raise SizeLimitError(f"Davis complex needs {max(dims)} cells in one degree, budget {budget}")
    bounds = [SparseIntMatrix((0, dims[0]))]
    for k in range(1, len(fv)):
        lower = L.face_index(k - 1)
        eps = np.arange(1 << (nv - k), dtype=np.int64)
        lower_block = 1 << (nv - k + 1)
        rows, cols, vals = [], [], []
        for a, face in enumerate(L.faces(k)):
            col = a * len(eps) + eps
            for j, v in enumerate(face):
                base = lower[face[:j] + face[j + 1:]] * lower_block
                pos = v - j
                sign = 1 if j % 2 == 0 else -1
                for bit, s in ((1, sign), (0, -sign)):
                    rows.append(base + _insert_bit(eps, pos, bit))
                    cols.append(col)
                    vals.append(np.full(len(eps), s, dtype=np.int64))
        bounds.append(SparseIntMatrix((dims[k - 1], dims[k]), np.concatenate(rows),
                                      np.concatenate(cols), np.concatenate(vals)))
    cx = ChainComplex(dims, bounds, name=f"Y({L.name})")
    out = DavisComplex(L, cx)
    if check:
        if not cx.check_dd(seed):
            raise InconsistencyError("d d != 0 on the Davis complex")
        _check_links(out, seed)
    return out


def _check_links(dc: DavisComplex, seed: int):
    n = dc.chain.dims[0]
    if n <= LINK_CHECK_ALL:
        sample = range(n)
    else:
        sample = np.random.default_rng(seed).choice(n, LINK_SAMPLE, replace=False)
    corners = dc.corners()
    inc = dc.incidence(corners)
    for i, x in enumerate(sample):
        lk = dc.vertex_link(int(x), corners, inc)
        if lk != dc.L:
            raise InconsistencyError(f"link of vertex {x} differs from L")
        # one label-free comparison, independent of how edges were named
        if i == 0 and not is_isomorphic(lk, dc.L):
            raise InconsistencyError("vertex link is not isomorphic to L")


def davis_betti(L: SimplicialComplex, char: int, seed: int = 0, budget: int = DEFAULT_BUDGET,
                davis: DavisComplex | None = None) -> BettiTable:
    """Betti numbers of Y_L over F_char (0 = Q), normalized by 2^|V|."""
    t0 = time.perf_counter()
    dc = davis if davis is not None else build_davis(L, budget, seed=seed)
    betti = dc.chain.betti(char, seed)
    elapsed = time.perf_counter() - t0
    got = sum((-1) ** i * b for i, b in enumerate(betti))
    if got != dc.chain.euler_characteristic() or min(betti) < 0:
        raise InconsistencyError("Euler characteristic mismatch on the Davis complex")
    return BettiTable(L.name or "L", "Y_L", dc.index, field_label(char), betti, seed, elapsed)


def _restrict(b: SparseIntMatrix, rows, cols) -> SparseIntMatrix:
    return b.submatrix(rows, cols)


def _mask_matrix(mask: np.ndarray) -> sp.csr_matrix:
    return sp.diags(mask.astype(np.int64), format="csr")


@dataclass
class MVReport:
    """Ranks along the Mayer-Vietoris sequence of Y_L = Y_St(v) u Y_{L-v}."""

    complex: str
    vertex: str
    field: str
    cells: dict
    betti: dict
    alpha: list
    beta: list
    delta: list
    alternating_sum: int
    exact: bool
    surjective: bool
    lk_surjective_rank: list

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def mv_check(L: SimplicialComplex, v, char: int, seed: int = 0, budget: int = DEFAULT_BUDGET,
             davis: DavisComplex | None = None) -> MVReport:
    """Verify exactness of H(Y_Lk) -> H(Y_St) + H(Y_{L-v}) -> H(Y_L) -> ...

    alpha_i and beta_i are computed from ranks of boundary blocks; delta_i is
    then forced by exactness at H_i(Y_L) and checked against exactness at
    H_{i-1}(Y_Lk).  Also reports whether H_i(Y_Lk) -> H_i(Y_St) is onto.
    """
    v = str(v)
    dc = davis if davis is not None else build_davis(L, budget, seed=seed)
    cx = dc.chain
    pieces = {"St": star(L, v), "L-v": delete_vertex(L, v), "Lk": link(L, v)}
    masks = {k: dc.face_mask(c) for k, c in pieces.items()}
    masks["L"] = [np.ones(d, dtype=bool) for d in cx.dims]
    sub = {k: cx.subcomplex(m, name=k) for k, m in masks.items()}
    top = cx.top
    betti = {k: c.betti(char, seed) for k, c in sub.items()}

    def r(name, k):
        return sub[name].rank(k, char, seed)

    def z(name, k):
        return sub[name].dims[k] - r(name, k)

    alpha, beta, onto = [], [], []
    for i in range(top + 1):
        a = betti["Lk"][i] - (r("St", i + 1) + r("L-v", i + 1) - r("L", i + 1) - r("Lk", i + 1))
        alpha.append(a)
        # beta has image (Z_A + Z_B + B_L) / B_L; M = [d_i P_{A-C} d_{i+1} | -d_i on C]
        if i == 0:
            m_rank = 0
        else:
            d_i = cx.boundaries[i].to_scipy("csr")
            d_up = cx.boundary(i + 1).to_scipy("csr")
            a_only = masks["St"][i] & ~masks["Lk"][i]
            left = d_i @ _mask_matrix(a_only) @ d_up
            right = -d_i[:, np.nonzero(masks["Lk"][i])[0]]
            m = sp.hstack([left, right]).tocoo()
            m_rank = rank(SparseIntMatrix(m.shape, m.row, m.col, m.data), char, seed)
        # Z_A cap Z_B = Z_C, and dim((Z_A + Z_B) cap B_L) = r_{i+1}(L) + r_i(C) - rank M
        sum_z = z("St", i) + z("L-v", i) - z("Lk", i)
        cap = r("L", i + 1) + r("Lk", i) - m_rank
        beta.append(sum_z - cap)
        # H_i(Lk) -> H_i(St): rank = z_Lk - dim(Z_Lk cap B_St)
        quot = _rel_rank(cx, masks["St"], masks["Lk"], i + 1, char, seed)
        onto.append(z("Lk", i) - (r("St", i + 1) - quot))
    delta = [betti["L"][i] - beta[i] for i in range(top + 1)]
    exact = True
    for i in range(top + 1):
        if alpha[i] + beta[i] != betti["St"][i] + betti["L-v"][i]:
            exact = False
        lower = betti["Lk"][i - 1] - alpha[i - 1] if i else 0
        if delta[i] != lower:
            exact = False
        if min(alpha[i], beta[i], delta[i]) < 0:
            exact = False
    surjective = all(onto[i] == betti["St"][i] for i in range(top + 1))
    alt = sum((-1) ** i * (betti["Lk"][i] - betti["St"][i] - betti["L-v"][i] + betti["L"][i])
              for i in range(top + 1))
    exact = exact and alt == 0
    cells = {k: c.dims for k, c in sub.items()}
    return MVReport(L.name or "L", v, field_label(char), cells, betti, alpha, beta, delta, alt,
                    exact, surjective, onto)


def _rel_rank(cx, big, small, k, char, seed) -> int:
    """Rank of d_k on cells of ``big`` with rows restricted to ``big - small``."""
    if k <= 0 or k > cx.top:
        return 0
    rows = big[k - 1] & ~small[k - 1]
    return rank(_restrict(cx.boundaries[k], rows, big[k]), char, seed)


def embedding_criterion(L: SimplicialComplex, char: int = 2, seed: int = 0) -> bool:
    """True when the top reduced homology of L over F_char vanishes.

    If L embeds in a sphere of dimension dim L + 1 and is not that sphere,
    this holds over F_2; a False result rules such an embedding out.
    """
    b = reduced_betti(L, char, seed)
    return not b or b[-1] == 0
