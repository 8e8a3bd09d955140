"""Exact linear algebra over prime fields and the integers.

Ranks over F_p use a sparse Markowitz-ordered elimination (see ``_kernels``);
ranks over Q are obtained multi-modularly; Smith normal form is a dense-limit
elimination over Python integers.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from sympy import isprime, nextprime

from . import _kernels

log = logging.getLogger(__name__)

#: Smallest and largest moduli drawn by :func:`rational_rank`.
PRIME_LOW = 1 << 29
PRIME_HIGH = 1 << 31

#: Dense Smith normal form refuses inputs with more entries than this.
SNF_MAX_ENTRIES = 10**7

# dense finish is entered once the active block is at most this many cells
# and at least this full
DENSE_CELLS = 1 << 26
DENSE_FILL = 0.02
#: Cap on stored entries during sparse elimination (two int64 arrays each).
MAX_FILL = 1 << 26


class SizeLimitError(ValueError):
    """An input exceeds a configured size or cell budget."""


@dataclass(frozen=True)
class PrimeField:
    """The field F_p for a prime 2 <= p < 2**31."""

    p: int

    def __post_init__(self):
        p = int(self.p)
        if not 2 <= p < PRIME_HIGH:
            raise ValueError(f"modulus {p} outside [2, 2**31)")
        # sympy's isprime is deterministic below 2**64
        if not isprime(p):
            raise ValueError(f"{p} is not prime")
        object.__setattr__(self, "p", p)

    def __str__(self):
        return f"F_{self.p}"


class SparseIntMatrix:
    """Sparse integer matrix stored as deduplicated COO triples.

    Entries are int64; duplicates are summed and explicit zeros dropped on
    construction, so ``nnz`` always counts genuine nonzeros.
    """

    __slots__ = ("shape", "row", "col", "val")

    def __init__(self, shape, row=(), col=(), val=()):
        m, n = (int(x) for x in shape)
        if m < 0 or n < 0:
            raise ValueError("negative shape")
        row = np.asarray(row, dtype=np.int64).ravel()
        col = np.asarray(col, dtype=np.int64).ravel()
        val = np.asarray(val, dtype=np.int64).ravel()
        if not (row.shape == col.shape == val.shape):
            raise ValueError("row, col and val must have equal length")
        if row.size:
            if row.min() < 0 or row.max() >= m or col.min() < 0 or col.max() >= n:
                raise ValueError("index out of range")
            coo = sp.coo_matrix((val, (row, col)), shape=(m, n), dtype=np.int64)
            coo.sum_duplicates()
            coo.eliminate_zeros()
            row, col, val = coo.row.astype(np.int64), coo.col.astype(np.int64), coo.data.astype(np.int64)
        self.shape = (m, n)
        self.row = row
        self.col = col
        self.val = val

    @classmethod
    def from_dense(cls, a):
        a = np.asarray(a, dtype=np.int64)
        if a.ndim != 2:
            a = a.reshape(-1 if a.size else 0, a.shape[-1] if a.ndim else 0)
        r, c = np.nonzero(a)
        return cls(a.shape, r, c, a[r, c])

    @classmethod
    def from_scipy(cls, m):
        coo = sp.coo_matrix(m)
        return cls(coo.shape, coo.row, coo.col, coo.data.astype(np.int64))

    @classmethod
    def zeros(cls, m, n):
        return cls((m, n))

    @property
    def nnz(self):
        return int(self.val.size)

    def to_scipy(self, fmt="csr"):
        m = sp.coo_matrix((self.val, (self.row, self.col)), shape=self.shape, dtype=np.int64)
        return m.asformat(fmt)

    def to_dense(self):
        a = np.zeros(self.shape, dtype=np.int64)
        a[self.row, self.col] = self.val
        return a

    @property
    def T(self):
        return SparseIntMatrix((self.shape[1], self.shape[0]), self.col, self.row, self.val)

    def permute(self, row_perm=None, col_perm=None):
        """Return the matrix with row ``i`` moved to ``row_perm[i]`` (likewise columns)."""
        row = self.row if row_perm is None else np.asarray(row_perm, dtype=np.int64)[self.row]
        col = self.col if col_perm is None else np.asarray(col_perm, dtype=np.int64)[self.col]
        return SparseIntMatrix(self.shape, row, col, self.val)

    def submatrix(self, rows=None, cols=None):
        """Restrict to boolean masks (or index arrays) of rows and columns."""
        m, n = self.shape
        rsel = _as_mask(rows, m)
        csel = _as_mask(cols, n)
        rmap = np.cumsum(rsel) - 1
        cmap = np.cumsum(csel) - 1
        keep = rsel[self.row] & csel[self.col]
        return SparseIntMatrix(
            (int(rsel.sum()), int(csel.sum())),
            rmap[self.row[keep]], cmap[self.col[keep]], self.val[keep],
        )

    def __matmul__(self, other):
        prod = self.to_scipy() @ other.to_scipy()
        return SparseIntMatrix.from_scipy(prod)

    def __eq__(self, other):
        if not isinstance(other, SparseIntMatrix) or self.shape != other.shape:
            return NotImplemented if not isinstance(other, SparseIntMatrix) else False
        return (self.to_scipy() != other.to_scipy()).nnz == 0

    def __repr__(self):
        return f"SparseIntMatrix(shape={self.shape}, nnz={self.nnz})"

    def is_zero(self):
        return self.nnz == 0

    def mod(self, p):
        """Entries reduced to [0, p), zeros dropped."""
        return SparseIntMatrix(self.shape, self.row, self.col, np.mod(self.val, p))


def _as_mask(sel, size):
    if sel is None:
        return np.ones(size, dtype=bool)
    sel = np.asarray(sel)
    if sel.dtype == bool:
        if sel.shape != (size,):
            raise ValueError("mask has wrong length")
        return sel
    mask = np.zeros(size, dtype=bool)
    mask[sel.astype(np.int64)] = True
    return mask


def _csr_mod(m: SparseIntMatrix, p: int, transpose: bool):
    val = np.mod(m.val, p)
    keep = val != 0
    row, col = (m.col, m.row) if transpose else (m.row, m.col)
    shape = (m.shape[1], m.shape[0]) if transpose else m.shape
    csr = sp.csr_matrix((val[keep], (row[keep], col[keep])), shape=shape, dtype=np.int64)
    csr.sort_indices()
    return csr


def gfp_rank(m: SparseIntMatrix, field, *, dense_cells=None, dense_fill=None, max_fill=None) -> int:
    """Rank of ``m`` reduced modulo a prime.

    ``field`` is a :class:`PrimeField` or a prime int.  The elimination is
    sparse with Markowitz-style pivoting; p = 2 finishes on bit-packed rows.
    ``dense_cells``/``dense_fill`` override the switch to the dense finish
    (``dense_cells=0`` keeps the whole run sparse).  Raises
    :class:`SizeLimitError` when fill-in would exceed ``max_fill`` entries.
    """
    p = field.p if isinstance(field, PrimeField) else PrimeField(field).p
    rows, cols = m.shape
    if rows == 0 or cols == 0 or m.nnz == 0:
        return 0
    # store the shorter side as rows: fewer, longer merges
    csr = _csr_mod(m, p, transpose=rows > cols)
    if csr.nnz == 0:
        return 0
    r, c = csr.shape
    rank, _, md, nd = _kernels.sparse_rank_modp(
        r, c,
        csr.indptr.astype(np.int64), csr.indices.astype(np.int64), csr.data.astype(np.int64),
        p,
        DENSE_CELLS if dense_cells is None else dense_cells,
        DENSE_FILL if dense_fill is None else dense_fill,
        MAX_FILL if max_fill is None else max_fill,
    )
    if rank < 0:
        raise SizeLimitError(f"elimination fill-in exceeded {max_fill or MAX_FILL} entries "
                             f"on a {m.shape[0]}x{m.shape[1]} matrix mod {p}")
    if md:
        log.debug("gfp_rank p=%d shape=%s dense block %dx%d", p, m.shape, md, nd)
    return int(rank)


def random_primes(seed, low=PRIME_LOW, high=PRIME_HIGH):
    """Endless deterministic stream of distinct primes in [low, high)."""
    rng = np.random.default_rng(seed)
    seen = set()
    while True:
        q = nextprime(int(rng.integers(low, high)) - 1)
        if q >= high or q in seen:
            continue
        seen.add(q)
        yield int(q)


def rational_rank(m: SparseIntMatrix, seed: int = 0, max_primes: int = 8) -> int:
    """Rank over Q, Monte Carlo via ranks modulo random large primes.

    Primes are drawn from [2**29, 2**31) by a generator seeded with ``seed``.
    The rank mod p never exceeds the rational rank and equals it unless p
    divides every nonzero r x r minor.  By Hadamard's bound a minor of a
    matrix whose columns have Euclidean norm at most ``c`` is at most
    ``c**r`` in absolute value, so at most ``r*log2(c)/29`` primes of the
    range are bad, out of roughly 4.8e7 primes available.  Sampling stops
    once two distinct primes attain the current maximum; the result is wrong
    only if every sampled prime was bad, which for boundary matrices
    (entries in {-2,...,2}, a handful per column) has probability below
    ``(r*log2(c)/29/4.8e7)**2``.
    """
    rows, cols = m.shape
    if rows == 0 or cols == 0 or m.nnz == 0:
        return 0
    ranks = []
    for q in random_primes(seed):
        ranks.append(gfp_rank(m, q))
        best = max(ranks)
        if ranks.count(best) >= 2:
            return best
        if len(ranks) >= max_primes:
            log.warning("rational_rank: no two primes agreed after %d tries", max_primes)
            return best
    raise AssertionError("unreachable")


def rank(m: SparseIntMatrix, char: int, seed: int = 0) -> int:
    """Rank over the prime field of characteristic ``char`` (0 meaning Q)."""
    if char == 0:
        return rational_rank(m, seed)
    return gfp_rank(m, char)


def smith_normal_form(m: SparseIntMatrix) -> list[int]:
    """Invariant factors d_1 | d_2 | ... | d_r (all positive) of ``m``.

    Elimination runs on dict-of-rows Python integers, so nothing overflows.
    Coefficient growth is contained by always pivoting on an entry of least
    absolute value and reducing with nearest-integer quotients, which keeps
    every entry bounded by the current pivot after each sweep.  The diagonal
    produced this way need not form a divisibility chain; it is normalised
    afterwards with the (gcd, lcm) exchange.
    """
    rows, cols = m.shape
    if rows * cols > SNF_MAX_ENTRIES:
        raise SizeLimitError(f"{rows}x{cols} exceeds the dense Smith normal form limit")
    mat: dict[int, dict[int, int]] = {}
    for i, j, v in zip(m.row.tolist(), m.col.tolist(), m.val.tolist()):
        mat.setdefault(i, {})[j] = v
    colidx: dict[int, set] = {}
    for i, r in mat.items():
        for j in r:
            colidx.setdefault(j, set()).add(i)

    def setval(i, j, v):
        if v:
            mat.setdefault(i, {})[j] = v
            colidx.setdefault(j, set()).add(i)
            return
        r = mat.get(i)
        if r is None or r.pop(j, None) is None:
            return
        s = colidx[j]
        s.discard(i)
        if not s:
            del colidx[j]
        if not r:
            del mat[i]

    diag = []
    while mat:
        # least |entry|; ties by (row, col)
        pi, pj, pv = None, None, None
        for i in sorted(mat):
            for j, v in mat[i].items():
                if pv is None or abs(v) < abs(pv) or (abs(v) == abs(pv) and (i, j) < (pi, pj)):
                    pi, pj, pv = i, j, v
            if abs(pv) == 1:
                break
        while True:
            done = True
            # clear the pivot column
            for i in sorted(colidx.get(pj, ())):
                if i == pi:
                    continue
                q = _round_div(mat[i][pj], pv)
                for j, v in list(mat[pi].items()):
                    setval(i, j, mat.get(i, {}).get(j, 0) - q * v)
                if i in mat and pj in mat[i]:
                    done = False
            # clear the pivot row
            for j in sorted(mat[pi]):
                if j == pj:
                    continue
                q = _round_div(mat[pi][j], pv)
                for i in list(colidx.get(pj, ())):
                    setval(i, j, mat.get(i, {}).get(j, 0) - q * mat[i][pj])
                if j in mat.get(pi, {}):
                    done = False
            if done:
                break
            # a remainder survived: move the pivot to the smallest leftover
            cand = [(abs(v), i, pj) for i in colidx.get(pj, ()) for v in [mat[i][pj]] if i != pi]
            cand += [(abs(v), pi, j) for j, v in mat[pi].items() if j != pj]
            _, pi, pj = min(cand)
            pv = mat[pi][pj]
        diag.append(abs(pv))
        setval(pi, pj, 0)
    return _divisibility_chain(diag)


def _round_div(a: int, b: int) -> int:
    q, r = divmod(a, b)
    # nearest integer quotient keeps |a - q*b| <= |b|/2
    if 2 * abs(r) > abs(b):
        q += 1 if (r > 0) == (b > 0) else -1
    return q


def _divisibility_chain(diag):
    d = sorted(x for x in diag if x)
    for i in range(len(d)):
        for j in range(i + 1, len(d)):
            g = math.gcd(d[i], d[j])
            d[i], d[j] = g, d[i] // g * d[j]
    return sorted(d)


def write_sms(m: SparseIntMatrix, fh):
    """Write the SMS-style text dump: ``rows cols M``, 1-indexed triples, ``0 0 0``."""
    fh.write(f"{m.shape[0]} {m.shape[1]} M\n")
    order = np.lexsort((m.row, m.col))
    for k in order:
        fh.write(f"{m.row[k] + 1} {m.col[k] + 1} {m.val[k]}\n")
    fh.write("0 0 0\n")


def read_sms(fh) -> SparseIntMatrix:
    header = fh.readline().split()
    if len(header) != 3 or header[2] != "M":
        raise ValueError("not an SMS matrix header")
    shape = int(header[0]), int(header[1])
    r, c, v = [], [], []
    for line in fh:
        i, j, x = (int(t) for t in line.split())
        if i == 0 and j == 0:
            break
        r.append(i - 1)
        c.append(j - 1)
        v.append(x)
    return SparseIntMatrix(shape, r, c, v)
