"""Finite chain complexes of free modules with sparse integer boundaries."""

from __future__ import annotations

import numpy as np

from .linalg import SparseIntMatrix, rank, random_primes, smith_normal_form

# exact integer check of d∘d up to this many nonzeros per product
EXACT_CHECK_NNZ = 2_000_000


def field_label(char: int) -> str:
    return "Q" if char == 0 else f"F_{char}"


def parse_field(tag) -> int:
    """Characteristic from ``0``/``'q'``/``'Q'`` or ``p``/``'f:p'``/``'F_p'``."""
    if isinstance(tag, int):
        return tag
    t = str(tag).strip()
    if t.lower() in ("q", "0", "qq"):
        return 0
    for prefix in ("f:", "F_", "f_", "F:"):
        if t.startswith(prefix):
            return int(t[len(prefix):])
    return int(t)


class ChainComplex:
    """Chain complex C_0 <- C_1 <- ... <- C_d.

    ``boundaries[k]`` maps degree-k chains to degree-(k-1) chains and has
    shape ``(dims[k-1], dims[k])``; ``boundaries[0]`` is the zero map to the
    zero module.  Ranks are cached per (degree, characteristic, seed).
    """

    def __init__(self, dims, boundaries, labels=None, name=None):
        self.dims = [int(d) for d in dims]
        if len(boundaries) != len(self.dims):
            raise ValueError("need one boundary matrix per degree")
        for k, b in enumerate(boundaries):
            want = (self.dims[k - 1] if k else 0, self.dims[k])
            if b.shape != want:
                raise ValueError(f"boundary {k} has shape {b.shape}, expected {want}")
        self.boundaries = list(boundaries)
        self.labels = labels
        self.name = name
        self._ranks = {}

    def __repr__(self):
        return f"ChainComplex({self.name or ''} dims={self.dims})"

    @property
    def top(self) -> int:
        return len(self.dims) - 1

    def boundary(self, k: int) -> SparseIntMatrix:
        if 0 <= k <= self.top:
            return self.boundaries[k]
        if k == self.top + 1:
            return SparseIntMatrix((self.dims[-1] if self.dims else 0, 0))
        return SparseIntMatrix((0, 0))

    def rank(self, k: int, char: int, seed: int = 0) -> int:
        if k <= 0 or k > self.top:
            return 0
        key = (k, char, seed if char == 0 else None)
        if key not in self._ranks:
            self._ranks[key] = rank(self.boundaries[k], char, seed)
        return self._ranks[key]

    def betti(self, char: int, seed: int = 0) -> list[int]:
        """Betti numbers over the prime field of characteristic ``char`` (0 = Q)."""
        r = [self.rank(k, char, seed) for k in range(self.top + 2)]
        return [self.dims[k] - r[k] - r[k + 1] for k in range(self.top + 1)]

    def euler_characteristic(self) -> int:
        return sum((-1) ** k * d for k, d in enumerate(self.dims))

    def check_dd(self, seed: int = 0, exact=None) -> bool:
        """Verify d_{k-1} d_k = 0 for all k.

        Exactly over Z when the matrices are small enough (or ``exact=True``),
        otherwise by applying both maps to random vectors modulo two random
        large primes.
        """
        primes = None
        for k in range(2, self.top + 1):
            a, b = self.boundaries[k - 1], self.boundaries[k]
            small = a.nnz + b.nnz <= EXACT_CHECK_NNZ
            if exact or (exact is None and small):
                if not (a @ b).is_zero():
                    return False
                continue
            if primes is None:
                gen = random_primes(seed)
                primes = [next(gen), next(gen)]
            rng = np.random.default_rng(seed + k)
            sa, sb = a.to_scipy(), b.to_scipy()
            for q in primes:
                x = rng.integers(0, q, size=b.shape[1], dtype=np.int64)
                # entries are tiny, so reduce after each sparse product
                y = _matvec_mod(sb, x, q)
                z = _matvec_mod(sa, y, q)
                if np.any(z):
                    return False
        return True

    def subcomplex(self, masks, name=None) -> "ChainComplex":
        """Subcomplex spanned by the cells selected in each degree.

        The selection must be closed under taking boundary faces; this is
        checked and a ``ValueError`` raised otherwise.
        """
        masks = [np.asarray(m, dtype=bool) for m in masks]
        bounds = []
        for k, b in enumerate(self.boundaries):
            if k:
                leak = b.submatrix(~masks[k - 1], masks[k])
                if leak.nnz:
                    raise ValueError(f"selection in degree {k} is not closed under boundary")
                bounds.append(b.submatrix(masks[k - 1], masks[k]))
            else:
                bounds.append(SparseIntMatrix((0, int(masks[0].sum()))))
        return ChainComplex([int(m.sum()) for m in masks], bounds, name=name)

    def quotient(self, masks, name=None) -> "ChainComplex":
        """Relative complex C / C_sub where ``masks`` select the subcomplex."""
        keep = [~np.asarray(m, dtype=bool) for m in masks]
        bounds = []
        for k, b in enumerate(self.boundaries):
            if k:
                bounds.append(b.submatrix(keep[k - 1], keep[k]))
            else:
                bounds.append(SparseIntMatrix((0, int(keep[0].sum()))))
        return ChainComplex([int(m.sum()) for m in keep], bounds, name=name)

    def integral_homology(self):
        """Per degree ``(free_rank, torsion_coefficients)`` via Smith normal form."""
        snf = [smith_normal_form(self.boundaries[k]) if k else [] for k in range(self.top + 1)]
        snf.append([])
        out = []
        for k in range(self.top + 1):
            rk = len(snf[k])
            rk1 = len(snf[k + 1])
            free = self.dims[k] - rk - rk1
            out.append((free, [d for d in snf[k + 1] if d > 1]))
        return out


def _matvec_mod(m, x, q):
    # split x so every partial product stays below 2**63
    lo = x & 0xFFFF
    hi = x >> 16
    y = (m @ lo) % q + ((m @ hi) % q) * (1 << 16) % q
    return y % q


def simplicial_chain_complex(L, name=None) -> ChainComplex:
    """Ordered simplicial chain complex of ``L`` (unreduced, degrees 0..dim)."""
    d = L.dim
    dims = [len(L.faces(k + 1)) for k in range(d + 1)]
    bounds = [SparseIntMatrix((0, dims[0] if dims else 0))]
    for k in range(1, d + 1):
        faces = L.faces(k + 1)
        idx = L.face_index(k)
        rows, cols, vals = [], [], []
        for j, f in enumerate(faces):
            for i in range(len(f)):
                rows.append(idx[f[:i] + f[i + 1:]])
                cols.append(j)
                vals.append(-1 if i % 2 else 1)
        bounds.append(SparseIntMatrix((dims[k - 1], dims[k]), rows, cols, vals))
    return ChainComplex(dims, bounds, name=name or L.name)


def reduced_betti(L, char: int, seed: int = 0) -> list[int]:
    """Reduced Betti numbers of ``L`` in degrees 0..dim over F_char (0 = Q).

    The complex ``{∅}`` with no vertices has reduced homology only in degree
    -1, which this list does not cover; it returns ``[]``.
    """
    if not L.vertices:
        return []
    b = simplicial_chain_complex(L).betti(char, seed)
    b[0] -= 1
    return b


def reduced_betti_at(L, degree: int, char: int, seed: int = 0) -> int:
    """Single reduced Betti number, valid for every integer degree (incl. -1)."""
    if not L.vertices:
        return 1 if degree == -1 else 0
    if degree < 0 or degree > L.dim:
        return 0
    return reduced_betti(L, char, seed)[degree]


def integral_homology(L):
    """Integral homology of ``L``: per degree ``(free_rank, torsion)`` (unreduced)."""
    return simplicial_chain_complex(L).integral_homology()
