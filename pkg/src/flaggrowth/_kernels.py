"""Numba kernels for exact rank computation over prime fields.

The sparse kernel is a right-looking structured Gaussian elimination.
Rows live in a growable pool of (column, value) segments sorted by column;
each column keeps an append-only list of rows that may contain it (stale
entries are pruned when the column is visited).  Pivot columns are taken in
Markowitz order approximated by minimum column count, with a lazy binary heap
keyed on ``count * ncols + col`` so ties go to the lowest column index.  Within
the pivot column the shortest row wins, ties again to the lowest index.

When the active submatrix becomes dense the remaining rows are gathered and
finished by a dense elimination: bit-packed ``uint64`` rows for p = 2, plain
``int64`` arithmetic otherwise.  All moduli are below 2**31 so every product
of two residues fits in a signed 64-bit word.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def _modinv(a, p):
    # extended Euclid; a is a nonzero residue
    t, newt = 0, 1
    r, newr = p, a
    while newr != 0:
        q = r // newr
        t, newt = newt, t - q * newt
        r, newr = newr, r - q * newr
    if t < 0:
        t += p
    return t


@njit(cache=True)
def _heap_push(heap, size, key):
    if size >= heap.shape[0]:
        grown = np.empty(heap.shape[0] * 2, dtype=np.int64)
        grown[:size] = heap[:size]
        heap = grown
    i = size
    heap[i] = key
    while i > 0:
        parent = (i - 1) >> 1
        if heap[parent] <= heap[i]:
            break
        heap[parent], heap[i] = heap[i], heap[parent]
        i = parent
    return heap, size + 1


@njit(cache=True)
def _heap_pop(heap, size):
    top = heap[0]
    size -= 1
    heap[0] = heap[size]
    i = 0
    while True:
        left = 2 * i + 1
        if left >= size:
            break
        child = left
        if left + 1 < size and heap[left + 1] < heap[left]:
            child = left + 1
        if heap[i] <= heap[child]:
            break
        heap[i], heap[child] = heap[child], heap[i]
        i = child
    return top, size


@njit(cache=True)
def _find(cols, start, length, c):
    lo = start
    hi = start + length
    while lo < hi:
        mid = (lo + hi) >> 1
        if cols[mid] < c:
            lo = mid + 1
        else:
            hi = mid
    if lo < start + length and cols[lo] == c:
        return lo
    return -1


@njit(cache=True)
def dense_rank_gf2(rows):
    """Rank of a bit-packed GF(2) matrix (one row of uint64 words per row)."""
    m = rows.shape[0]
    if m == 0:
        return 0
    nwords = rows.shape[1]
    rank = 0
    for w in range(nwords):
        for b in range(64):
            bit = np.uint64(1) << np.uint64(b)
            piv = -1
            for i in range(rank, m):
                if rows[i, w] & bit:
                    piv = i
                    break
            if piv < 0:
                continue
            if piv != rank:
                for k in range(w, nwords):
                    tmp = rows[piv, k]
                    rows[piv, k] = rows[rank, k]
                    rows[rank, k] = tmp
            for i in range(rank + 1, m):
                if rows[i, w] & bit:
                    for k in range(w, nwords):
                        rows[i, k] ^= rows[rank, k]
            rank += 1
            if rank == m:
                return rank
    return rank


@njit(cache=True)
def dense_rank_modp(a, p):
    """Rank of a dense int64 matrix of residues mod p (destroys ``a``)."""
    m, n = a.shape
    rank = 0
    for c in range(n):
        piv = -1
        for i in range(rank, m):
            if a[i, c] != 0:
                piv = i
                break
        if piv < 0:
            continue
        if piv != rank:
            for k in range(c, n):
                tmp = a[piv, k]
                a[piv, k] = a[rank, k]
                a[rank, k] = tmp
        inv = _modinv(a[rank, c], p)
        for k in range(c, n):
            a[rank, k] = a[rank, k] * inv % p
        for i in range(rank + 1, m):
            f = a[i, c]
            if f != 0:
                for k in range(c, n):
                    if a[rank, k] != 0:
                        a[i, k] = (a[i, k] - f * a[rank, k]) % p
        rank += 1
        if rank == m:
            break
    return rank


@njit(cache=True)
def sparse_rank_modp(m, n, indptr, indices, data, p, dense_cells, dense_fill, max_pool):
    """Rank mod p of the m x n CSR matrix (indices sorted within each row).

    ``data`` must already be reduced to nonzero residues in [1, p).  The kernel
    switches to dense elimination once the active submatrix has at most
    ``dense_cells`` entries and fill ratio at least ``dense_fill``.
    Returns ``(rank, sparse_pivots, dense_rows, dense_cols)``; rank is -1 when
    the fill would need a row pool of more than ``max_pool`` entries.
    """
    nnz = indptr[m]
    cap = max(4 * nnz + 1024, 1 << 16)
    pcols = np.empty(cap, dtype=np.int64)
    pvals = np.empty(cap, dtype=np.int64)
    pcols[:nnz] = indices
    pvals[:nnz] = data
    top = nnz
    rstart = indptr[:m].copy()
    rlen = indptr[1:] - indptr[:m]
    ralive = np.ones(m, dtype=np.bool_)

    # column -> candidate rows
    colcnt = np.zeros(n, dtype=np.int64)
    for k in range(nnz):
        colcnt[indices[k]] += 1
    ccap = np.maximum(colcnt * 2, 4)
    cstart = np.zeros(n, dtype=np.int64)
    acc = 0
    for j in range(n):
        cstart[j] = acc
        acc += ccap[j]
    cpool = np.empty(max(acc * 2, 1024), dtype=np.int64)
    ctop = acc
    clen = np.zeros(n, dtype=np.int64)
    for i in range(m):
        for k in range(indptr[i], indptr[i + 1]):
            j = indices[k]
            cpool[cstart[j] + clen[j]] = i
            clen[j] += 1
    calive = np.ones(n, dtype=np.bool_)

    heap = np.empty(max(2 * n, 16), dtype=np.int64)
    hsize = 0
    for j in range(n):
        heap, hsize = _heap_push(heap, hsize, colcnt[j] * n + j)

    live_rows = m
    live_nnz = nnz
    live_cols = 0
    for j in range(n):
        if colcnt[j] > 0:
            live_cols += 1

    rank = 0
    cand = np.empty(16, dtype=np.int64)
    stamp = np.full(m, -1, dtype=np.int64)
    step = 0
    while hsize > 0:
        if live_rows == 0 or live_cols == 0:
            break
        cells = live_rows * live_cols
        if cells <= dense_cells and live_nnz >= dense_fill * cells:
            break
        if hsize > 16 * n + 4096:
            # drop stale keys: rebuild from the live column counts
            hsize = 0
            for j in range(n):
                if calive[j]:
                    heap, hsize = _heap_push(heap, hsize, colcnt[j] * n + j)
        key, hsize = _heap_pop(heap, hsize)
        c = key % n
        cnt = key // n
        if not calive[c] or colcnt[c] != cnt:
            continue
        if cnt == 0:
            calive[c] = False
            continue

        # gather live rows holding c, pruning stale list entries
        step += 1
        nc = 0
        best = -1
        bestpos = -1
        keep = 0
        s0 = cstart[c]
        for t in range(clen[c]):
            i = cpool[s0 + t]
            if not ralive[i]:
                continue
            pos = _find(pcols, rstart[i], rlen[i], c)
            if pos < 0:
                continue
            if stamp[i] == step:
                continue
            stamp[i] = step
            if nc >= cand.shape[0]:
                grown = np.empty(cand.shape[0] * 2, dtype=np.int64)
                grown[:nc] = cand[:nc]
                cand = grown
            cand[nc] = i
            nc += 1
            cpool[s0 + keep] = i
            keep += 1
            if best < 0 or rlen[i] < rlen[best] or (rlen[i] == rlen[best] and i < best):
                best = i
                bestpos = pos
        clen[c] = keep

        r = best
        inv = _modinv(pvals[bestpos], p)
        rs = rstart[r]
        rl = rlen[r]
        for u in range(nc):
            i = cand[u]
            if i == r:
                continue
            pos = _find(pcols, rstart[i], rlen[i], c)
            f = pvals[pos] * inv % p
            # make room for the merged row
            need = top + rlen[i] + rl
            if need > pcols.shape[0]:
                # compact live rows into a fresh pool
                newcap = max(2 * pcols.shape[0], need * 2)
                if live_nnz + rlen[i] + rl > max_pool:
                    return -1, rank, 0, 0
                newcap = min(newcap, max(max_pool, need))
                ncols_ = np.empty(newcap, dtype=np.int64)
                nvals_ = np.empty(newcap, dtype=np.int64)
                t2 = 0
                for q in range(m):
                    if ralive[q]:
                        ln = rlen[q]
                        ncols_[t2:t2 + ln] = pcols[rstart[q]:rstart[q] + ln]
                        nvals_[t2:t2 + ln] = pvals[rstart[q]:rstart[q] + ln]
                        rstart[q] = t2
                        t2 += ln
                pcols = ncols_
                pvals = nvals_
                top = t2
                rs = rstart[r]
                # at the cap and still nearly full: further progress would thrash
                if newcap >= max_pool and 5 * top > 4 * newcap:
                    return -1, rank, 0, 0
            a = rstart[i]
            ae = a + rlen[i]
            b = rs
            be = rs + rl
            out = top
            while a < ae or b < be:
                if b >= be or (a < ae and pcols[a] < pcols[b]):
                    pcols[out] = pcols[a]
                    pvals[out] = pvals[a]
                    out += 1
                    a += 1
                elif a >= ae or pcols[b] < pcols[a]:
                    j = pcols[b]
                    v = (p - f * pvals[b] % p) % p
                    pcols[out] = j
                    pvals[out] = v
                    out += 1
                    b += 1
                    # new fill entry in column j
                    if colcnt[j] == 0:
                        live_cols += 1
                    colcnt[j] += 1
                    heap, hsize = _heap_push(heap, hsize, colcnt[j] * n + j)
                    if clen[j] >= ccap[j]:
                        newc = 2 * ccap[j]
                        if ctop + newc > cpool.shape[0]:
                            grown = np.empty(2 * (ctop + newc), dtype=np.int64)
                            grown[:ctop] = cpool[:ctop]
                            cpool = grown
                        cpool[ctop:ctop + clen[j]] = cpool[cstart[j]:cstart[j] + clen[j]]
                        cstart[j] = ctop
                        ccap[j] = newc
                        ctop += newc
                    cpool[cstart[j] + clen[j]] = i
                    clen[j] += 1
                else:
                    j = pcols[a]
                    v = (pvals[a] - f * pvals[b]) % p
                    if v != 0:
                        pcols[out] = j
                        pvals[out] = v
                        out += 1
                    elif j != c:
                        colcnt[j] -= 1
                        if colcnt[j] == 0:
                            live_cols -= 1
                        heap, hsize = _heap_push(heap, hsize, colcnt[j] * n + j)
                    a += 1
                    b += 1
            live_nnz += (out - top) - rlen[i]
            rstart[i] = top
            rlen[i] = out - top
            top = out
        # retire the pivot row and column
        for k in range(rs, rs + rl):
            j = pcols[k]
            if j == c:
                continue
            colcnt[j] -= 1
            if colcnt[j] == 0:
                live_cols -= 1
            heap, hsize = _heap_push(heap, hsize, colcnt[j] * n + j)
        ralive[r] = False
        live_rows -= 1
        live_nnz -= rl
        calive[c] = False
        colcnt[c] = 0
        live_cols -= 1
        rank += 1

    sparse_pivots = rank
    if live_rows == 0 or live_cols == 0:
        return rank, sparse_pivots, 0, 0

    # dense finish on the active submatrix
    colmap = np.full(n, -1, dtype=np.int64)
    nd = 0
    for j in range(n):
        if calive[j] and colcnt[j] > 0:
            colmap[j] = nd
            nd += 1
    md = 0
    rowlist = np.empty(live_rows, dtype=np.int64)
    for i in range(m):
        if ralive[i] and rlen[i] > 0:
            rowlist[md] = i
            md += 1
    if p == 2:
        nwords = (nd + 63) // 64
        dense = np.zeros((md, nwords), dtype=np.uint64)
        for t in range(md):
            i = rowlist[t]
            for k in range(rstart[i], rstart[i] + rlen[i]):
                j = colmap[pcols[k]]
                dense[t, j >> 6] |= np.uint64(1) << np.uint64(j & 63)
        rank += dense_rank_gf2(dense)
    else:
        dense = np.zeros((md, nd), dtype=np.int64)
        for t in range(md):
            i = rowlist[t]
            for k in range(rstart[i], rstart[i] + rlen[i]):
                dense[t, colmap[pcols[k]]] = pvals[k]
        rank += dense_rank_modp(dense, p)
    return rank, sparse_pivots, md, nd
