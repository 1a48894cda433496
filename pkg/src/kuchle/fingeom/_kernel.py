"""Compiled enumeration of constrained subspaces of F_p^n.

Subspaces are produced in RREF, one pivot pattern at a time. Row r has a 1 in
its pivot column, zeros at every other pivot column and free entries in the
non-pivot columns to the right of its pivot. Each constraint is linear in the
newest row once the earlier rows are fixed, so every row ranges over the
solution set of a small affine system instead of over all free entries.

Forms are dense int64 arrays indexed by bitmask, so a monomial x_I sits at
index sum(1 << i for i in I). A constraint is a pair (kind, form):

* ISO: the form vanishes on every tuple of rows (isotropy);
* ANN: contracting the form by all k rows gives zero (annihilation).

T[f, S] caches the form f contracted by the rows in the row-subset S.
"""

from __future__ import annotations

import numpy as np
from numba import njit

ISO = 0
ANN = 1
MAXEQ = 512


@njit(cache=True, nogil=True)
def _popcount(m):
    c = 0
    while m:
        m &= m - 1
        c += 1
    return c


@njit(cache=True, nogil=True)
def grade_masks(n):
    """gm[g, :gc[g]] lists the bitmasks of popcount g below 2^n."""
    gm = np.zeros((n + 1, 1 << n), dtype=np.int64)
    gc = np.zeros(n + 1, dtype=np.int64)
    for m in range(1 << n):
        g = _popcount(m)
        gm[g, gc[g]] = m
        gc[g] += 1
    return gm, gc


@njit(cache=True, nogil=True)
def _contract_vec(src, g, v, n, p, dst, gm, gc):
    """dst = src ⌟ v for a form of grade g, v in the leading slot, mod p.

    Only the grade g-1 entries of dst are written.
    """
    if g == 0:
        return
    for t in range(gc[g - 1]):
        dst[gm[g - 1, t]] = 0
    for t in range(gc[g]):
        m = gm[g, t]
        c = src[m]
        if c == 0:
            continue
        below = 0
        for i in range(n):
            bit = 1 << i
            if m & bit:
                if v[i] != 0:
                    if below & 1:
                        dst[m ^ bit] -= c * v[i]
                    else:
                        dst[m ^ bit] += c * v[i]
                below += 1
    for t in range(gc[g - 1]):
        dst[gm[g - 1, t]] %= p


@njit(cache=True, nogil=True)
def _solve(E, neq, nv, p, inv, part, null, pivrow):
    """Row-reduce the augmented system E[:neq, :nv+1] in place.

    Fills ``part`` with a particular solution and ``null[:d]`` with a basis
    of the homogeneous solutions. Returns d, or -1 when inconsistent.
    """
    r = 0
    for c in range(nv):
        pivrow[c] = -1
    for c in range(nv):
        piv = -1
        for i in range(r, neq):
            if E[i, c] % p != 0:
                piv = i
                break
        if piv < 0:
            continue
        if piv != r:
            for j in range(nv + 1):
                tmp = E[r, j]
                E[r, j] = E[piv, j]
                E[piv, j] = tmp
        s = inv[E[r, c] % p]
        for j in range(nv + 1):
            E[r, j] = (E[r, j] * s) % p
        for i in range(neq):
            if i != r:
                f = E[i, c] % p
                if f != 0:
                    for j in range(nv + 1):
                        E[i, j] = (E[i, j] - f * E[r, j]) % p
        pivrow[c] = r
        r += 1
        if r == neq:
            break
    for i in range(r, neq):
        if E[i, nv] % p != 0:
            return -1
    for c in range(nv):
        part[c] = 0
    for c in range(nv):
        if pivrow[c] >= 0:
            part[c] = E[pivrow[c], nv] % p
    d = 0
    for c in range(nv):
        if pivrow[c] < 0:
            for j in range(nv):
                null[d, j] = 0
            null[d, c] = 1
            for c2 in range(nv):
                if pivrow[c2] >= 0:
                    null[d, c2] = (-E[pivrow[c2], c]) % p
            d += 1
    return d


@njit(cache=True, nogil=True)
def _setup_level(r, k, n, p, pattern, rows, T, coefs, grades, kinds, nf,
                 freecols, nfree, part, null, dims, inv, E, pivrow):
    """Collect the linear conditions on row r and solve them; returns p^d or 0."""
    c0 = pattern[r]
    nv = 0
    for j in range(c0 + 1, n):
        is_piv = False
        for t in range(k):
            if pattern[t] == j:
                is_piv = True
        if not is_piv:
            freecols[r, nv] = j
            nv += 1
    nfree[r] = nv
    neq = 0
    for f in range(nf):
        g = grades[f]
        if kinds[f] == ISO:
            need = g - 1
            if need > r:
                continue
            for S in range(1 << r):
                if _popcount(S) != need:
                    continue
                cv = T[f, S]
                # cv is a 1-form; the condition is cv(u_r) = 0
                for a in range(nv):
                    E[neq, a] = cv[1 << freecols[r, a]]
                E[neq, nv] = (-cv[1 << c0]) % p
                neq += 1
        else:
            if r != k - 1:
                continue
            G = T[f, (1 << (k - 1)) - 1]
            h = g - k + 1
            for J in range(1 << n):
                if _popcount(J) != h - 1:
                    continue
                # (G ⌟ u)_J = sum_i u_i * sign * G[J | i]
                any_nz = False
                for a in range(nv + 1):
                    E[neq, a] = 0
                for i in range(n):
                    bit = 1 << i
                    if J & bit:
                        continue
                    val = G[J | bit]
                    if val == 0:
                        continue
                    if _popcount(J & (bit - 1)) & 1:
                        val = p - val
                    any_nz = True
                    if i == c0:
                        E[neq, nv] = (E[neq, nv] - val) % p
                    else:
                        for a in range(nv):
                            if freecols[r, a] == i:
                                E[neq, a] = (E[neq, a] + val) % p
                if any_nz:
                    neq += 1
    if neq == 0:
        for a in range(nv):
            part[r, a] = 0
            for b in range(nv):
                null[r, a, b] = 0
            null[r, a, a] = 1
        dims[r] = nv
        return p ** nv
    d = _solve(E, neq, nv, p, inv, part[r], null[r], pivrow)
    if d < 0:
        dims[r] = -1
        return 0
    dims[r] = d
    return p ** d


@njit(cache=True, nogil=True)
def _fill_row(r, idx, n, p, pattern, freecols, nfree, part, null, dims, rows):
    nv = nfree[r]
    d = dims[r]
    for j in range(n):
        rows[r, j] = 0
    rows[r, pattern[r]] = 1
    for a in range(nv):
        rows[r, freecols[r, a]] = part[r, a]
    x = idx
    for b in range(d):
        digit = x % p
        x //= p
        if digit:
            for a in range(nv):
                rows[r, freecols[r, a]] = (rows[r, freecols[r, a]] + digit * null[r, b, a]) % p


@njit(cache=True, nogil=True)
def _update_tables(r, k, n, p, rows, T, grades, nf, gm, gc):
    for f in range(nf):
        g = grades[f]
        top = min(g - 1, k - 1)
        for S in range(1 << r):
            s = _popcount(S)
            if s + 1 > top:
                continue
            _contract_vec(T[f, S], g - s, rows[r], n, p, T[f, S | (1 << r)], gm, gc)


@njit(cache=True, nogil=True)
def enumerate_chunk(n, k, p, pattern, lo, hi, coefs, grades, kinds, inv, store, buf, hist):
    """Count, store, or rank-profile the solutions with a fixed pivot pattern.

    The first row runs over solution indices lo <= i < hi. ``store`` is
    0 (count), 1 (store rows in buf) or 2 (rank histogram). Mode 2 adds to
    hist[r] for each solution U, r being the rank of the map
    ∧^{k-1} U → V∨ given by contracting the first form. Returns
    ``(count, stored)``; when ``stored > len(buf)`` the buffer overflowed and
    only the count is valid.
    """
    nf = coefs.shape[0]
    size = 1 << n
    T = np.zeros((max(nf, 1), 1 << k, size), dtype=np.int64)
    for f in range(nf):
        for m in range(size):
            T[f, 0, m] = coefs[f, m] % p
    rows = np.zeros((k, n), dtype=np.int64)
    freecols = np.zeros((k, n), dtype=np.int64)
    nfree = np.zeros(k, dtype=np.int64)
    part = np.zeros((k, n), dtype=np.int64)
    null = np.zeros((k, n, n), dtype=np.int64)
    dims = np.zeros(k, dtype=np.int64)
    idx = np.zeros(k, dtype=np.int64)
    lim = np.zeros(k, dtype=np.int64)
    E = np.zeros((MAXEQ, n + 1), dtype=np.int64)
    pivrow = np.zeros(n + 1, dtype=np.int64)
    gm, gc = grade_masks(n)
    hat = np.zeros((k, n), dtype=np.int64)
    tmp = np.zeros(1 << n, dtype=np.int64)
    count = 0
    stored = 0
    cap = buf.shape[0]
    if k == 0:
        if store and cap > 0:
            stored = 1
        return 1, stored
    tot = _setup_level(0, k, n, p, pattern, rows, T, coefs, grades, kinds, nf,
                       freecols, nfree, part, null, dims, inv, E, pivrow)
    lim[0] = min(tot, hi)
    idx[0] = lo
    r = 0
    while r >= 0:
        if idx[r] >= lim[r]:
            r -= 1
            if r >= 0:
                idx[r] += 1
            continue
        if r == k - 1:
            if not store:
                count += lim[r] - idx[r]
                idx[r] = lim[r]
                continue
            _fill_row(r, idx[r], n, p, pattern, freecols, nfree, part, null, dims, rows)
            if store == 2:
                _leaf_hat(k, n, p, rows, T, grades[0], hat, tmp, gm, gc)
                hist[rank_mod_p(hat, p, inv)] += 1
                count += 1
                idx[r] += 1
                continue
            if stored < cap:
                for a in range(k):
                    for b in range(n):
                        buf[stored, a, b] = rows[a, b]
            stored += 1
            count += 1
            idx[r] += 1
            continue
        _fill_row(r, idx[r], n, p, pattern, freecols, nfree, part, null, dims, rows)
        _update_tables(r, k, n, p, rows, T, grades, nf, gm, gc)
        r += 1
        lim[r] = _setup_level(r, k, n, p, pattern, rows, T, coefs, grades, kinds, nf,
                              freecols, nfree, part, null, dims, inv, E, pivrow)
        idx[r] = 0
    return count, stored


@njit(cache=True, nogil=True)
def _leaf_hat(k, n, p, rows, T, g, hat, tmp, gm, gc):
    """Rows of form ⌟ (∧^{k-1} U): one covector per (k-1)-subset of rows."""
    full = (1 << k) - 1
    last = 1 << (k - 1)
    t = 0
    for drop in range(k - 1, -1, -1):
        S = full ^ (1 << drop)
        if S & last:
            base = S ^ last
            _contract_vec(T[0, base], g - _popcount(base), rows[k - 1], n, p, tmp, gm, gc)
            for i in range(n):
                hat[t, i] = tmp[1 << i]
        else:
            for i in range(n):
                hat[t, i] = T[0, S, 1 << i]
        t += 1


@njit(cache=True, nogil=True)
def first_row_size(n, k, p, pattern, coefs, grades, kinds, inv):
    """Number of admissible first rows for a pattern (the chunking axis)."""
    nf = coefs.shape[0]
    size = 1 << n
    T = np.zeros((max(nf, 1), 1 << k, size), dtype=np.int64)
    for f in range(nf):
        for m in range(size):
            T[f, 0, m] = coefs[f, m] % p
    rows = np.zeros((k, n), dtype=np.int64)
    freecols = np.zeros((k, n), dtype=np.int64)
    nfree = np.zeros(k, dtype=np.int64)
    part = np.zeros((k, n), dtype=np.int64)
    null = np.zeros((k, n, n), dtype=np.int64)
    dims = np.zeros(k, dtype=np.int64)
    E = np.zeros((MAXEQ, n + 1), dtype=np.int64)
    pivrow = np.zeros(n + 1, dtype=np.int64)
    return _setup_level(0, k, n, p, pattern, rows, T, coefs, grades, kinds, nf,
                        freecols, nfree, part, null, dims, inv, E, pivrow)


# ---------------------------------------------------------------------------
# batch helpers on stored subspaces


@njit(cache=True, nogil=True)
def rank_mod_p(M, p, inv):
    """Rank of a small integer matrix mod p (M is copied)."""
    A = M.copy() % p
    rws, cols = A.shape
    r = 0
    for c in range(cols):
        piv = -1
        for i in range(r, rws):
            if A[i, c] != 0:
                piv = i
                break
        if piv < 0:
            continue
        for j in range(cols):
            tmp = A[r, j]
            A[r, j] = A[piv, j]
            A[piv, j] = tmp
        s = inv[A[r, c]]
        for j in range(cols):
            A[r, j] = (A[r, j] * s) % p
        for i in range(rws):
            if i != r and A[i, c] != 0:
                f = A[i, c]
                for j in range(cols):
                    A[i, j] = (A[i, j] - f * A[r, j]) % p
        r += 1
        if r == rws:
            break
    return r


@njit(cache=True, nogil=True)
def batch_rank(mats, p, inv):
    out = np.zeros(mats.shape[0], dtype=np.int64)
    for t in range(mats.shape[0]):
        out[t] = rank_mod_p(mats[t], p, inv)
    return out


@njit(cache=True, nogil=True)
def contract_rows(form, rowsets, n, p):
    """form ⌟ (u_0 ∧ ... ∧ u_{m-1}) for each stored row set (leading slots)."""
    N = rowsets.shape[0]
    m = rowsets.shape[1]
    size = 1 << n
    out = np.zeros((N, size), dtype=np.int64)
    a = np.zeros(size, dtype=np.int64)
    b = np.zeros(size, dtype=np.int64)
    gm, gc = grade_masks(n)
    g0 = 0
    for j in range(size):
        if form[j] % p != 0:
            g0 = _popcount(j)
    for t in range(N):
        for j in range(size):
            a[j] = form[j] % p
        for r in range(m):
            for j in range(size):
                b[j] = 0
            _contract_vec(a, g0 - r, rowsets[t, r], n, p, b, gm, gc)
            for j in range(size):
                a[j] = b[j]
        for j in range(size):
            out[t, j] = a[j]
    return out


@njit(cache=True, nogil=True)
def middle_fibers(rows2, lb, mb, p, inv):
    """For each μ-isotropic plane U in F_p^6, the number of lines <v> with
    v ∈ U⊥ \\ U and λbar(u_1, u_2, v) = 0."""
    n = 6
    N = rows2.shape[0]
    out = np.zeros(N, dtype=np.int64)
    gm, gc = grade_masks(n)
    E = np.zeros((2, n + 1), dtype=np.int64)
    part = np.zeros(n, dtype=np.int64)
    null = np.zeros((n, n), dtype=np.int64)
    pivrow = np.zeros(n + 1, dtype=np.int64)
    a = np.zeros(1 << n, dtype=np.int64)
    b = np.zeros(1 << n, dtype=np.int64)
    c = np.zeros(1 << n, dtype=np.int64)
    m3 = np.zeros((3, n), dtype=np.int64)
    v = np.zeros(n, dtype=np.int64)
    coef = np.zeros(n, dtype=np.int64)
    for t in range(N):
        u1 = rows2[t, 0]
        u2 = rows2[t, 1]
        _contract_vec(lb, 3, u1, n, p, a, gm, gc)
        _contract_vec(a, 2, u2, n, p, b, gm, gc)
        for r in range(2):
            _contract_vec(mb, 2, rows2[t, r], n, p, c, gm, gc)
            for i in range(n):
                E[r, i] = c[1 << i]
            E[r, n] = 0
        d = _solve(E, 2, n, p, inv, part, null, pivrow)
        total = 0
        # projective points of the d-dimensional null space
        for lead in range(d):
            m = p ** (d - lead - 1)
            for x in range(m):
                for i in range(d):
                    coef[i] = 0
                coef[lead] = 1
                y = x
                for i in range(lead + 1, d):
                    coef[i] = y % p
                    y //= p
                for j in range(n):
                    s = 0
                    for i in range(d):
                        s += coef[i] * null[i, j]
                    v[j] = s % p
                val = 0
                for j in range(n):
                    val += b[1 << j] * v[j]
                if val % p != 0:
                    continue
                for j in range(n):
                    m3[0, j] = u1[j]
                    m3[1, j] = u2[j]
                    m3[2, j] = v[j]
                if rank_mod_p(m3, p, inv) == 3:
                    total += 1
        out[t] = total
    return out
