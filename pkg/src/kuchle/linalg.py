"""Exact dense linear algebra over a :class:`~kuchle.field.Field`.

Matrices are lists of rows. Nothing here ever touches floating point.
"""

from __future__ import annotations

from itertools import permutations


def zeros(field, r, c):
    z = field.zero
    return [[z] * c for _ in range(r)]


def identity(field, n):
    m = zeros(field, n, n)
    for i in range(n):
        m[i][i] = field.one
    return m


def transpose(m):
    return [list(col) for col in zip(*m)]


def matmul(a, b):
    bt = transpose(b)
    return [[sum((x * y for x, y in zip(row, col)), 0 * row[0]) for col in bt] for row in a]


def matvec(a, v):
    return [sum((x * y for x, y in zip(row, v)), 0 * v[0]) for row in a]


def rref(m, field):
    """Reduced row echelon form. Returns ``(rows, pivots)``; zero rows dropped."""
    rows = [[field(x) for x in r] for r in m]
    if not rows:
        return [], []
    ncols = len(rows[0])
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows[:r], pivots


def rank(m, field) -> int:
    return len(rref(m, field)[1]) if m else 0


def nullspace(m, field, ncols=None):
    """Basis of {x : m x = 0} as a list of vectors."""
    if not m:
        n = ncols
        return [[field.one if i == j else field.zero for i in range(n)] for j in range(n)]
    n = len(m[0])
    rows, pivots = rref(m, field)
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        v = [field.zero] * n
        v[f] = field.one
        for row, pc in zip(rows, pivots):
            v[pc] = -row[f]
        basis.append(v)
    return basis


def det(m, field):
    n = len(m)
    if n == 0:
        return field.one
    a = [[field(x) for x in r] for r in m]
    d = field.one
    for c in range(n):
        piv = next((i for i in range(c, n) if a[i][c] != 0), None)
        if piv is None:
            return field.zero
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            d = -d
        d = d * a[c][c]
        inv = 1 / a[c][c]
        for i in range(c + 1, n):
            if a[i][c] != 0:
                f = a[i][c] * inv
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return d


def det_leibniz(m, field):
    """Permutation-sum determinant; used as an independent oracle in tests."""
    n = len(m)
    total = field.zero
    for perm in permutations(range(n)):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        term = field.one
        for i in range(n):
            term = term * m[i][perm[i]]
        total = total + (-term if inv % 2 else term)
    return total


def inverse(m, field):
    n = len(m)
    aug = [[field(x) for x in row] + idrow for row, idrow in zip(m, identity(field, n))]
    rows, pivots = rref(aug, field)
    if pivots[:n] != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return [row[n:] for row in rows]


def solve(m, b, field):
    """One solution x of m x = b, or None if inconsistent."""
    n = len(m[0])
    aug = [list(row) + [bi] for row, bi in zip(m, b)]
    rows, pivots = rref(aug, field)
    if n in pivots:
        return None
    x = [field.zero] * n
    for row, pc in zip(rows, pivots):
        x[pc] = row[n]
    return x


def span_contains(vectors, v, field) -> bool:
    return rank(list(vectors) + [v], field) == rank(list(vectors), field) if vectors else all(
        x == 0 for x in v
    )


def intersect(a, b, field):
    """Basis of span(a) ∩ span(b) for row-vector bases a, b."""
    if not a or not b:
        return []
    # x in both iff x = sum s_i a_i = sum t_j b_j
    cols = transpose(list(a) + [[-x for x in row] for row in b])
    sol = nullspace(cols, field)
    out = []
    for s in sol:
        v = [field.zero] * len(a[0])
        for coef, row in zip(s[: len(a)], a):
            v = [x + coef * y for x, y in zip(v, row)]
        out.append(v)
    rows, _ = rref(out, field) if out else ([], [])
    return rows


def charpoly_roots(m, field):
    """Eigenvalues of m lying in the field (finite field only, by search)."""
    n = len(m)
    roots = []
    for t in field.elements():
        shifted = [[m[i][j] - (t if i == j else 0) for j in range(n)] for i in range(n)]
        if det(shifted, field) == 0:
            roots.append(t)
    return roots
