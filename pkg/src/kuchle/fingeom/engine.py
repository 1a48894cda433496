"""Chunked, thread-parallel driver for the compiled subspace enumerator."""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from ..exterior import Multivector
from . import _kernel
from .subspace import check_q, dense

ISO = _kernel.ISO
ANN = _kernel.ANN


class BudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class Constraint:
    kind: int  # ISO or ANN
    form: Multivector

    @classmethod
    def iso(cls, form):
        return cls(ISO, form)

    @classmethod
    def ann(cls, form):
        return cls(ANN, form)


def inverses(p: int):
    inv = np.zeros(p, dtype=np.int64)
    for a in range(1, p):
        inv[a] = pow(a, p - 2, p)
    return inv


def _pack(constraints, n, p):
    for c in constraints:
        if c.form.dim != n:
            raise ValueError(f"constraint on a {c.form.dim}-space, ambient is {n}")
    coefs = np.array([dense(c.form, p) for c in constraints], dtype=np.int64).reshape(
        len(constraints), 1 << n
    )
    grades = np.array([c.form.grade for c in constraints], dtype=np.int64)
    kinds = np.array([c.kind for c in constraints], dtype=np.int64)
    return coefs, grades, kinds


@dataclass
class Deadline:
    seconds: float | None
    start: float = 0.0

    def __post_init__(self):
        self.start = time.monotonic()

    def expired(self) -> bool:
        return self.seconds is not None and time.monotonic() - self.start > self.seconds


def _chunks(n, k, p, coefs, grades, kinds, inv, target):
    """(pattern, lo, hi) triples covering the search space in a fixed order."""
    out = []
    for pattern in combinations(range(n), k):
        pat = np.array(pattern, dtype=np.int64)
        if k == 0:
            out.append((pat, 0, 1))
            continue
        size = int(_kernel.first_row_size(n, k, p, pat, coefs, grades, kinds, inv))
        if size == 0:
            continue
        step = max(1, -(-size // target))
        for lo in range(0, size, step):
            out.append((pat, lo, min(size, lo + step)))
    return out


def solve(n: int, k: int, p: int, constraints, store: bool = False, threads: int = 1,
          budget: Deadline | None = None, split: int = 4, hat_ranks: bool = False):
    """Count the k-subspaces of F_p^n satisfying all constraints.

    Returns ``(count, rows)`` where rows is an int64 array of shape
    ``(count, k, n)`` of RREF bases when ``store`` is set, else None.
    With ``hat_ranks`` the second value is instead a histogram of the rank of
    ∧^{k-1} U → V∨ given by the first constraint's form.
    The result does not depend on ``threads``.
    """
    check_q(p)
    if not 0 <= k <= n:
        raise ValueError(f"need 0 <= k <= n, got k={k}, n={n}")
    coefs, grades, kinds = _pack(constraints, n, p)
    inv = inverses(p)
    chunks = _chunks(n, k, p, coefs, grades, kinds, inv, split)

    mode = 2 if hat_ranks else int(store)
    if hat_ranks and (not constraints or k < 1):
        raise ValueError("rank histograms need a form and k >= 1")

    def work(ch):
        if budget is not None and budget.expired():
            return None
        pat, lo, hi = ch
        cap = 1024 if mode == 1 else 0
        while True:
            buf = np.zeros((cap, k, n), dtype=np.int64)
            hist = np.zeros(n + 1, dtype=np.int64)
            cnt, stored = _kernel.enumerate_chunk(
                n, k, p, pat, lo, hi, coefs, grades, kinds, inv, mode, buf, hist
            )
            if mode == 2:
                return int(cnt), hist
            if stored <= cap:
                return int(cnt), (buf[:stored] if store else None)
            cap = int(stored)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            results = list(ex.map(work, chunks))
    else:
        results = []
        for ch in chunks:
            results.append(work(ch))
            if results[-1] is None:
                break
    if any(r is None for r in results):
        raise BudgetExceeded(f"budget of {budget.seconds}s exceeded")
    total = sum(r[0] for r in results)
    if hat_ranks:
        hist = sum((r[1] for r in results), np.zeros(n + 1, dtype=np.int64))
        return total, {int(i): int(c) for i, c in enumerate(hist) if c}
    if not store:
        return total, None
    parts = [r[1] for r in results if r[1] is not None and len(r[1])]
    rows = np.concatenate(parts) if parts else np.zeros((0, k, n), dtype=np.int64)
    return total, rows


def count_subspaces(n: int, k: int, p: int, threads: int = 1) -> int:
    return solve(n, k, p, [], threads=threads)[0]
