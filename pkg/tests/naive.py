"""Slow, obviously-correct reference computations used as test oracles.

Nothing here imports the package's linear algebra: codewords come from
itertools loops over messages and ranks from textbook Fraction elimination.
"""

from __future__ import annotations

import itertools
from fractions import Fraction


def rank_fraction(rows) -> int:
    A = [[Fraction(x) for x in r] for r in rows]
    if not A:
        return 0
    r = 0
    for c in range(len(A[0])):
        piv = next((i for i in range(r, len(A)) if A[i][c] != 0), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        for i in range(len(A)):
            if i != r and A[i][c] != 0:
                f = A[i][c] / A[r][c]
                A[i] = [a - f * b for a, b in zip(A[i], A[r])]
        r += 1
        if r == len(A):
            break
    return r


def rank_mod_p(rows, p: int) -> int:
    A = [[x % p for x in r] for r in rows]
    if not A:
        return 0
    r = 0
    for c in range(len(A[0])):
        piv = next((i for i in range(r, len(A)) if A[i][c]), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        inv = pow(A[r][c], p - 2, p)
        A[r] = [a * inv % p for a in A[r]]
        for i in range(len(A)):
            if i != r and A[i][c]:
                f = A[i][c]
                A[i] = [(a - f * b) % p for a, b in zip(A[i], A[r])]
        r += 1
        if r == len(A):
            break
    return r


def codewords_prime(G_rows, p: int):
    """All codewords of the prime-field code with generator rows G (N x n), by message loop."""
    N, n = len(G_rows), len(G_rows[0])
    for msg in itertools.product(range(p), repeat=n):
        yield msg, tuple(sum(G_rows[i][j] * msg[j] for j in range(n)) % p for i in range(N))


def min_distance_prime(G_rows, p: int) -> int:
    return min(sum(1 for v in w if v) for m, w in codewords_prime(G_rows, p) if any(m))


def d2_prime(G_rows, p: int) -> int:
    words = [w for m, w in codewords_prime(G_rows, p) if any(m)]
    best = None
    for u, v in itertools.combinations(words, 2):
        if rank_mod_p([u, v], p) < 2:
            continue
        size = sum(1 for a, b in zip(u, v) if a or b)
        best = size if best is None else min(best, size)
    return best


def min_support_kernel(M_rows) -> int | None:
    """Smallest |S| with rank(M_S) < |S|, by looping over all supports."""
    n = len(M_rows[0])
    for s in range(1, n + 1):
        for S in itertools.combinations(range(n), s):
            if rank_fraction([[r[j] for j in S] for r in M_rows]) < s:
                return s
    return None


def det_fraction(rows) -> Fraction:
    """Determinant of a square matrix by Fraction elimination."""
    A = [[Fraction(x) for x in r] for r in rows]
    n = len(A)
    det = Fraction(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if A[i][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            A[c], A[piv] = A[piv], A[c]
            det = -det
        det *= A[c][c]
        for i in range(c + 1, n):
            f = A[i][c] / A[c][c]
            A[i] = [a - f * b for a, b in zip(A[i], A[c])]
    return det
