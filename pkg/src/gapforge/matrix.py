"""Exact dense linear algebra over F_q, Q and Z.

Three matrix types share one small interface:

* ``MatFq`` stores field-element indices in an int64 array,
* ``MatQ`` stores ``Fraction`` objects,
* ``MatZ`` stores Python ints (arbitrary precision).

Elimination over Q is fraction-free: rows are scaled to integers, combined
with integer row operations and divided by their content after every pivot.
Support searches (``min_dependent_support``) run a batched Gaussian
elimination modulo a 31-bit prime; for integer matrices the result is exact
whenever the Hadamard bound of the columns involved stays below the prime,
and the search falls back to exact elimination otherwise.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce

import numpy as np

from .budget import check_budget
from .field import QQ, FieldSpec, make_field

MODULUS_31 = 2147483647  # 2^31 - 1, products of two residues fit in int64


def _lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b) if a and b else max(a, b)


# -- matrix types -------------------------------------------------------------------

class _Mat:
    data: np.ndarray
    domain_tag = ""

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape

    def _py(self, x):
        return int(x) if isinstance(x, np.integer) else x

    def column(self, j: int) -> list:
        return [self._py(x) for x in self.data[:, j]]

    def columns(self) -> list[list]:
        return [self.column(j) for j in range(self.cols)]

    def tolist(self) -> list[list]:
        return [[self._py(x) for x in r] for r in self.data]

    def __eq__(self, other) -> bool:
        if type(other) is not type(self) or other.shape != self.shape:
            return False
        if getattr(self, "field", None) != getattr(other, "field", None):
            return False
        return bool(np.all(self.data == other.data))

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.rows}x{self.cols})"


class MatFq(_Mat):
    domain_tag = "fq"

    def __init__(self, field: FieldSpec, data):
        arr = np.array(data, dtype=np.int64)
        if arr.ndim == 1:
            arr = arr.reshape(0, 0) if arr.size == 0 else arr.reshape(1, -1)
        if arr.ndim != 2:
            raise ValueError("matrix data must be two-dimensional")
        if arr.size and (arr.min() < 0 or arr.max() >= field.q):
            raise ValueError(f"entries outside {field!r}")
        arr.setflags(write=False)
        self.field = field
        self.data = arr

    @classmethod
    def zeros(cls, field: FieldSpec, rows: int, cols: int) -> "MatFq":
        return cls(field, np.zeros((rows, cols), dtype=np.int64))

    @classmethod
    def from_columns(cls, field: FieldSpec, columns, length: int) -> "MatFq":
        columns = [list(c) for c in columns]
        if not columns:
            return cls(field, np.zeros((length, 0), dtype=np.int64))
        return cls(field, np.array(columns, dtype=np.int64).T)

    @property
    def domain(self):
        return self.field

    def transpose(self) -> "MatFq":
        return MatFq(self.field, self.data.T)

    def submatrix(self, cols) -> "MatFq":
        return MatFq(self.field, self.data[:, list(cols)])

    def to_dict(self) -> dict:
        F = self.field
        return {
            "rows": self.rows, "cols": self.cols, "domain": "fq", "field": F.to_dict(),
            "entries": [[F.render(int(a)) for a in row] for row in self.data],
        }


class MatQ(_Mat):
    domain_tag = "q"
    domain = QQ

    def __init__(self, data, shape: tuple[int, int] | None = None):
        rows = [[Fraction(x) for x in r] for r in data]
        arr = np.empty((len(rows), len(rows[0]) if rows else 0), dtype=object)
        if shape is not None and not rows:
            arr = np.empty(shape, dtype=object)
        for i, r in enumerate(rows):
            if len(r) != arr.shape[1]:
                raise ValueError("ragged matrix rows")
            arr[i, :] = r
        arr.setflags(write=False)
        self.data = arr

    def transpose(self) -> "MatQ":
        return MatQ(self.data.T.tolist(), shape=self.data.T.shape)

    def submatrix(self, cols) -> "MatQ":
        sub = self.data[:, list(cols)]
        return MatQ(sub.tolist(), shape=sub.shape)

    def to_dict(self) -> dict:
        return {
            "rows": self.rows, "cols": self.cols, "domain": "q",
            "entries": [[QQ.render(x) for x in row] for row in self.data],
        }


class MatZ(_Mat):
    domain_tag = "z"

    def __init__(self, data, shape: tuple[int, int] | None = None):
        rows = [[int(x) for x in r] for r in data]
        arr = np.empty((len(rows), len(rows[0]) if rows else 0), dtype=object)
        if shape is not None and not rows:
            arr = np.empty(shape, dtype=object)
        for i, r in enumerate(rows):
            if len(r) != arr.shape[1]:
                raise ValueError("ragged matrix rows")
            arr[i, :] = r
        arr.setflags(write=False)
        self.data = arr

    @classmethod
    def from_columns(cls, columns, length: int) -> "MatZ":
        columns = [list(c) for c in columns]
        if not columns:
            return cls([], shape=(length, 0))
        return cls([list(r) for r in zip(*columns)])

    def transpose(self) -> "MatZ":
        return MatZ(self.data.T.tolist(), shape=self.data.T.shape)

    def submatrix(self, cols) -> "MatZ":
        sub = self.data[:, list(cols)]
        return MatZ(sub.tolist(), shape=sub.shape)

    def to_q(self) -> MatQ:
        return MatQ(self.data.tolist(), shape=self.shape)

    def to_dict(self) -> dict:
        return {
            "rows": self.rows, "cols": self.cols, "domain": "z",
            "entries": [[int(x) for x in row] for row in self.data],
        }


def matrix_from_dict(d: dict):
    rows, cols = int(d["rows"]), int(d["cols"])
    entries = d["entries"]
    if len(entries) != rows or any(len(r) != cols for r in entries):
        raise ValueError("matrix shape does not match its entries")
    tag = d["domain"]
    if tag == "fq":
        F = FieldSpec.from_dict(d["field"])
        data = np.array([[F.parse(x) for x in r] for r in entries], dtype=np.int64).reshape(rows, cols)
        return MatFq(F, data)
    if tag == "q":
        return MatQ([[QQ.parse(x) for x in r] for r in entries], shape=(rows, cols))
    if tag == "z":
        return MatZ([[int(x) for x in r] for r in entries], shape=(rows, cols))
    raise ValueError(f"unknown matrix domain {tag!r}")


# -- elimination ----------------------------------------------------------------------

def _rref_prime(A: np.ndarray, p: int):
    A = A.copy() % p
    rows, cols = A.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(A[r:, c])[0]
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            A[[r, piv]] = A[[piv, r]]
        A[r] = A[r] * pow(int(A[r, c]), p - 2, p) % p
        factors = A[:, c].copy()
        factors[r] = 0
        A = (A - np.outer(factors, A[r])) % p
        pivots.append(c)
        r += 1
    return A, pivots


def _rref_generic(rows_in: list[list], F):
    A = [list(r) for r in rows_in]
    n_rows = len(A)
    n_cols = len(A[0]) if A else 0
    pivots: list[int] = []
    r = 0
    for c in range(n_cols):
        if r == n_rows:
            break
        piv = next((i for i in range(r, n_rows) if not F.is_zero(A[i][c])), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        inv = F.inv(A[r][c])
        A[r] = [F.mul(inv, x) for x in A[r]]
        for i in range(n_rows):
            if i != r and not F.is_zero(A[i][c]):
                f = A[i][c]
                A[i] = [F.sub(x, F.mul(f, y)) for x, y in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
    return A, pivots


def _integer_rows(data) -> list[list[int]]:
    """Scale each rational row by the lcm of its denominators."""
    out = []
    for row in data:
        fr = [Fraction(x) for x in row]
        den = reduce(_lcm, (x.denominator for x in fr), 1)
        out.append([int(x * den) for x in fr])
    return out


def _content_normalise(row: list[int]) -> list[int]:
    g = reduce(math.gcd, row, 0)
    if g > 1:
        row = [x // g for x in row]
    return row


def _rref_fraction_free(int_rows: list[list[int]]):
    """Gauss-Jordan on integer rows; returns integer echelon rows and pivots."""
    A = [list(r) for r in int_rows]
    n_rows = len(A)
    n_cols = len(A[0]) if A else 0
    pivots: list[int] = []
    r = 0
    for c in range(n_cols):
        if r == n_rows:
            break
        cands = [i for i in range(r, n_rows) if A[i][c] != 0]
        if not cands:
            continue
        piv = min(cands, key=lambda i: (abs(A[i][c]), i))
        A[r], A[piv] = A[piv], A[r]
        a = A[r][c]
        for i in range(n_rows):
            if i != r and A[i][c] != 0:
                b = A[i][c]
                A[i] = _content_normalise([a * x - b * y for x, y in zip(A[i], A[r])])
        A[r] = _content_normalise(A[r])
        pivots.append(c)
        r += 1
    return A, pivots


def rref(M):
    """Reduced row echelon form: returns (matrix, pivot columns, rank)."""
    if isinstance(M, MatFq):
        F = M.field
        if F.is_prime_field:
            A, piv = _rref_prime(M.data, F.p)
            return MatFq(F, A), piv, len(piv)
        A, piv = _rref_generic(M.data.tolist(), F)
        return MatFq(F, np.array(A, dtype=np.int64).reshape(M.shape)), piv, len(piv)
    if isinstance(M, (MatQ, MatZ)):
        A, piv = _rref_fraction_free(_integer_rows(M.data))
        out = []
        for i, row in enumerate(A):
            if i < len(piv):
                lead = row[piv[i]]
                out.append([Fraction(x, lead) for x in row])
            else:
                out.append([Fraction(0)] * M.cols)
        return MatQ(out, shape=M.shape), piv, len(piv)
    raise TypeError(f"rref does not support {type(M).__name__}")


def rank(M) -> int:
    if isinstance(M, (MatQ, MatZ)):
        return len(_rref_fraction_free(_integer_rows(M.data))[1])
    return rref(M)[2]


def kernel_basis(M):
    """Columns spanning ker(M); each has a 1 in its free column and 0 in the others."""
    R, pivots, r = rref(M)
    n = M.cols
    free = [c for c in range(n) if c not in set(pivots)]
    if isinstance(R, MatFq):
        F = R.field
        vecs = []
        for f in free:
            v = [0] * n
            v[f] = 1
            for i, pc in enumerate(pivots):
                v[pc] = F.neg(int(R.data[i, f]))
            vecs.append(v)
        return MatFq.from_columns(F, vecs, n)
    vecs = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -R.data[i, f]
        vecs.append(v)
    if not vecs:
        return MatQ([], shape=(n, 0))
    return MatQ([list(r) for r in zip(*vecs)])


def solve(M, b):
    """One exact solution x of M x = b, or None when the system is inconsistent."""
    if isinstance(M, MatFq):
        F = M.field
        aug = MatFq(F, np.hstack([M.data, np.array(b, dtype=np.int64).reshape(-1, 1)]))
        R, piv, _ = rref(aug)
        if M.cols in piv:
            return None
        x = [0] * M.cols
        for i, pc in enumerate(piv):
            x[pc] = int(R.data[i, M.cols])
        return x
    aug = MatQ([list(r) + [Fraction(v)] for r, v in zip(M.data.tolist(), b)], shape=(M.rows, M.cols + 1))
    R, piv, _ = rref(aug)
    if M.cols in piv:
        return None
    x = [Fraction(0)] * M.cols
    for i, pc in enumerate(piv):
        x[pc] = R.data[i, M.cols]
    return x


def matvec(M, x) -> list:
    if isinstance(M, MatFq):
        F = M.field
        if F.is_prime_field:
            return [int(v) for v in (M.data @ np.array(x, dtype=np.int64)) % F.p]
        out = []
        for row in M.data:
            acc = 0
            for a, b in zip(row, x):
                acc = F.add(acc, F.mul(int(a), int(b)))
            out.append(acc)
        return out
    return [sum((a * b for a, b in zip(row, x)), start=0) for row in M.data.tolist()]


def kronecker(A, B):
    """Kronecker product; both factors must share an entry domain."""
    if type(A) is not type(B):
        raise TypeError("kronecker operands live in different domains")
    if isinstance(A, MatFq):
        if A.field != B.field:
            raise TypeError("kronecker operands live in different fields")
        F = A.field
        if F.is_prime_field:
            return MatFq(F, np.kron(A.data, B.data) % F.p)
        ra, ca = A.shape
        rb, cb = B.shape
        out = np.zeros((ra * rb, ca * cb), dtype=np.int64)
        for i in range(ra):
            for j in range(ca):
                a = int(A.data[i, j])
                block = [[F.mul(a, int(x)) for x in row] for row in B.data]
                out[i * rb:(i + 1) * rb, j * cb:(j + 1) * cb] = np.array(block, dtype=np.int64).reshape(rb, cb)
        return MatFq(F, out)
    out = np.kron(A.data, B.data)
    shape = (A.rows * B.rows, A.cols * B.cols)
    return type(A)(out.reshape(shape).tolist(), shape=shape)


def restricted_rank(M, support) -> int:
    """Rank of the column submatrix of M on the given support."""
    support = list(support)
    if any(not 0 <= j < M.cols for j in support):
        raise IndexError("support index out of range")
    if not support:
        return 0
    return rank(M.submatrix(support))


# -- integer kernels ----------------------------------------------------------------

def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        qt, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - qt * x1
        y0, y1 = y1, y0 - qt * y1
    return a, x0, y0


def _row_hnf(rows: list[list[int]]) -> list[list[int]]:
    """Row-style Hermite normal form: positive pivots, entries above reduced."""
    A = [list(r) for r in rows]
    n_rows = len(A)
    n_cols = len(A[0]) if A else 0
    r = 0
    for c in range(n_cols):
        if r == n_rows:
            break
        for i in range(r + 1, n_rows):
            if A[i][c] == 0:
                continue
            a, b = A[r][c], A[i][c]
            g, x, y = _xgcd(a, b)
            ra, rb = A[r], A[i]
            A[r] = [x * u + y * v for u, v in zip(ra, rb)]
            A[i] = [(-b // g) * u + (a // g) * v for u, v in zip(ra, rb)]
        if A[r][c] == 0:
            continue
        if A[r][c] < 0:
            A[r] = [-u for u in A[r]]
        piv = A[r][c]
        for i in range(r):
            f = A[i][c] // piv
            if f:
                A[i] = [u - f * v for u, v in zip(A[i], A[r])]
        r += 1
    return A[:r]


def hnf_integer_kernel(M) -> MatZ:
    """Basis (as columns) of the saturated lattice {x in Z^n : M x = 0}.

    Unimodular column operations bring M to column echelon form; the columns of
    the transform beyond the rank span the integer kernel. The basis is then put
    in Hermite normal form.
    """
    rows = _integer_rows(M.data) if isinstance(M, (MatQ, MatZ)) else [[int(x) for x in r] for r in M]
    n = M.cols
    A = [list(r) for r in rows]
    U = [[int(i == j) for j in range(n)] for i in range(n)]

    def col_op(c1, c2, a11, a12, a21, a22):
        # new c1 = a11*c1 + a21*c2 ; new c2 = a12*c1 + a22*c2
        for mat in (A, U):
            for row in mat:
                u, v = row[c1], row[c2]
                row[c1], row[c2] = a11 * u + a21 * v, a12 * u + a22 * v

    c = 0
    for i in range(len(A)):
        if c == n:
            break
        for j in range(c + 1, n):
            b = A[i][j]
            if b == 0:
                continue
            a = A[i][c]
            g, x, y = _xgcd(a, b)
            col_op(c, j, x, -b // g, y, a // g)
        if A[i][c] != 0:
            c += 1
    kernel_cols = [[U[r][j] for r in range(n)] for j in range(c, n)]
    if not kernel_cols:
        return MatZ([], shape=(n, 0))
    hnf_rows = _row_hnf(kernel_cols)
    return MatZ.from_columns(hnf_rows, n)


# -- batched modular rank and support searches ---------------------------------------

def batch_rank_mod_p(A: np.ndarray, p: int) -> np.ndarray:
    """Ranks of a stack of matrices (shape (B, r, c)) over F_p, p < 2^31."""
    A = np.array(A, dtype=np.int64) % p
    B, r, c = A.shape
    rank_ = np.zeros(B, dtype=np.int64)
    if B == 0 or r == 0 or c == 0:
        return rank_
    row_ids = np.arange(r)
    for col in range(c):
        active = rank_ < r
        if not active.any():
            break
        colv = A[:, :, col]
        cand = (colv != 0) & (row_ids[None, :] >= rank_[:, None])
        has = cand.any(axis=1) & active
        if not has.any():
            continue
        b = np.nonzero(has)[0]
        piv = np.argmax(cand[b], axis=1)
        tgt = rank_[b]
        piv_rows = A[b, piv].copy()
        A[b, piv] = A[b, tgt]
        A[b, tgt] = piv_rows
        pv = piv_rows[:, col]
        sub = A[b]
        factors = sub[:, :, col].copy()
        below = row_ids[None, :] > tgt[:, None]
        factors = np.where(below, factors, 0)
        # row_i <- pv * row_i - f_i * pivot_row, restricted to rows below the pivot
        scaled = np.where(below[:, :, None], (sub * pv[:, None, None]) % p, sub)
        sub = (scaled - (factors[:, :, None] * piv_rows[:, None, :]) % p) % p
        A[b] = sub
        rank_[b] += 1
    return rank_


@dataclass(frozen=True)
class SupportSearch:
    """Outcome of a minimal-dependent-support search.

    ``size`` is None when nothing was found up to ``bound``; the lower bound on
    the true value is then ``bound + 1``.
    """

    size: int | None
    support: tuple[int, ...] | None
    bound: int
    deficiency: int

    @property
    def floor(self) -> int:
        return self.size if self.size is not None else self.bound + 1


def _as_search_matrix(M):
    """Return (int64-or-object array, modulus or None for Q/Z)."""
    if isinstance(M, MatFq):
        if not M.field.is_prime_field:
            raise ValueError("support search needs a prime field; expand extension fields first")
        return M.data.astype(np.int64), M.field.p
    rows = _integer_rows(M.data)
    return np.array(rows, dtype=object).reshape(M.shape), None


def _chunks(it, size):
    while True:
        block = list(itertools.islice(it, size))
        if not block:
            return
        yield block


def _exact_rank_int(sub: np.ndarray) -> int:
    return len(_rref_fraction_free(sub.T.tolist())[1]) if sub.size else 0


def min_dependent_support(M, deficiency: int = 1, bound: int | None = None, start: int = 1,
                          budget: int | None = None, workers: int = 1,
                          chunk: int = 20000) -> SupportSearch:
    """Smallest column set S with rank(M_S) <= |S| - deficiency.

    With deficiency 1 this is the minimum support of a nonzero kernel vector;
    with deficiency 2 it is the second generalised Hamming weight of ker(M).
    The witness is the lexicographically first such S of minimal size, so the
    answer does not depend on ``workers``.
    """
    A, p = _as_search_matrix(M)
    n_rows, n = A.shape
    bound = n if bound is None else min(bound, n)
    start = max(start, deficiency, 1)
    needed = sum(math.comb(n, s) for s in range(start, bound + 1))
    check_budget("support search", needed, budget)

    if p is None:
        col_log = np.zeros(n)
        for j in range(n):
            sq = sum(int(x) ** 2 for x in A[:, j])
            col_log[j] = 0.5 * math.log2(sq) if sq else 0.0
        limit = math.log2(MODULUS_31) - 1e-6
        fits = A.size == 0 or max(abs(int(x)) for x in A.ravel()) < MODULUS_31
        A64 = (np.array(A.tolist(), dtype=np.int64) if fits else None)
        mod = MODULUS_31
    else:
        A64, mod = A, p

    def scan(block):
        idx = np.array(block, dtype=np.int64)
        s = idx.shape[1]
        if A64 is not None:
            stack = np.transpose(A64[:, idx], (1, 0, 2))
            ranks = batch_rank_mod_p(stack, mod)
        else:
            ranks = np.full(len(block), -1)
        if p is None:
            risky = np.ones(len(block), dtype=bool) if A64 is None else col_log[idx].sum(axis=1) >= limit
            for t in np.nonzero(risky)[0]:
                ranks[t] = _exact_rank_int(A[:, idx[t]])
        hits = np.nonzero(ranks <= s - deficiency)[0]
        return tuple(int(j) for j in idx[hits[0]]) if hits.size else None

    for s in range(start, bound + 1):
        combos = itertools.combinations(range(n), s)
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                pending = []
                for block in _chunks(combos, chunk):
                    pending.append(pool.submit(scan, block))
                results = [f.result() for f in pending]
            found = next((r for r in results if r is not None), None)
        else:
            found = None
            for block in _chunks(combos, chunk):
                found = scan(block)
                if found is not None:
                    break
        if found is not None:
            return SupportSearch(s, found, bound, deficiency)
    return SupportSearch(None, None, bound, deficiency)


# -- F_q span helpers -------------------------------------------------------------------

def expand_generators(F: FieldSpec, vectors, scalar_degree: int | None = None) -> np.ndarray:
    """F_p generators of the span of ``vectors`` (index tuples over F).

    Coordinates are expanded to power-basis coefficients, so a vector of length
    L becomes L*m residues mod p. With ``scalar_degree`` equal to F.m the span
    is taken over F itself (each vector contributes m generators x^b * v);
    with ``scalar_degree`` 1 only F_p-multiples are allowed.
    """
    m = F.m
    scalar_degree = m if scalar_degree is None else scalar_degree
    gens = []
    for v in vectors:
        v = [int(a) for a in v]
        for b in range(scalar_degree):
            xb = F.pow(F.index([0, 1] + [0] * (m - 2)), b) if m > 1 else 1
            w = [F.mul(xb, a) for a in v] if b else v
            gens.append([c for a in w for c in F.digits(a)])
    width = len(gens[0]) if gens else 0
    return np.array(gens, dtype=np.int64).reshape(len(gens), width)


def collapse_symbols(words: np.ndarray, F: FieldSpec) -> np.ndarray:
    """Map expanded residue words back to field-element indices."""
    m, p = F.m, F.p
    B = words.shape[0]
    w = words.reshape(B, -1, m)
    weights = p ** np.arange(m, dtype=np.int64)
    return (w * weights).sum(axis=2)


def symbol_weights(words: np.ndarray, m: int) -> np.ndarray:
    if m == 1:
        return np.count_nonzero(words, axis=1)
    B = words.shape[0]
    return np.count_nonzero(words.reshape(B, -1, m).any(axis=2), axis=1)


def span_chunks(gens: np.ndarray, p: int, chunk: int = 4096):
    """Yield (digits, words) over every F_p-combination of the generators.

    Digits run in lexicographic order with the first generator most
    significant. Products go through float64 matmul, exact because all partial
    sums stay far below 2^53 at the sizes allowed by the budgets.
    """
    k, width = gens.shape
    total = p ** k
    G = gens.astype(np.float64)
    powers = p ** np.arange(k - 1, -1, -1, dtype=np.int64)
    for lo in range(0, total, chunk):
        ids = np.arange(lo, min(total, lo + chunk), dtype=np.int64)
        digits = (ids[:, None] // powers[None, :]) % p
        words = np.mod(digits.astype(np.float64) @ G, p).astype(np.int64) if k else np.zeros((len(ids), width), dtype=np.int64)
        yield digits, words


def prime_subfield(F: FieldSpec) -> FieldSpec:
    return make_field(F.p, 1)
