"""Brute-force solvers that certify reduction outputs at desk scale.

These deliberately avoid the code module's Gray-code scanner: codewords are
produced by plain matrix products over the message space, so agreement
between the two is a meaningful cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce

import numpy as np

from .budget import check_budget
from .circuit import QuadSystem, quad_eval
from .field import FieldSpec, enumerate_vectors
from .matrix import (
    MatFq,
    collapse_symbols,
    expand_generators,
    kernel_basis,
    min_dependent_support,
    solve,
)
from .reduce import MdpInstance, NcpInstance, SvpInstance

_CELL_CAP = 1 << 22  # codeword entries materialised per chunk


@dataclass(frozen=True)
class OracleReport:
    """``optimum`` is None when nothing was found within the searched bound; ``floor`` is then bound + 1."""

    optimum: int | None
    witness: tuple | None
    method: str
    exhausted: bool
    floor: int | None = None

    def __post_init__(self):
        if self.floor is None and self.optimum is not None:
            object.__setattr__(self, "floor", self.optimum)

    def to_dict(self) -> dict:
        w = None
        if self.witness is not None:
            w = [x if isinstance(x, int) else str(x) for x in self.witness]
        return {"optimum": self.optimum, "floor": self.floor, "witness": w,
                "method": self.method, "exhausted": self.exhausted}


def _lex_less(a: np.ndarray, b: np.ndarray) -> bool:
    diff = np.nonzero(a != b)[0]
    return bool(diff.size) and a[diff[0]] < b[diff[0]]


def _min_weight_words(gens: np.ndarray, F: FieldSpec, offset: np.ndarray | None, exclude_zero: bool):
    """Minimum symbol weight over offset + span_Fp(gens), with the lexicographically smallest witness."""
    p, m = F.p, F.m
    k, width = gens.shape
    total = p ** k
    chunk = max(1, _CELL_CAP // max(width, 1))
    # float32 is exact while every dot product stays below 2^24
    dtype = np.float32 if k * (p - 1) ** 2 + p < (1 << 24) else np.float64
    G = gens.astype(dtype)
    off = None if offset is None else offset.astype(dtype)
    powers = p ** np.arange(k - 1, -1, -1, dtype=np.int64)
    best, best_word = None, None
    for lo in range(0, total, chunk):
        ids = np.arange(lo, min(total, lo + chunk), dtype=np.int64)
        digits = ((ids[:, None] // powers[None, :]) % p).astype(dtype)
        words = digits @ G if k else np.zeros((len(ids), width), dtype=dtype)
        if off is not None:
            words = words + off
        words = np.mod(words, p)
        nz = words != 0
        if m > 1:
            nz = nz.reshape(len(ids), -1, m).any(axis=2)
        wts = nz.sum(axis=1)
        if exclude_zero:
            wts = np.where(wts == 0, np.iinfo(np.int64).max, wts)
        low = int(wts.min())
        if low == np.iinfo(np.int64).max or (best is not None and low > best):
            continue
        for i in np.nonzero(wts == low)[0]:
            cand = collapse_symbols(words[i:i + 1].astype(np.int64), F)[0]
            if best is None or low < best or _lex_less(cand, best_word):
                best, best_word = low, cand
    return best, best_word


def sparsest_codeword_fq(inst: MdpInstance | MatFq, budget: int | None = None) -> OracleReport:
    """Exact minimum weight of a nonzero vector of V (basis columns) by message enumeration."""
    B = inst.basis if isinstance(inst, MdpInstance) else inst
    F = B.field
    check_budget("subspace enumeration", F.q ** B.cols, budget)
    gens = expand_generators(F, B.columns(), F.m)
    if B.cols == 0:
        return OracleReport(None, None, "message-enumeration", True, floor=None)
    best, word = _min_weight_words(gens, F, None, exclude_zero=True)
    return OracleReport(best, tuple(int(v) for v in word), "message-enumeration", True)


def ncp_solve_bruteforce(inst: NcpInstance, budget: int | None = None) -> OracleReport:
    """Exact minimum weight over the affine set offset + span(basis)."""
    if inst.offset is None or len(inst.offset) == 0:
        raise ValueError("empty affine set")
    F = inst.field
    B = inst.basis
    check_budget("affine enumeration", F.q ** B.cols, budget)
    gens = expand_generators(F, B.columns(), F.m) if B.cols else np.zeros((0, len(inst.offset) * F.m), dtype=np.int64)
    off = np.array([c for a in inst.offset for c in F.digits(a)], dtype=np.int64)
    best, word = _min_weight_words(gens, F, off, exclude_zero=False)
    return OracleReport(best, tuple(int(v) for v in word), "affine-enumeration", True)


def _primitive(v: list[Fraction]) -> tuple[int, ...]:
    den = reduce(lambda a, b: a * b // math.gcd(a, b), (x.denominator for x in v), 1)
    ints = [int(x * den) for x in v]
    g = reduce(math.gcd, ints, 0) or 1
    ints = [x // g for x in ints]
    lead = next(x for x in ints if x)
    return tuple(-x for x in ints) if lead < 0 else tuple(ints)


def sparsest_in_kernel_real(M, bound: int | None = None, budget: int | None = None,
                            workers: int = 1) -> OracleReport:
    """Minimum support of a nonzero kernel vector via the criterion rank(M_S) < |S|.

    The witness is a primitive integer (or F_p) kernel vector supported on the
    lexicographically first minimal support.
    """
    res = min_dependent_support(M, 1, bound=bound, budget=budget, workers=workers)
    if res.size is None:
        return OracleReport(None, None, "support-search", True, floor=res.floor)
    S = list(res.support)
    sub = M.submatrix(S)
    K = kernel_basis(sub)
    col = K.column(0)
    full = [0] * M.cols
    if isinstance(M, MatFq):
        for j, v in zip(S, col):
            full[j] = int(v)
    else:
        for j, v in zip(S, _primitive([Fraction(x) for x in col])):
            full[j] = v
    return OracleReport(res.size, tuple(full), "support-search", True)


# -- quadratic systems ------------------------------------------------------------------------

@dataclass(frozen=True)
class QuadVerdict:
    """``status``: "SAT", "UNSAT" or "NO_BOOLEAN_WITNESS" (reals, Boolean scope only)."""

    status: str
    witness: tuple | None
    certified: bool
    note: str = ""

    def to_dict(self) -> dict:
        return {"status": self.status, "witness": None if self.witness is None else [str(x) for x in self.witness],
                "certified": self.certified, "note": self.note}


def _is_psd(S: list[list[Fraction]]) -> bool:
    """Exact positive semidefiniteness by symmetric elimination."""
    S = [list(r) for r in S]
    while S:
        a = S[0][0]
        if a < 0:
            return False
        if a == 0:
            if any(x != 0 for x in S[0]):
                return False
            S = [r[1:] for r in S[1:]]
            continue
        S = [[S[i][j] - S[i][0] * S[0][j] / a for j in range(1, len(S))] for i in range(1, len(S))]
    return True


def _sign_obstruction(sys: QuadSystem) -> str | None:
    for idx, (Q, b) in enumerate(sys.equations):
        n = sys.n_vars
        sym = [[(Fraction(Q[i, j]) + Fraction(Q[j, i])) / 2 for j in range(n)] for i in range(n)]
        b = Fraction(b)
        if b < 0 and _is_psd(sym):
            return f"equation {idx}: positive semidefinite form equals a negative constant"
        neg = [[-x for x in r] for r in sym]
        if b > 0 and _is_psd(neg):
            return f"equation {idx}: negative semidefinite form equals a positive constant"
    return None


def quad_solve_bruteforce(sys: QuadSystem, budget: int | None = None) -> QuadVerdict:
    """Exhaustive search: all of F_q^n for finite fields, Boolean vectors over the reals.

    Homogeneous systems ask for a nonzero solution. Over the reals the absence
    of a Boolean solution does not certify UNSAT; a sign obstruction
    (semidefinite form against a constant of the wrong sign) does.
    """
    n = sys.n_vars
    if sys.is_real:
        check_budget("Boolean assignment enumeration", 2 ** n, budget)
        for x in enumerate_vectors(FieldSpec(2), n):
            if sys.homogeneous and not any(x):
                continue
            if all(r == 0 for r in quad_eval(sys, x)):
                return QuadVerdict("SAT", tuple(x), True, "Boolean witness")
        why = _sign_obstruction(sys)
        if why is not None:
            return QuadVerdict("UNSAT", None, True, "real-UNSAT by inspection: " + why)
        return QuadVerdict("NO_BOOLEAN_WITNESS", None, False, "no Boolean witness; real UNSAT not certified")
    F = sys.field
    check_budget("assignment enumeration", F.q ** n, budget)
    if F.is_prime_field:
        p = F.p
        total = p ** n
        powers = p ** np.arange(n - 1, -1, -1, dtype=np.int64)
        for lo in range(0, total, 1 << 14):
            ids = np.arange(lo, min(total, lo + (1 << 14)), dtype=np.int64)
            X = (ids[:, None] // powers[None, :]) % p
            ok = np.ones(len(ids), dtype=bool)
            for Q, b in sys.equations:
                val = np.einsum("bi,ij,bj->b", X, np.asarray(Q, dtype=np.int64) % p, X) % p
                ok &= val == int(b) % p
            if sys.homogeneous:
                ok &= ids != 0
            hit = np.nonzero(ok)[0]
            if hit.size:
                return QuadVerdict("SAT", tuple(int(v) for v in X[hit[0]]), True)
        return QuadVerdict("UNSAT", None, True)
    for x in enumerate_vectors(F, n):
        if sys.homogeneous and not any(x):
            continue
        if all(r == 0 for r in quad_eval(sys, x)):
            return QuadVerdict("SAT", tuple(x), True)
    return QuadVerdict("UNSAT", None, True)


# -- lattices --------------------------------------------------------------------------------

def lattice_coordinates(inst: SvpInstance, x) -> list[int]:
    """Integer coefficients of x in the lattice basis; ValueError if x is not a lattice vector."""
    x = [int(v) for v in x]
    B = inst.lattice_basis
    if len(x) != B.rows:
        raise ValueError("vector has the wrong length")
    sol = solve(B.to_q(), [Fraction(v) for v in x])
    if sol is None or any(Fraction(c).denominator != 1 for c in sol):
        raise ValueError("vector is not in the lattice")
    return [int(c) for c in sol]


def svp_norm_check(inst: SvpInstance, x, p: int | None = None) -> Fraction:
    """Exact ||x||_p^p (||x||_0 for p = 0) of a lattice vector."""
    lattice_coordinates(inst, x)
    p = inst.p if p is None else p
    if p == 0:
        return Fraction(sum(1 for v in x if v))
    return Fraction(sum(abs(int(v)) ** p for v in x))
