"""Linear codes over F_q: constructions and exhaustive analyzers.

Codes are stored by an N x n generator matrix. A code may restrict its
messages to the prime subfield (``message_field``), which is how Reed-Solomon
codes over F_{q^m} with base-field coefficient messages are represented;
such a code is linear over the subfield only.

Coordinates of Hadamard and Reed-Solomon codes follow the element enumeration
order of the field module (vectors: first coordinate most significant).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

import numpy as np

from .budget import check_budget
from .field import FieldSpec, enumerate_vectors, make_field
from .matrix import (
    MatFq,
    batch_rank_mod_p,
    expand_generators,
    collapse_symbols,
    kronecker,
    rank,
    span_chunks,
    symbol_weights,
    _rref_generic,
)

BLOCK_LENGTH_CAP = 1 << 20


class CertificationError(ValueError):
    """A write-once certified field was given a conflicting value."""


@dataclass
class CodeMeta:
    """Certified facts about a code; each field is written at most once.

    ``d`` and ``d2`` are only set by exhaustive analyzers or by constructions
    whose weight formula is a theorem (Hadamard). Bounds that are not exact
    live in ``d_lower_bound`` and ``balanced_range``.
    """

    d: int | None = None
    d2: int | None = None
    max_weight: int | None = None
    epsilon: Fraction | None = None
    balanced_range: tuple[Fraction, Fraction] | None = None
    d_lower_bound: int | None = None

    def record(self, name: str, value) -> None:
        old = getattr(self, name)
        if old is not None and old != value:
            raise CertificationError(f"{name} already certified as {old}, refusing {value}")
        setattr(self, name, value)

    def to_dict(self) -> dict:
        out = {}
        for key in ("d", "d2", "max_weight", "d_lower_bound"):
            if getattr(self, key) is not None:
                out[key] = getattr(self, key)
        if self.epsilon is not None:
            out["epsilon"] = f"{self.epsilon.numerator}/{self.epsilon.denominator}"
        if self.balanced_range is not None:
            out["balanced_range"] = [f"{x.numerator}/{x.denominator}" for x in self.balanced_range]
        return out

    @staticmethod
    def from_dict(d: dict) -> "CodeMeta":
        meta = CodeMeta()
        for key in ("d", "d2", "max_weight", "d_lower_bound"):
            if key in d:
                setattr(meta, key, int(d[key]))
        if "epsilon" in d:
            meta.epsilon = Fraction(d["epsilon"])
        if "balanced_range" in d:
            meta.balanced_range = tuple(Fraction(x) for x in d["balanced_range"])
        return meta


@dataclass
class LinearCode:
    field: FieldSpec
    G: MatFq
    message_field: FieldSpec | None = None
    meta: CodeMeta = dc_field(default_factory=CodeMeta)

    def __post_init__(self):
        if self.G.field != self.field:
            raise ValueError("generator matrix lives in a different field")
        if rank(self.G) != self.G.cols:
            raise ValueError("generator matrix must have full column rank")

    @property
    def n(self) -> int:
        return self.G.cols

    @property
    def N(self) -> int:
        return self.G.rows

    @property
    def scalars(self) -> FieldSpec:
        return self.message_field or self.field

    @property
    def scalar_degree(self) -> int:
        return self.scalars.m

    def message_count(self) -> int:
        return self.scalars.q ** self.n

    def expanded(self) -> np.ndarray:
        """F_p generators over expanded coordinates (see matrix.expand_generators)."""
        return expand_generators(self.field, self.G.columns(), self.scalar_degree)

    def encode(self, message) -> list[int]:
        """Codeword of a message given as indices into ``scalars`` (subfield indices embed unchanged)."""
        F = self.field
        out = [0] * self.N
        for i, a in enumerate(message):
            a = int(a)
            if a:
                col = self.G.data[:, i]
                out = [F.add(o, F.mul(a, int(g))) for o, g in zip(out, col)]
        return out

    def to_dict(self) -> dict:
        d = {"field": self.field.to_dict(), "n": self.n, "N": self.N, "G": self.G.to_dict()}
        if self.message_field is not None:
            d["message_field"] = self.message_field.to_dict()
        meta = self.meta.to_dict()
        if meta:
            d["meta"] = meta
        return d

    @staticmethod
    def from_dict(d: dict) -> "LinearCode":
        from .matrix import matrix_from_dict
        F = FieldSpec.from_dict(d["field"])
        G = matrix_from_dict(d["G"])
        mf = FieldSpec.from_dict(d["message_field"]) if "message_field" in d else None
        code = LinearCode(F, G, mf, CodeMeta.from_dict(d.get("meta", {})))
        if code.n != int(d["n"]) or code.N != int(d["N"]):
            raise ValueError("declared dimensions disagree with the generator")
        return code


def hadamard_code(F: FieldSpec, m: int) -> LinearCode:
    """x in F^m maps to (<x, a>)_{a in F^m}; every nonzero word has weight q^m - q^(m-1)."""
    N = F.q ** m
    if N > 1 << 16:
        raise ValueError(f"Hadamard block length {N} exceeds 2^16")
    if m < 1:
        raise ValueError("dimension must be positive")
    G = MatFq(F, np.array(list(enumerate_vectors(F, m)), dtype=np.int64).reshape(N, m))
    code = LinearCode(F, G)
    d = N - N // F.q
    code.meta.record("d", d)
    code.meta.record("max_weight", d)
    code.meta.record("epsilon", Fraction(0))
    code.meta.record("balanced_range", (Fraction(d), Fraction(d)))
    return code


def rs_code(F_base: FieldSpec, m: int, n: int) -> LinearCode:
    """Evaluations over all of F_{q^m} of polynomials of degree < n with F_q coefficients."""
    if not F_base.is_prime_field:
        raise ValueError("the base field must be a prime field")
    FQ = make_field(F_base.p, m)
    Q = FQ.q
    if n > Q:
        raise ValueError(f"message length {n} exceeds the number of evaluation points {Q}")
    if n < 1:
        raise ValueError("message length must be positive")
    G = np.array([[FQ.pow(a, i) if (a or i) else 1 for i in range(n)] for a in range(Q)], dtype=np.int64)
    code = LinearCode(FQ, MatFq(FQ, G), F_base if m > 1 else None)
    code.meta.record("d_lower_bound", Q - n + 1)
    return code


def concat_code(outer: LinearCode, inner: LinearCode) -> LinearCode:
    """Replace each outer symbol by the inner encoding of its power-basis coordinates."""
    FQ, Fq = outer.field, inner.field
    if not Fq.is_prime_field or FQ.p != Fq.p:
        raise ValueError("inner code must live over the prime subfield of the outer field")
    if inner.n != FQ.m:
        raise ValueError(f"inner message length {inner.n} must equal the extension degree {FQ.m}")
    p = Fq.p
    Gin = inner.G.data
    cols = []
    for word in outer.expanded():
        digits = word.reshape(outer.N, FQ.m)
        inner_words = (digits @ Gin.T) % p
        cols.append(inner_words.reshape(-1))
    G = MatFq(Fq, np.array(cols, dtype=np.int64).T)
    code = LinearCode(Fq, G)
    d_out = outer.meta.d or outer.meta.d_lower_bound
    d_in = inner.meta.d or inner.meta.d_lower_bound
    if d_out and d_in:
        code.meta.record("d_lower_bound", d_out * d_in)
    return code


def eps_balanced_code(F: FieldSpec, n: int, eps) -> LinearCode:
    """Reed-Solomon over F_{q^m} concatenated with Hadamard(F, m), m minimal with n <= eps q^m."""
    eps = Fraction(eps)
    if not F.is_prime_field:
        raise ValueError("eps-balanced construction needs a prime base field")
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    q = F.q
    m = 1
    while n > eps * q ** m:
        m += 1
    Q = q ** m
    if Q * Q > 1 << 16:
        raise ValueError(f"block length {Q * Q} exceeds 2^16")
    code = concat_code(rs_code(F, m, n), hadamard_code(F, m))
    N = code.N
    low = (1 - eps) * (1 - Fraction(1, q)) * N
    high = (1 - Fraction(1, q)) * N
    code.meta.balanced_range = (low, high)
    code.meta.d_lower_bound = max(code.meta.d_lower_bound or 0, math.ceil(low))
    return code


def tensor_code(C: LinearCode, t: int = 2) -> LinearCode:
    if t < 1:
        raise ValueError("tensor exponent must be at least 1")
    if C.N ** t > BLOCK_LENGTH_CAP:
        raise ValueError(f"tensor block length {C.N ** t} exceeds the cap")
    if t == 1:
        return C
    G = C.G
    for _ in range(t - 1):
        G = kronecker(G, C.G)
    code = LinearCode(C.field, G, C.message_field)
    if C.meta.d is not None:
        code.meta.record("d", C.meta.d ** t)
    return code


# -- analyzers -------------------------------------------------------------------------

def certificate(claim: str, value, witness) -> dict:
    return {"claim": claim, "value": value, "witness": witness, "method": "exhaustive"}


@dataclass(frozen=True)
class DistanceReport:
    d: int
    witness: tuple[int, ...]
    max_weight: int

    def certificate(self) -> dict:
        return certificate("minimum distance", self.d, list(self.witness))


def _gray_positions(p: int, k: int):
    """Generator index changed (by +1) at each step of the modular p-ary Gray code."""
    for step in range(1, p ** k):
        prev, t = step - 1, 0
        while prev % p == p - 1:
            prev //= p
            t += 1
        yield t


def gray_weight_scan(gens: np.ndarray, F: FieldSpec):
    """Walk every nonzero F_p-combination of ``gens`` by Gray code.

    Returns (min weight, lexicographically smallest min-weight word as field
    indices, max weight). Each step adds one generator to the running word.
    """
    p, m = F.p, F.m
    k, W = gens.shape
    if k == 0:
        raise ValueError("the zero code has no minimum distance")
    best, best_word, max_w = None, None, 0

    if p == 2 and m == 1:
        pad = (-W) % 64
        bits = np.pad(gens.astype(np.uint8), ((0, 0), (0, pad)))
        packed = np.packbits(bits, axis=1).view(np.uint64)
        cur = np.zeros(packed.shape[1], dtype=np.uint64)

        def word_of(c):
            return tuple(np.unpackbits(c.view(np.uint8))[:W].tolist())

        for t in _gray_positions(2, k):
            cur ^= packed[t]
            w = int(np.bitwise_count(cur).sum())
            if w > max_w:
                max_w = w
            if best is None or w < best:
                best, best_word = w, word_of(cur)
            elif w == best:
                cand = word_of(cur)
                if cand < best_word:
                    best_word = cand
        return best, best_word, max_w

    cur = np.zeros(W, dtype=np.int64)
    for t in _gray_positions(p, k):
        cur += gens[t]
        cur %= p
        w = int(symbol_weights(cur[None, :], m)[0])
        if w > max_w:
            max_w = w
        if best is None or w <= best:
            cand = tuple(collapse_symbols(cur[None, :], F)[0].tolist())
            if best is None or w < best or cand < best_word:
                best, best_word = w, cand
    return best, best_word, max_w


def min_distance_exhaustive(C: LinearCode, budget: int | None = None) -> DistanceReport:
    """Exact minimum distance by Gray-code enumeration of all messages.

    Also certifies the maximum nonzero weight, hence the balance parameter
    epsilon = max/d - 1.
    """
    check_budget("codeword enumeration", C.message_count(), budget)
    d, word, max_w = gray_weight_scan(C.expanded(), C.field)
    C.meta.record("d", d)
    C.meta.record("max_weight", max_w)
    if C.meta.epsilon is None:
        C.meta.record("epsilon", Fraction(max_w, d) - 1)
    return DistanceReport(d, word, max_w)


def weight_enumerator(C: LinearCode, budget: int | None = None) -> dict[int, int]:
    """Number of codewords of each Hamming weight (zero word included)."""
    check_budget("codeword enumeration", C.message_count(), budget)
    counts: dict[int, int] = {}
    for _, words in span_chunks(C.expanded(), C.field.p):
        w, c = np.unique(symbol_weights(words, C.field.m), return_counts=True)
        for a, b in zip(w.tolist(), c.tolist()):
            counts[a] = counts.get(a, 0) + b
    return dict(sorted(counts.items()))


def _projective_words(C: LinearCode):
    """One codeword per 1-dimensional subspace (over the code's scalars)."""
    F, K = C.field, C.scalars
    gens = C.expanded()
    p, mk = F.p, K.m
    words = []
    for digits, w in span_chunks(gens, p):
        # message i has n blocks of mk residues; projective iff first nonzero block is the unit
        blocks = digits.reshape(len(digits), C.n, mk)
        nz = blocks.any(axis=2)
        first = np.argmax(nz, axis=1)
        lead = blocks[np.arange(len(blocks)), first]
        unit = np.zeros(mk, dtype=np.int64)
        unit[0] = 1
        keep = nz.any(axis=1) & np.all(lead == unit, axis=1)
        if keep.any():
            words.append(w[keep])
    return np.concatenate(words) if words else np.zeros((0, gens.shape[1]), dtype=np.int64)


@dataclass(frozen=True)
class PairReport:
    d2: int
    u: tuple[int, ...]
    v: tuple[int, ...]

    def certificate(self) -> dict:
        return certificate("second generalized Hamming weight", self.d2, [list(self.u), list(self.v)])


def d2_exhaustive(C: LinearCode, budget: int | None = None) -> PairReport:
    """Smallest |supp(u) ∪ supp(v)| over linearly independent codewords u, v."""
    if C.n < 2:
        raise ValueError("d2 is undefined for codes of dimension < 2")
    check_budget("codeword pair enumeration", C.message_count() ** 2, budget)
    F = C.field
    words = _projective_words(C)
    B = len(words)
    supp = words.reshape(B, C.N, F.m).any(axis=2).astype(np.int64)
    wts = supp.sum(axis=1)
    best, pair = None, None
    block = max(1, 4_000_000 // max(B, 1))
    for lo in range(0, B, block):
        hi = min(B, lo + block)
        inter = supp[lo:hi] @ supp.T
        union = wts[lo:hi, None] + wts[None, :] - inter
        rows = np.arange(lo, hi)[:, None]
        union = np.where(np.arange(B)[None, :] > rows, union, np.iinfo(np.int64).max)
        val = int(union.min())
        if best is None or val < best:
            i, j = np.unravel_index(int(np.argmin(union)), union.shape)
            best, pair = val, (lo + int(i), int(j))
    sym = collapse_symbols(words[list(pair)], F)
    C.meta.record("d2", best)
    return PairReport(best, tuple(sym[0].tolist()), tuple(sym[1].tolist()))


def non_overlap_coeff(C: LinearCode, budget: int | None = None) -> Fraction:
    """alpha = d2 / d, computing whichever is not yet certified."""
    if C.meta.d is None:
        min_distance_exhaustive(C, budget)
    if C.meta.d2 is None:
        d2_exhaustive(C, budget)
    return Fraction(C.meta.d2, C.meta.d)


@dataclass(frozen=True)
class Rank2Report:
    min_rank2_weight: int | None
    rank2_witness: tuple[int, ...] | None
    min_rank1_weight: int
    rank1_witness: tuple[int, ...]

    def certificate(self) -> dict:
        return certificate("minimum weight of rank>=2 words of C (x) C", self.min_rank2_weight,
                           list(self.rank2_witness) if self.rank2_witness else None)


def rank2_min_weight(C: LinearCode, budget: int | None = None) -> Rank2Report:
    """Minimum Hamming weight among words of C ⊗ C of matrix rank >= 2 (and of rank 1).

    Words are N x N matrices flattened row-major; ranks are computed on the
    codeword matrices themselves.
    """
    F = C.field
    k = C.n * C.n * C.scalar_degree
    check_budget("tensor codeword enumeration", F.p ** k, budget)
    T = tensor_code(C, 2)
    gens = T.expanded()
    best = {1: (None, None), 2: (None, None)}
    for _, words in span_chunks(gens, F.p, chunk=2048):
        sym = collapse_symbols(words, F)
        wts = symbol_weights(words, F.m)
        if F.is_prime_field:
            ranks = batch_rank_mod_p(sym.reshape(-1, C.N, C.N), F.p)
        else:
            ranks = np.array([len(_rref_generic(s.reshape(C.N, C.N).tolist(), F)[1]) for s in sym])
        for cls, mask in ((1, ranks == 1), (2, ranks >= 2)):
            if not mask.any():
                continue
            idx = np.nonzero(mask)[0]
            low = int(wts[idx].min())
            cur = best[cls][0]
            if cur is None or low <= cur:
                cands = [tuple(sym[i].tolist()) for i in idx[wts[idx] == low]]
                cand = min(cands)
                if cur is None or low < cur or cand < best[cls][1]:
                    best[cls] = (low, cand)
    return Rank2Report(best[2][0], best[2][1], best[1][0], best[1][1])


def random_code(F: FieldSpec, n: int, N: int, rng: np.random.Generator) -> LinearCode:
    """Uniform random full-rank N x n generator (rejection sampling)."""
    if n > N:
        raise ValueError("dimension exceeds block length")
    while True:
        G = MatFq(F, rng.integers(0, F.q, size=(N, n)))
        if rank(G) == n:
            return LinearCode(F, G)
