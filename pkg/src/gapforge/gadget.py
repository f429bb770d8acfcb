"""Real coding gadgets: Rademacher kernels, Boolean projections and their certification.

A gadget is (R, T, k): C = ker(R) for a +-1 matrix R, a 0/1 projection T and
a sparsity budget k. Certification is exact: distances come from
support/rank searches, weak local density from enumerating the Boolean
slice ker(R) ∩ H_k.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

import numpy as np

from .budget import BudgetExceeded, check_budget
from .matrix import MatZ, min_dependent_support

# Unspecified universal constants (c0, C0, C1, c2, C2). They only annotate
# reports; nothing exact depends on them.
CONSTANTS = {"c0": 1, "C0": 1, "C1": 1, "c2": 1, "C2": 1}

ROLE_R, ROLE_T, ROLE_SMALL_BALL = 0, 1, 2


def _rng(seed: int, role: int, *extra: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(seed), role, *extra])))


@dataclass(frozen=True)
class GadgetParams:
    n: int
    epsilon: Fraction
    C2: Fraction
    delta: Fraction
    h: int
    d: int
    k: int
    N: int

    def to_dict(self) -> dict:
        return {"n": self.n, "epsilon": str(self.epsilon), "C2": str(self.C2), "delta": str(self.delta),
                "h": self.h, "d": self.d, "k": self.k, "N": self.N}


def gadget_params(n: int, eps, C2=None) -> GadgetParams:
    """delta = eps/(3 C2), h = n^3, d = ceil(delta h), k = ceil(d (1+eps)), N largest with h >= d log_{sqrt d}(N/d).

    The N condition is decided as N^(2d) <= d^(h+2d) in exact integers.
    """
    eps = Fraction(eps)
    C2 = Fraction(CONSTANTS["C2"] if C2 is None else C2)
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    if C2 <= 0:
        raise ValueError("C2 must be positive")
    delta = eps / (3 * C2)
    h = n ** 3
    d = math.ceil(delta * h)
    k = math.ceil(d * (1 + eps))
    if d < 1:
        raise ValueError("parameters too tight: d < 1")
    rhs = d ** (h + 2 * d)
    N = 0
    while (N + 1) ** (2 * d) <= rhs:
        N += 1
        if d == 1:
            break
    if N < 1:
        raise ValueError("parameters too tight: N < 1")
    return GadgetParams(n, eps, C2, delta, h, d, k, N)


def sample_rademacher(h: int, N: int, seed: int) -> MatZ:
    """h x N matrix of independent uniform +-1 entries, fixed by the seed."""
    bits = _rng(seed, ROLE_R).integers(0, 2, size=(h, N))
    return MatZ((2 * bits - 1).tolist(), shape=(h, N))


def sample_projection(n: int, N: int, k: int, seed: int) -> MatZ:
    """n x N 0/1 matrix, each entry 1 with probability exactly 1/(4kn)."""
    m = 4 * k * n
    if m < 1:
        raise ValueError("4kn must be at least 1")
    draws = _rng(seed, ROLE_T).integers(0, m, size=(n, N))
    return MatZ((draws == 0).astype(np.int64).tolist(), shape=(n, N))


@dataclass(frozen=True)
class RademacherGadget:
    R: MatZ
    T: MatZ
    k: int
    params: dict = dc_field(default_factory=dict)
    name: str = "rademacher"

    @property
    def n(self) -> int:
        return self.T.rows

    @property
    def N(self) -> int:
        return self.R.cols

    def to_dict(self) -> dict:
        return {"name": self.name, "R": self.R.to_dict(), "T": self.T.to_dict(), "k": self.k,
                "params": self.params, "seed": self.params.get("seed")}

    @staticmethod
    def from_dict(d: dict) -> "RademacherGadget":
        from .matrix import matrix_from_dict
        R, T = matrix_from_dict(d["R"]), matrix_from_dict(d["T"])
        if any(v not in (-1, 1) for row in R.tolist() for v in row):
            raise ValueError("R must have +-1 entries")
        if any(v not in (0, 1) for row in T.tolist() for v in row):
            raise ValueError("T must have 0/1 entries")
        return RademacherGadget(R, T, int(d["k"]), d.get("params", {}), d.get("name", "rademacher"))


def sample_gadget(n: int, eps, seed: int, C2=None) -> RademacherGadget:
    prm = gadget_params(n, eps, C2)
    R = sample_rademacher(prm.h, prm.N, seed)
    T = sample_projection(n, prm.N, prm.k, seed)
    params = prm.to_dict()
    params["seed"] = int(seed)
    return RademacherGadget(R, T, prm.k, params)


def handcrafted_gadget() -> RademacherGadget:
    """R = [[1,1,-1,-1],[1,-1,1,-1]], T = [1,0,0,0], k = 2: a (1, 2, 1)-coding gadget."""
    R = MatZ([[1, 1, -1, -1], [1, -1, 1, -1]])
    T = MatZ([[1, 0, 0, 0]])
    return RademacherGadget(R, T, 2, {"n": 1, "h": 2, "N": 4, "d": 2, "epsilon": "0", "seed": None},
                            name="handcrafted")


FIXTURES = {"handcrafted": handcrafted_gadget}


# -- Boolean slices ----------------------------------------------------------------------

def boolean_slice_kernel(R, k: int, at_most: bool = False, budget: int | None = None) -> list[tuple[int, ...]]:
    """0/1 vectors u of weight k (or 1..k with ``at_most``) with R u = 0, sorted lexicographically.

    Depth-first over columns; a branch dies when some coordinate of the
    running sum is larger in magnitude than the number of columns still to
    be chosen.
    """
    A = np.array(R.tolist() if hasattr(R, "tolist") else R, dtype=np.int64)
    if A.ndim != 2:
        raise ValueError("R must be a matrix")
    h, N = A.shape
    weights = range(1, k + 1) if at_most else [k]
    check_budget("Boolean slice enumeration", sum(math.comb(N, w) for w in weights), budget)
    cols = [A[:, j] for j in range(N)]
    found: list[tuple[int, ...]] = []

    def dfs(start: int, left: int, acc: np.ndarray, chosen: list[int]):
        if left == 0:
            if not acc.any():
                u = [0] * N
                for j in chosen:
                    u[j] = 1
                found.append(tuple(u))
            return
        if np.abs(acc).max(initial=0) > left or N - start < left:
            return
        for j in range(start, N - left + 1):
            chosen.append(j)
            dfs(j + 1, left - 1, acc + cols[j], chosen)
            chosen.pop()

    for w in weights:
        dfs(0, w, np.zeros(h, dtype=np.int64), [])
    return sorted(found)


def slice_expectation(N: int, k: int, h: int) -> Fraction:
    """E|ker(R) ∩ H_k^N| for R with h independent Rademacher rows: C(N,k) Pr[sum of k signs = 0]^h."""
    return math.comb(N, k) * balanced_sum_probability(k) ** h


def balanced_sum_probability(d: int) -> Fraction:
    """Pr[xi_1 + ... + xi_d = 0] for independent uniform signs."""
    if d % 2:
        return Fraction(0)
    return Fraction(math.comb(d, d // 2), 2 ** d)


# -- exact distances ------------------------------------------------------------------------

def exact_min_distance_real(R, bound: int | None = None, budget: int | None = None, workers: int = 1):
    """Minimum support of a nonzero real kernel vector: min |S| with rank(R_S) < |S|."""
    R = R if isinstance(R, MatZ) else MatZ(R)
    return min_dependent_support(R, 1, bound=bound, budget=budget, workers=workers)


def exact_d2_real(R, bound: int | None = None, budget: int | None = None, workers: int = 1, start: int = 2):
    """Second generalised Hamming weight of ker(R): min |S| with rank(R_S) <= |S| - 2."""
    R = R if isinstance(R, MatZ) else MatZ(R)
    return min_dependent_support(R, 2, bound=bound, start=start, budget=budget, workers=workers)


def verify_weak_local_density(gadget: RademacherGadget, budget: int | None = None, slice_vectors=None):
    """Check T(ker(R) ∩ H_k) ⊇ {0,1}^n; returns (covered, missing targets)."""
    if slice_vectors is None:
        slice_vectors = boolean_slice_kernel(gadget.R, gadget.k, budget=budget)
    n = gadget.T.rows
    check_budget("weak local density targets", 2 ** n, budget)
    T = np.array(gadget.T.tolist(), dtype=np.int64).reshape(n, gadget.N)
    hit = set()
    for u in slice_vectors:
        hit.add(tuple(int(v) for v in T @ np.array(u, dtype=np.int64)))
    missing = []
    for idx in range(2 ** n):
        target = tuple((idx >> (n - 1 - i)) & 1 for i in range(n))
        if target not in hit:
            missing.append(target)
    return not missing, missing


# -- width and small-ball checks ----------------------------------------------------------------

@dataclass(frozen=True)
class WidthReport:
    ratio_sq: Fraction
    compressible: bool | None = None


def width_ratio(u, rho=None, delta=None, d=None) -> WidthReport:
    """(||u||_1 / ||u||_2)^2 as an exact rational, plus an optional compressibility verdict.

    u is (rho, delta)-compressible when dropping its floor(delta d) largest
    entries leaves at most rho^2 of the squared norm.
    """
    vals = [abs(Fraction(x)) for x in u]
    l2 = sum(v * v for v in vals)
    if l2 == 0:
        raise ValueError("width ratio of the zero vector")
    l1 = sum(vals)
    comp = None
    if rho is not None and delta is not None and d is not None:
        drop = math.floor(Fraction(delta) * d)
        rest = sorted(vals, reverse=True)[drop:]
        comp = sum(v * v for v in rest) <= Fraction(rho) ** 2 * l2
    return WidthReport(l1 * l1 / l2, comp)


def _orthonormal(u1, u2) -> bool:
    exact = all(isinstance(x, (int, Fraction)) for x in list(u1) + list(u2))
    if exact:
        dot = sum(Fraction(a) * b for a, b in zip(u1, u2))
        return dot == 0 and sum(Fraction(a) ** 2 for a in u1) == 1 and sum(Fraction(a) ** 2 for a in u2) == 1
    a, b = np.asarray(u1, dtype=float), np.asarray(u2, dtype=float)
    return abs(a @ b) < 1e-9 and abs(a @ a - 1) < 1e-9 and abs(b @ b - 1) < 1e-9


SLACK = 1e-12


def small_ball_estimate(u1, u2, t, trials: int = 100_000, seed: int = 0, mode: str = "exact",
                        budget: int | None = None):
    """Pr[|<xi,u1>| <= t and |<xi,u2>| <= t] over uniform sign vectors xi.

    ``exact`` enumerates all 2^N sign vectors and returns a Fraction;
    ``montecarlo`` returns the empirical frequency over seeded draws.
    """
    if len(u1) != len(u2):
        raise ValueError("vectors have different lengths")
    if not _orthonormal(u1, u2):
        raise ValueError("u1, u2 must be orthonormal")
    U = np.array([np.asarray(u1, dtype=float), np.asarray(u2, dtype=float)]).T
    N = U.shape[0]
    t = float(t)
    if mode == "exact":
        check_budget("sign enumeration", 2 ** N, budget)
        hits = 0
        for lo in range(0, 2 ** N, 1 << 16):
            ids = np.arange(lo, min(2 ** N, lo + (1 << 16)))
            signs = 1 - 2 * ((ids[:, None] >> np.arange(N)[None, :]) & 1)
            proj = signs @ U
            hits += int(np.all(np.abs(proj) <= t + SLACK, axis=1).sum())
        return Fraction(hits, 2 ** N)
    if mode == "montecarlo":
        rng = _rng(seed, ROLE_SMALL_BALL)
        hits, done = 0, 0
        while done < trials:
            m = min(1 << 16, trials - done)
            signs = 1 - 2 * rng.integers(0, 2, size=(m, N))
            proj = signs @ U
            hits += int(np.all(np.abs(proj) <= t + SLACK, axis=1).sum())
            done += m
        return hits / trials
    raise ValueError(f"unknown mode {mode!r}")


# -- certification -----------------------------------------------------------------------------

@dataclass(frozen=True)
class GadgetCert:
    d_exact: int | None
    d2_exact: int | None
    rho: Fraction | None
    alpha: Fraction | None
    wld_verified: bool
    boolean_slice_count: int | None
    missing_targets: tuple = ()
    unverified: tuple[str, ...] = ()
    d_witness: tuple[int, ...] | None = None
    d2_witness: tuple[int, ...] | None = None

    @property
    def complete(self) -> bool:
        return not self.unverified

    def to_dict(self) -> dict:
        def fr(x):
            return None if x is None else f"{x.numerator}/{x.denominator}"
        return {
            "d": self.d_exact, "d2": self.d2_exact, "rho": fr(self.rho), "alpha": fr(self.alpha),
            "wld": self.wld_verified, "slice_count": self.boolean_slice_count,
            "missing_targets": [list(t) for t in self.missing_targets],
            "unverified": list(self.unverified),
            "d_witness": None if self.d_witness is None else list(self.d_witness),
            "d2_witness": None if self.d2_witness is None else list(self.d2_witness),
        }

    def summary(self) -> dict:
        return {"d": self.d_exact, "d2": self.d2_exact, "rho": self.rho, "alpha": self.alpha,
                "wld": self.wld_verified, "slice_count": self.boolean_slice_count}


def certify_gadget(gadget: RademacherGadget, budget: int | None = None, workers: int = 1) -> GadgetCert:
    """Exact d, d2, weak local density and slice count; over-budget parts are left unverified."""
    unverified = []
    d = d2 = None
    dw = d2w = None
    searched = False
    try:
        res = exact_min_distance_real(gadget.R, budget=budget, workers=workers)
        d, dw, searched = res.size, res.support, True
    except BudgetExceeded:
        unverified.append("d")
    if d is not None:
        try:
            res2 = exact_d2_real(gadget.R, budget=budget, workers=workers, start=d + 1)
            d2, d2w = res2.size, res2.support
        except BudgetExceeded:
            unverified.append("d2")
    elif not searched:
        unverified.append("d2")
    # a completed search with no result means ker(R) = 0: d and d2 stay None
    slice_count = None
    wld, missing = False, ()
    try:
        vecs = boolean_slice_kernel(gadget.R, gadget.k, budget=budget)
        slice_count = len(vecs)
        wld, missing = verify_weak_local_density(gadget, budget=budget, slice_vectors=vecs)
        missing = tuple(missing)
    except BudgetExceeded:
        unverified.extend(["slice_count", "wld"])
    rho = Fraction(gadget.k, d) if d else None
    alpha = Fraction(d2, d) if d and d2 else None
    return GadgetCert(d, d2, rho, alpha, wld, slice_count, missing, tuple(unverified), dw, d2w)


# -- experiments ----------------------------------------------------------------------------

CSV_FIELDS = ("seed", "h", "N", "k", "d", "d2", "alpha", "slice_count", "wld")


def slice_count_row(seed: int, h: int, N: int, k: int) -> dict:
    R = sample_rademacher(h, N, seed)
    count = len(boolean_slice_kernel(R, k))
    weight1 = len(boolean_slice_kernel(R, 1))
    # next slice of the same parity, reported only once the weight-k slice is populated
    nxt = len(boolean_slice_kernel(R, k + 2)) if count and k + 2 <= N else ""
    return {"seed": seed, "h": h, "N": N, "k": k, "d": "", "d2": "", "alpha": "",
            "slice_count": count, "wld": "", "weight1": weight1, "slice_count_next": nxt}


def d2_row(seed: int, h: int, N: int, k: int, budget: int | None = None, workers: int = 1) -> dict:
    """Exact d and d2 of ker(R) for one sampled R, with slice count and WLD at n = 1."""
    R = sample_rademacher(h, N, seed)
    d = exact_min_distance_real(R, budget=budget, workers=workers).size
    d2 = exact_d2_real(R, budget=budget, workers=workers, start=(d or 1) + 1).size if d else None
    gad = RademacherGadget(R, sample_projection(1, N, k, seed), k, {"seed": seed})
    vecs = boolean_slice_kernel(R, k, budget=budget)
    wld, _ = verify_weak_local_density(gad, slice_vectors=vecs)
    alpha = Fraction(d2, d) if d and d2 else None
    return {"seed": seed, "h": h, "N": N, "k": k, "d": d, "d2": d2,
            "alpha": "" if alpha is None else f"{alpha.numerator}/{alpha.denominator}",
            "slice_count": len(vecs), "wld": str(wld).lower()}
