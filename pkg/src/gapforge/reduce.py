"""Reductions from quadratic systems to sparse-vector problems.

* ``quad_to_mdp``: homogeneous system over F_q plus a balanced code G gives
  V = {G X G^T : Q_l(X) = 0, X symmetric}.
* ``quad_to_mdp_distinguished`` appends the coordinate X[z, z], and
  ``mdp_to_ncp`` slices the result to the affine set where it equals 1.
* ``quad_to_real_mdp`` replaces the code by a real coding gadget (R, T, k) and
  writes V = ker(M) for an integer matrix M.
* ``tensor_instance`` amplifies the gap, ``real_to_svp`` takes the integer
  points of a real instance.

Vectors of matrices are flattened row-major throughout.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field as dc_field, replace
from fractions import Fraction
from functools import reduce as _fold

import numpy as np

from .budget import check_budget
from .circuit import QuadSystem
from .codes import LinearCode
from .field import REAL, FieldSpec
from .matrix import (
    MatFq,
    MatQ,
    MatZ,
    hnf_integer_kernel,
    kernel_basis,
    kronecker,
    matrix_from_dict,
    rank,
)

AMBIENT_CAP = 1 << 20


class ReductionError(ValueError):
    """Inputs violate a reduction's preconditions."""


def _frac_str(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def _provenance(circuit_hash="", gadget_seed=None, epsilon=None, tensor_t=1, **extra) -> dict:
    d = {
        "circuit_hash": circuit_hash,
        "gadget_seed": gadget_seed,
        "epsilon": None if epsilon is None else _frac_str(epsilon),
        "tensor_t": tensor_t,
    }
    d.update(extra)
    return d


def digest(obj: dict) -> str:
    return hashlib.sha256(json.dumps(obj, sort_keys=True).encode()).hexdigest()[:16]


# -- instance types ---------------------------------------------------------------------

@dataclass(frozen=True)
class MdpInstance:
    """A subspace V given by basis columns, with threshold s and claimed gap.

    ``distinguished`` marks instances whose last coordinate equals 1 on the
    planted YES witness.
    """

    basis: MatFq | MatQ
    s: int
    claimed_gap: Fraction
    planted: tuple[int, ...] | None = None
    distinguished: bool = False
    provenance: dict = dc_field(default_factory=dict)

    kind = "mdp"

    @property
    def field(self):
        return self.basis.field if isinstance(self.basis, MatFq) else REAL

    @property
    def length(self) -> int:
        return self.basis.rows

    @property
    def dim(self) -> int:
        return self.basis.cols

    def to_dict(self) -> dict:
        d = {
            "kind": self.kind,
            "basis": self.basis.to_dict(),
            "s": self.s,
            "claimed_gap": _frac_str(self.claimed_gap),
            "distinguished": self.distinguished,
            "provenance": self.provenance,
        }
        if isinstance(self.basis, MatFq):
            d["field"] = self.basis.field.to_dict()
        if self.planted is not None:
            d["planted"] = list(self.planted)
        return d

    @staticmethod
    def from_dict(d: dict) -> "MdpInstance":
        return MdpInstance(
            matrix_from_dict(d["basis"]), int(d["s"]), Fraction(d["claimed_gap"]),
            tuple(d["planted"]) if d.get("planted") is not None else None,
            bool(d.get("distinguished", False)), d.get("provenance", {}),
        )


@dataclass(frozen=True)
class NcpInstance:
    """The affine set V' = offset + span(basis): vectors of V with last coordinate 1."""

    offset: tuple[int, ...]
    basis: MatFq
    s: int
    claimed_gap: Fraction
    planted: tuple[int, ...] | None = None
    provenance: dict = dc_field(default_factory=dict)

    kind = "ncp"

    @property
    def field(self) -> FieldSpec:
        return self.basis.field

    def to_dict(self) -> dict:
        F = self.basis.field
        d = {
            "kind": self.kind,
            "field": F.to_dict(),
            "offset": [F.render(a) for a in self.offset],
            "basis": self.basis.to_dict(),
            "s": self.s,
            "claimed_gap": _frac_str(self.claimed_gap),
            "provenance": self.provenance,
        }
        if self.planted is not None:
            d["planted"] = list(self.planted)
        return d

    @staticmethod
    def from_dict(d: dict) -> "NcpInstance":
        F = FieldSpec.from_dict(d["field"])
        return NcpInstance(
            tuple(F.parse(a) for a in d["offset"]), matrix_from_dict(d["basis"]), int(d["s"]),
            Fraction(d["claimed_gap"]),
            tuple(d["planted"]) if d.get("planted") is not None else None, d.get("provenance", {}),
        )


@dataclass(frozen=True)
class RealInstance:
    """V = ker(M) over the reals, M integral; the last coordinate is z."""

    M: MatZ
    s: int
    claimed_gap: Fraction
    planted: tuple[int, ...] | None = None
    gadget: dict = dc_field(default_factory=dict)
    provenance: dict = dc_field(default_factory=dict)

    kind = "real"

    @property
    def length(self) -> int:
        return self.M.cols

    def to_dict(self) -> dict:
        d = {
            "kind": self.kind,
            "M": self.M.to_dict(),
            "s": self.s,
            "claimed_gap": _frac_str(self.claimed_gap),
            "gadget": self.gadget,
            "provenance": self.provenance,
        }
        if self.planted is not None:
            d["planted"] = list(self.planted)
        return d

    @staticmethod
    def from_dict(d: dict) -> "RealInstance":
        return RealInstance(
            matrix_from_dict(d["M"]), int(d["s"]), Fraction(d["claimed_gap"]),
            tuple(d["planted"]) if d.get("planted") is not None else None,
            d.get("gadget", {}), d.get("provenance", {}),
        )


@dataclass(frozen=True)
class SvpInstance:
    """The lattice V ∩ Z^n, basis as columns; ``p`` is the norm exponent."""

    lattice_basis: MatZ
    s: int
    p: int
    claimed_gap: Fraction
    planted: tuple[int, ...] | None = None
    provenance: dict = dc_field(default_factory=dict)

    kind = "svp"

    def to_dict(self) -> dict:
        d = {
            "kind": self.kind,
            "lattice_basis": self.lattice_basis.to_dict(),
            "s": self.s,
            "p": self.p,
            "claimed_gap": _frac_str(self.claimed_gap),
            "provenance": self.provenance,
        }
        if self.planted is not None:
            d["planted"] = list(self.planted)
        return d

    @staticmethod
    def from_dict(d: dict) -> "SvpInstance":
        return SvpInstance(
            matrix_from_dict(d["lattice_basis"]), int(d["s"]), int(d["p"]), Fraction(d["claimed_gap"]),
            tuple(d["planted"]) if d.get("planted") is not None else None, d.get("provenance", {}),
        )


_KINDS = {"mdp": MdpInstance, "ncp": NcpInstance, "real": RealInstance, "svp": SvpInstance}


def instance_from_dict(d: dict):
    try:
        cls = _KINDS[d["kind"]]
    except KeyError:
        raise ValueError(f"unknown instance kind {d.get('kind')!r}") from None
    return cls.from_dict(d)


def dumps(inst) -> str:
    return json.dumps(inst.to_dict(), sort_keys=True, indent=1) + "\n"


def loads(text: str):
    return instance_from_dict(json.loads(text))


# -- F_q helpers --------------------------------------------------------------------------

def _fq_matmul(F: FieldSpec, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    if F.is_prime_field:
        return (A @ B) % F.p
    if F.q > 256:
        out = np.zeros((A.shape[0], B.shape[1]), dtype=np.int64)
        for i, j in np.ndindex(*out.shape):
            acc = 0
            for a, b in zip(A[i], B[:, j]):
                acc = F.add(acc, F.mul(int(a), int(b)))
            out[i, j] = acc
        return out
    add, mul = F.tables()
    out = np.zeros((A.shape[0], B.shape[1]), dtype=np.int64)
    for t in range(A.shape[1]):
        out = add[out, mul[A[:, t][:, None], B[t, :][None, :]]]
    return out


def _symmetric_params(n: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(n) for j in range(i, n)]


def code_epsilon(G: LinearCode) -> Fraction:
    """Balance parameter of a certified code: max weight / d - 1."""
    meta = G.meta
    if meta.d is None:
        raise ReductionError("code distance is not certified; run min_distance_exhaustive first")
    if meta.epsilon is not None:
        return meta.epsilon
    if meta.max_weight is not None:
        return Fraction(meta.max_weight, meta.d) - 1
    if meta.balanced_range is not None:
        return Fraction(meta.balanced_range[1]) / meta.d - 1
    raise ReductionError("code is not certified balanced")


def _check_system_code(sys: QuadSystem, G: LinearCode) -> FieldSpec:
    if sys.is_real:
        raise ReductionError("the F_q reduction needs a system over a finite field")
    if not sys.homogeneous:
        raise ReductionError("the F_q reduction needs a homogeneous system")
    if sys.field != G.field:
        raise ReductionError(f"system over {sys.field!r} but code over {G.field!r}")
    if G.message_field is not None:
        raise ReductionError("the code must be linear over its own field")
    if G.n < sys.n_vars:
        raise ReductionError(f"code message length {G.n} is below the {sys.n_vars} system variables")
    return sys.field


def _sym_kernel(sys: QuadSystem) -> list[np.ndarray]:
    """Basis of {X symmetric : Q_l(X) = 0 for all l}, as n x n index arrays."""
    F = sys.field
    n = sys.n_vars
    params = _symmetric_params(n)
    rows = []
    for Q, _ in sys.equations:
        row = []
        for i, j in params:
            row.append(int(Q[i, i]) if i == j else F.add(int(Q[i, j]), int(Q[j, i])))
        rows.append(row)
    if rows:
        K = kernel_basis(MatFq(F, np.array(rows, dtype=np.int64).reshape(len(rows), len(params))))
        vecs = K.columns()
    else:
        vecs = [[int(t == u) for u in range(len(params))] for t in range(len(params))]
    out = []
    for v in vecs:
        X = np.zeros((n, n), dtype=np.int64)
        for (i, j), a in zip(params, v):
            X[i, j] = X[j, i] = a
        out.append(X)
    return out


def _mdp_core(sys: QuadSystem, G: LinearCode, distinguished: bool, gadget_name: str) -> MdpInstance:
    F = _check_system_code(sys, G)
    eps = code_epsilon(G)
    d = G.meta.d
    n = sys.n_vars
    Gs = G.G.data[:, :n]
    L = G.N * G.N + (1 if distinguished else 0)
    if L > AMBIENT_CAP:
        raise ReductionError(f"ambient dimension {L} exceeds the cap")
    z = sys.distinguished if distinguished else None
    if distinguished and z is None:
        raise ReductionError("system has no distinguished variable")

    cols = []
    for X in _sym_kernel(sys):
        Y = _fq_matmul(F, _fq_matmul(F, Gs, X), Gs.T).reshape(-1)
        if distinguished:
            Y = np.append(Y, X[z, z])
        cols.append(Y)
    basis = MatFq(F, np.array(cols, dtype=np.int64).T.reshape(L, len(cols)))

    s = math.floor((1 + eps) ** 2 * d * d)
    if distinguished:
        s += 1
    gap = (1 + Fraction(1, F.q)) / (1 + eps) ** 2

    planted = None
    if sys.witness is not None:
        x = np.array(sys.witness, dtype=np.int64)
        if not set(x.tolist()) <= {0, 1} or not x.any():
            raise ReductionError("planted witnesses must be nonzero Boolean vectors")
        u = _fq_matmul(F, Gs, x.reshape(-1, 1)).reshape(-1)
        Y = _fq_matmul(F, u.reshape(-1, 1), u.reshape(1, -1)).reshape(-1)
        if distinguished:
            Y = np.append(Y, int(x[z]))
        planted = tuple(int(v) for v in Y)

    prov = _provenance(sys.source, gadget_seed=None, epsilon=eps, tensor_t=1,
                       system_hash=sys.digest(), gadget=gadget_name, d=d)
    return MdpInstance(basis, s, gap, planted, distinguished, prov)


def quad_to_mdp(sys: QuadSystem, G: LinearCode, gadget_name: str = "") -> MdpInstance:
    """V = {G X G^T : Q_l(X) = 0, X = X^T}, using the first n_vars message coordinates of G."""
    return _mdp_core(sys, G, False, gadget_name)


def quad_to_mdp_distinguished(sys: QuadSystem, G: LinearCode, gadget_name: str = "") -> MdpInstance:
    """As quad_to_mdp, with the distinguished entry X[z, z] appended as a last coordinate."""
    return _mdp_core(sys, G, True, gadget_name)


def mdp_to_ncp(inst: MdpInstance) -> NcpInstance:
    """Affine slice {x in V : x_last = 1} as offset plus a basis with last coordinate 0."""
    if not inst.distinguished:
        raise ReductionError("the NCP reduction needs an instance with a distinguished coordinate")
    F = inst.field
    cols = inst.basis.columns()
    lead = next((i for i, c in enumerate(cols) if c[-1] != 0), None)
    if lead is None:
        raise ReductionError("no vector of V has last coordinate 1")
    inv = F.inv(cols[lead][-1])
    offset = [F.mul(inv, a) for a in cols[lead]]
    rest = []
    for i, c in enumerate(cols):
        if i == lead:
            continue
        f = c[-1]
        rest.append([F.sub(a, F.mul(f, o)) for a, o in zip(c, offset)])
    basis = MatFq.from_columns(F, rest, inst.length)
    return NcpInstance(tuple(offset), basis, inst.s, inst.claimed_gap, inst.planted, dict(inst.provenance))


# -- real reduction -------------------------------------------------------------------------

def _lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)


def _integral(row: list[Fraction]) -> list[int]:
    den = _fold(_lcm, (Fraction(x).denominator for x in row), 1)
    ints = [int(Fraction(x) * den) for x in row]
    g = _fold(math.gcd, ints, 0)
    return [v // g for v in ints] if g > 1 else ints


def _real_constraints(sys: QuadSystem, R: np.ndarray, T: np.ndarray, k: int) -> list[list[int]]:
    h, N = R.shape
    nn = N * N
    width = nn + 1
    rows: list[list[int]] = []
    # rows of Y lie in ker R: (I (x) R) vec(Y) = 0
    for i in range(N):
        for a in range(h):
            r = [0] * width
            for j in range(N):
                r[i * N + j] = int(R[a, j])
            rows.append(r)
    # columns of Y lie in ker R: (R (x) I) vec(Y) = 0
    for a in range(h):
        for j in range(N):
            r = [0] * width
            for i in range(N):
                r[i * N + j] = int(R[a, i])
            rows.append(r)
    for i in range(N):
        for j in range(i + 1, N):
            r = [0] * width
            r[i * N + j], r[j * N + i] = 1, -1
            rows.append(r)
    r = [0] * width
    for i in range(N):
        r[i * N + i] = -1
    r[nn] = k
    rows.append(r)
    Tq = [[Fraction(int(v)) for v in row] for row in T]
    n = sys.n_vars
    for Q, b in sys.equations:
        # Q(T Y T^T) = sum_{i,j} (T^T Q T)[i, j] Y[i, j]
        coef = [[sum(Tq[a][i] * Q[a, c] * Tq[c][j] for a in range(n) for c in range(n) if Q[a, c] != 0)
                 for j in range(N)] for i in range(N)]
        row = [coef[i][j] for i in range(N) for j in range(N)] + [-Fraction(b)]
        rows.append(_integral(row))
    return [r for r in rows if any(r)]


def quad_to_real_mdp(sys: QuadSystem, gadget, cert=None, budget: int | None = None) -> RealInstance:
    """The real reduction: Y in C (x) C, Y = Y^T, k z = tr Y, Q_l(T Y T^T) = z b_l.

    ``cert`` defaults to ``certify_gadget(gadget)``; its rho and alpha give
    the claimed gap alpha / rho^2. The planted witness is (vec(y y^T), 1) for
    the lexicographically smallest y in ker(R) ∩ H_k with T y equal to the
    system's Boolean witness.
    """
    from .gadget import boolean_slice_kernel, certify_gadget

    if not sys.is_real:
        raise ReductionError("the real reduction needs a system over the reals")
    R = np.array(gadget.R.tolist(), dtype=np.int64)
    T = np.array(gadget.T.tolist(), dtype=np.int64)
    n = sys.n_vars
    if T.shape[0] < n:
        raise ReductionError(f"gadget covers {T.shape[0]} variables, system has {n}")
    T = T[:n]
    N = R.shape[1]
    if (N * N + 1) > AMBIENT_CAP:
        raise ReductionError("ambient dimension exceeds the cap")
    if cert is None:
        cert = certify_gadget(gadget, budget=budget)
    if cert.rho is None or cert.alpha is None:
        raise ReductionError("gadget certificate is incomplete")
    k = gadget.k
    M = MatZ(_real_constraints(sys, R, T, k), shape=(0, N * N + 1))

    planted = None
    if sys.witness is not None:
        x = tuple(int(v) for v in sys.witness)
        lifts = [y for y in boolean_slice_kernel(gadget.R, k, budget=budget)
                 if tuple(int(v) for v in T @ np.array(y)) == x]
        if lifts:
            y = np.array(min(lifts), dtype=np.int64)
            planted = tuple(int(v) for v in np.outer(y, y).reshape(-1)) + (1,)

    prov = _provenance(sys.source, gadget_seed=gadget.params.get("seed"), epsilon=gadget.params.get("epsilon"),
                       tensor_t=1, system_hash=sys.digest(), gadget=gadget.name)
    return RealInstance(M, k * k + 1, Fraction(cert.alpha) / Fraction(cert.rho) ** 2, planted,
                        {"name": gadget.name, "k": k, "N": N, "rho": _frac_str(cert.rho),
                         "alpha": _frac_str(cert.alpha)}, prov)


# -- tensoring and lattices ----------------------------------------------------------------

def _kron_vec(a, b) -> tuple[int, ...]:
    return tuple(int(x) * int(y) for x in a for y in b)


def tensor_instance(inst, t: int = 2, budget: int | None = None):
    """Replace V by V^(x)t; s, claimed_gap and the planted witness are powered alongside."""
    if t < 1:
        raise ReductionError("tensor exponent must be at least 1")
    if t == 1:
        return inst
    prov = dict(inst.provenance)
    prov["tensor_t"] = prov.get("tensor_t", 1) * t
    if isinstance(inst, MdpInstance):
        L = inst.length ** t
        if L > AMBIENT_CAP:
            raise ReductionError(f"ambient dimension {L} exceeds the cap")
        check_budget("tensor basis", L * inst.dim ** t, budget)
        B = inst.basis
        for _ in range(t - 1):
            B = kronecker(B, inst.basis)
        planted = inst.planted
        if planted is not None:
            for _ in range(t - 1):
                planted = _kron_vec(planted, inst.planted)
        return MdpInstance(B, inst.s ** t, inst.claimed_gap ** t, planted, inst.distinguished, prov)
    if isinstance(inst, RealInstance):
        L = inst.length ** t
        if L > AMBIENT_CAP:
            raise ReductionError(f"ambient dimension {L} exceeds the cap")
        M = inst.M
        cur = M
        n = M.cols
        for step in range(t - 1):
            # ker(A) (x) ker(M) = ker(A (x) I) ∩ ker(I (x) M)
            m_left = cur.cols
            I_right = MatZ(np.eye(n, dtype=np.int64).tolist())
            I_left = MatZ(np.eye(m_left, dtype=np.int64).tolist())
            top = kronecker(cur, I_right)
            bottom = kronecker(I_left, M)
            cur = MatZ(top.tolist() + bottom.tolist(), shape=(0, m_left * n))
        planted = inst.planted
        if planted is not None:
            for _ in range(t - 1):
                planted = _kron_vec(planted, inst.planted)
        return RealInstance(cur, inst.s ** t, inst.claimed_gap ** t, planted, inst.gadget, prov)
    raise TypeError(f"cannot tensor a {type(inst).__name__}")


def real_to_svp(inst: RealInstance, p: int = 2) -> SvpInstance:
    """L = ker(M) ∩ Z^n with an HNF basis; for p > 0 the norm gap is claimed_gap^(1/p)."""
    if p < 0:
        raise ReductionError("norm exponent must be non-negative")
    B = hnf_integer_kernel(inst.M)
    prov = dict(inst.provenance)
    prov["parent"] = digest(inst.to_dict())
    return SvpInstance(B, inst.s, p, inst.claimed_gap, inst.planted, prov)


def planted_in_subspace(inst) -> tuple[bool, list]:
    """Check the planted vector against the instance; returns (ok, residual)."""
    if inst.planted is None:
        return False, []
    x = list(inst.planted)
    if isinstance(inst, RealInstance):
        res = [sum(int(a) * v for a, v in zip(row, x)) for row in inst.M.tolist()]
        return not any(res), res
    if isinstance(inst, SvpInstance):
        B = inst.lattice_basis
        from .matrix import solve
        sol = solve(B.to_q(), [Fraction(v) for v in x])
        ok = sol is not None and all(Fraction(c).denominator == 1 for c in sol)
        return ok, [] if ok else x
    if isinstance(inst, NcpInstance):
        F = inst.field
        diff = [F.sub(a, o) for a, o in zip(x, inst.offset)]
        B = inst.basis
    else:
        F, diff, B = inst.field, x, inst.basis
    aug = MatFq(F, np.column_stack([B.data, np.array(diff, dtype=np.int64)])) if B.cols else None
    if aug is None:
        ok = not any(diff)
        return ok, diff
    ok = rank(aug) == rank(B)
    return ok, [] if ok else diff


def with_planted(inst, planted):
    """Copy of an instance with a replaced planted vector (used to build tampered inputs)."""
    return replace(inst, planted=tuple(int(v) for v in planted))
