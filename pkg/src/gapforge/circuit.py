"""Boolean circuits and their encoding as systems of quadratic equations.

Circuit text format, one gate per line (``/`` also separates gates)::

    in g1
    not g2 g1
    and g3 g1 g2
    or g4 g2 g3
    out g3

Every gate, inputs included, becomes a variable x_i; a final variable z plays
the role of the constant 1. The equations are, in order: Booleanity
``x_i (x_i - z) = 0`` for every gate, one equation per logic gate, and
``z^2 = x_out^2`` for the output.
"""

from __future__ import annotations

import hashlib
import itertools
import re
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .budget import check_budget
from .field import QQ, REAL, FieldSpec

GATE_KINDS = ("INPUT", "AND", "OR", "NOT")
_ARITY = {"in": 0, "and": 2, "or": 2, "not": 1}


class CircuitSyntaxError(ValueError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class Gate:
    kind: str
    inputs: tuple[int, ...] = ()
    name: str = ""


@dataclass(frozen=True)
class Circuit:
    gates: tuple[Gate, ...]
    output: int

    def __post_init__(self):
        for i, g in enumerate(self.gates):
            if g.kind not in GATE_KINDS:
                raise ValueError(f"unknown gate kind {g.kind}")
            if len(g.inputs) > 2:
                raise ValueError("fan-in exceeds two")
            if any(not 0 <= j < i for j in g.inputs):
                raise ValueError(f"gate {i} refers to a later or missing gate")
        if not 0 <= self.output < len(self.gates):
            raise ValueError("output gate index out of range")

    @property
    def n_inputs(self) -> int:
        return sum(g.kind == "INPUT" for g in self.gates)

    @property
    def input_gates(self) -> list[int]:
        return [i for i, g in enumerate(self.gates) if g.kind == "INPUT"]

    def to_text(self) -> str:
        names = [g.name or f"g{i + 1}" for i, g in enumerate(self.gates)]
        lines = []
        for g, name in zip(self.gates, names):
            args = " ".join(names[j] for j in g.inputs)
            kw = "in" if g.kind == "INPUT" else g.kind.lower()
            lines.append(f"{kw} {name} {args}".rstrip())
        lines.append(f"out {names[self.output]}")
        return "\n".join(lines) + "\n"

    def digest(self) -> str:
        return hashlib.sha256(self.to_text().encode()).hexdigest()


def parse_circuit(text: str) -> Circuit:
    ids: dict[str, int] = {}
    gates: list[Gate] = []
    output = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        for stmt in raw.split("/"):
            stmt = stmt.split("#", 1)[0].strip()
            if not stmt:
                continue
            words = stmt.split()
            kw = words[0].lower()
            if kw == "out":
                if len(words) != 2:
                    raise CircuitSyntaxError("'out' takes exactly one gate id", lineno)
                if words[1] not in ids:
                    raise CircuitSyntaxError(f"undefined gate {words[1]!r}", lineno)
                if output is not None:
                    raise CircuitSyntaxError("output declared twice", lineno)
                output = ids[words[1]]
                continue
            if kw not in _ARITY:
                raise CircuitSyntaxError(f"unknown gate keyword {words[0]!r}", lineno)
            if len(words) < 2 or not re.fullmatch(r"[A-Za-z_][\w.]*", words[1]):
                raise CircuitSyntaxError("missing or malformed gate id", lineno)
            name, args = words[1], words[2:]
            if len(args) != _ARITY[kw]:
                if len(args) > 2:
                    raise CircuitSyntaxError(f"fan-in {len(args)} exceeds two", lineno)
                raise CircuitSyntaxError(f"'{kw}' expects {_ARITY[kw]} inputs, got {len(args)}", lineno)
            if name in ids:
                raise CircuitSyntaxError(f"gate {name!r} defined twice", lineno)
            refs = []
            for a in args:
                if a == name:
                    raise CircuitSyntaxError(f"gate {name!r} refers to itself (cycle)", lineno)
                if a not in ids:
                    raise CircuitSyntaxError(f"undefined gate {a!r}", lineno)
                refs.append(ids[a])
            kind = "INPUT" if kw == "in" else kw.upper()
            ids[name] = len(gates)
            gates.append(Gate(kind, tuple(refs), name))
    if output is None:
        raise CircuitSyntaxError("no output gate declared", max(1, len(text.splitlines())))
    return Circuit(tuple(gates), output)


def gate_values(c: Circuit, assignment) -> list[int]:
    assignment = [int(bool(a)) for a in assignment]
    if len(assignment) != c.n_inputs:
        raise ValueError(f"expected {c.n_inputs} input bits, got {len(assignment)}")
    vals: list[int] = []
    it = iter(assignment)
    for g in c.gates:
        if g.kind == "INPUT":
            vals.append(next(it))
        elif g.kind == "AND":
            vals.append(vals[g.inputs[0]] & vals[g.inputs[1]])
        elif g.kind == "OR":
            vals.append(vals[g.inputs[0]] | vals[g.inputs[1]])
        else:
            vals.append(1 - vals[g.inputs[0]])
    return vals


def eval_circuit(c: Circuit, assignment) -> int:
    return gate_values(c, assignment)[c.output]


def find_satisfying_assignment(c: Circuit, budget: int | None = None):
    """Lexicographically first satisfying input assignment, or None."""
    check_budget("circuit assignments", 2 ** c.n_inputs, budget)
    for bits in itertools.product((0, 1), repeat=c.n_inputs):
        if eval_circuit(c, bits):
            return list(bits)
    return None


# -- quadratic systems ---------------------------------------------------------------

@dataclass(frozen=True)
class QuadSystem:
    """Equations Q_l(x x^T) = b_l over a finite field or over R (exact rationals).

    Over F_q the Q_l hold field-element indices; over R they hold Fractions.
    In odd characteristic and over R each Q_l is symmetric (cross terms
    halved); in characteristic 2 it is upper triangular, which evaluates to
    the same Q_l(X) on symmetric X.
    """

    field: object
    n_vars: int
    equations: tuple[tuple[np.ndarray, object], ...]
    homogeneous: bool
    distinguished: int | None = None
    witness: tuple[int, ...] | None = None
    source: str = ""

    def __post_init__(self):
        for Q, b in self.equations:
            if Q.shape != (self.n_vars, self.n_vars):
                raise ValueError("coefficient matrix has the wrong shape")
        if self.homogeneous and any(not self.dom.is_zero(b) for _, b in self.equations):
            raise ValueError("homogeneous flag set but some right-hand side is nonzero")

    @property
    def is_real(self) -> bool:
        return self.field is REAL

    @property
    def dom(self):
        return self.field

    @property
    def m(self) -> int:
        return len(self.equations)

    def to_dict(self) -> dict:
        dom = self.dom
        fd = "real" if self.is_real else self.field.to_dict()
        d = {
            "field": fd, "n_vars": self.n_vars, "homogeneous": self.homogeneous,
            "equations": [
                {"Q": [[dom.render(x) for x in row] for row in Q], "b": dom.render(b)}
                for Q, b in self.equations
            ],
            "distinguished": self.distinguished,
        }
        if self.witness is not None:
            d["witness"] = list(self.witness)
        if self.source:
            d["source"] = self.source
        return d

    @staticmethod
    def from_dict(d: dict) -> "QuadSystem":
        F = REAL if d["field"] == "real" else FieldSpec.from_dict(d["field"])
        n = int(d["n_vars"])
        eqs = []
        for e in d["equations"]:
            if F is REAL:
                Q = np.empty((n, n), dtype=object)
                for i, row in enumerate(e["Q"]):
                    Q[i, :] = [QQ.parse(x) for x in row]
                b = QQ.parse(e["b"])
            else:
                Q = np.array([[F.parse(x) for x in row] for row in e["Q"]], dtype=np.int64).reshape(n, n)
                b = F.parse(e["b"])
            eqs.append((Q, b))
        w = d.get("witness")
        return QuadSystem(F, n, tuple(eqs), bool(d["homogeneous"]), d.get("distinguished"),
                          tuple(int(v) for v in w) if w is not None else None, d.get("source", ""))

    def digest(self) -> str:
        import json
        return hashlib.sha256(json.dumps(self.to_dict(), sort_keys=True).encode()).hexdigest()


def system_from_polynomials(field, n_vars: int, polys, rhs=None, homogeneous=None, **kw) -> QuadSystem:
    """Build a system from sparse quadratic forms ``{(i, j): coeff}`` with i <= j."""
    rhs = list(rhs) if rhs is not None else [0] * len(polys)
    eqs = []
    dom = field
    for poly, b in zip(polys, rhs):
        Q = _form_matrix(dom, n_vars, poly)
        eqs.append((Q, dom.from_int(b) if isinstance(b, int) else Fraction(b) if dom is REAL else b))
    if homogeneous is None:
        homogeneous = all(dom.is_zero(b) for _, b in eqs)
    return QuadSystem(field, n_vars, tuple(eqs), homogeneous, **kw)


def _form_matrix(dom, n: int, poly: dict) -> np.ndarray:
    """Coefficient matrix of sum c_ij x_i x_j, following the storage convention."""
    if dom is REAL:
        Q = np.full((n, n), Fraction(0), dtype=object)
    else:
        Q = np.zeros((n, n), dtype=np.int64)
    char2 = dom is not REAL and dom.p == 2
    for (i, j), c in poly.items():
        i, j = min(i, j), max(i, j)
        c = Fraction(c) if dom is REAL else dom.from_int(c) if isinstance(c, int) else c
        if i == j or char2:
            Q[i, j] = dom.add(Q[i, j], c)
        else:
            half = dom.div(c, dom.from_int(2)) if dom is not REAL else c / 2
            Q[i, j] = dom.add(Q[i, j], half)
            Q[j, i] = dom.add(Q[j, i], half)
    return Q


def circuit_to_quad(c: Circuit, field, homogeneous: bool = True, assignment=None) -> QuadSystem:
    """Encode circuit satisfiability as a quadratic system over ``field``.

    Variables are the gates in order followed by z. In non-homogeneous mode the
    same equations are kept and ``z^2 = 1`` is appended, so every real or F_q
    solution has z = +-1 and can be sign-normalised to z = 1. When a
    satisfying ``assignment`` is given its Boolean lift (gate values, z = 1)
    is attached as the witness.
    """
    n = len(c.gates)
    z = n
    polys: list[dict] = []
    for i in range(n):
        polys.append({(i, i): 1, (i, z): -1})
    for k, g in enumerate(c.gates):
        if g.kind == "AND":
            i, j = g.inputs
            poly = {(k, k): 1}
            key = (min(i, j), max(i, j))
            poly[key] = poly.get(key, 0) - 1
            polys.append(poly)
        elif g.kind == "OR":
            # z^2 - x_k^2 = (z - x_i)(z - x_j)  <=>  x_k^2 - z x_i - z x_j + x_i x_j = 0
            i, j = g.inputs
            poly: dict = {(k, k): 1}
            for key, val in (((i, z), -1), ((j, z), -1), ((min(i, j), max(i, j)), 1)):
                poly[key] = poly.get(key, 0) + val
            polys.append(poly)
        elif g.kind == "NOT":
            (i,) = g.inputs
            polys.append({(z, z): 1, (k, k): -1, (i, i): -1})
    polys.append({(z, z): 1, (c.output, c.output): -1})
    rhs = [0] * len(polys)
    if not homogeneous:
        polys.append({(z, z): 1})
        rhs.append(1)
    witness = None
    if assignment is not None and eval_circuit(c, assignment):
        witness = tuple(gate_values(c, assignment)) + (1,)
    return system_from_polynomials(
        field, n + 1, polys, rhs, homogeneous=homogeneous,
        distinguished=z if homogeneous else None, witness=witness, source=c.digest(),
    )


def quad_eval(sys: QuadSystem, x) -> list:
    """Residuals Q_l(x x^T) - b_l."""
    x = list(x)
    if len(x) != sys.n_vars:
        raise ValueError(f"expected {sys.n_vars} values, got {len(x)}")
    dom = sys.dom
    out = []
    if sys.is_real:
        xs = [Fraction(v) for v in x]
        for Q, b in sys.equations:
            acc = sum((Q[i, j] * xs[i] * xs[j] for i in range(sys.n_vars) for j in range(sys.n_vars)
                       if Q[i, j] != 0), start=Fraction(0))
            out.append(acc - b)
        return out
    xs = [dom.from_int(v) if dom.is_prime_field else int(v) for v in x]
    for Q, b in sys.equations:
        acc = 0
        for i in range(sys.n_vars):
            for j in range(sys.n_vars):
                if Q[i, j]:
                    acc = dom.add(acc, dom.mul(int(Q[i, j]), dom.mul(xs[i], xs[j])))
        out.append(dom.sub(acc, int(b)))
    return out


def with_witness(sys: QuadSystem, witness) -> QuadSystem:
    """Attach a witness after checking that it satisfies every equation."""
    if any(not sys.dom.is_zero(r) for r in quad_eval(sys, witness)):
        raise ValueError("witness does not satisfy the system")
    return QuadSystem(sys.field, sys.n_vars, sys.equations, sys.homogeneous,
                      sys.distinguished, tuple(int(v) for v in witness), sys.source)
