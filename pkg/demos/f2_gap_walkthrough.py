"""Walk through the F_2 pipeline: circuit -> quadratic system -> tensor-code subspace.

Run from the repository root:  python demos/f2_gap_walkthrough.py
"""

# %%
from fractions import Fraction

from gapforge.circuit import circuit_to_quad, find_satisfying_assignment, parse_circuit
from gapforge.codes import d2_exhaustive, hadamard_code, min_distance_exhaustive
from gapforge.field import make_field
from gapforge.oracle import quad_solve_bruteforce, sparsest_codeword_fq
from gapforge.reduce import quad_to_mdp, tensor_instance

F2 = make_field(2)

# %% two tiny circuits: a passthrough (satisfiable) and x AND NOT x (never true)
yes_circ = parse_circuit("in g1 / out g1")
no_circ = parse_circuit("in g1 / not g2 g1 / and g3 g1 g2 / out g3")
print("passthrough witness:", find_satisfying_assignment(yes_circ))
print("x and not x witness:", find_satisfying_assignment(no_circ))

# %% each gate becomes a quadratic equation; z is the homogenising variable
yes_sys = circuit_to_quad(yes_circ, F2, assignment=[1])
no_sys = circuit_to_quad(no_circ, F2)
print(yes_sys.n_vars, "vars,", len(yes_sys.equations), "equations ->", quad_solve_bruteforce(yes_sys).status)
print(no_sys.n_vars, "vars,", len(no_sys.equations), "equations ->", quad_solve_bruteforce(no_sys).status)

# %% the code: Hadamard over F_2 with m = 4 has d = 8 and d2 = 12 = (3/2) d
H = hadamard_code(F2, 4)
print("Hadamard(F2,4): N =", H.N, " d =", min_distance_exhaustive(H).d, " d2 =", d2_exhaustive(H).d2)

# %% V = { G X G^T : X symmetric, X solves the linearised system }
yes = quad_to_mdp(yes_sys, H)
no = quad_to_mdp(no_sys, H)
print("YES: dim V =", yes.dim, " s =", yes.s, " planted weight =", sum(yes.planted))
print("NO:  dim V =", no.dim)

# %% brute force both sides; the quotient is the realised gap
y = sparsest_codeword_fq(yes)
n = sparsest_codeword_fq(no)
print("YES optimum", y.optimum, "| NO optimum", n.optimum,
      "| realised gap", Fraction(n.optimum, yes.s), "| claimed", yes.claimed_gap)

# %% tensoring squares everything (the NO side takes about a minute at t = 2, so we stay at the YES side)
yes2 = tensor_instance(yes, 2)
print("t=2: s =", yes2.s, " planted Boolean:", set(yes2.planted) <= {0, 1},
      " oracle:", sparsest_codeword_fq(yes2).optimum)
