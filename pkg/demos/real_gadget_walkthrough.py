"""The real pipeline on the 2 x 4 handcrafted gadget, then the lattice it induces.

Run from the repository root:  python demos/real_gadget_walkthrough.py
"""

# %%
from fractions import Fraction

import numpy as np

from gapforge.circuit import system_from_polynomials
from gapforge.field import REAL
from gapforge.gadget import boolean_slice_kernel, certify_gadget, handcrafted_gadget
from gapforge.oracle import quad_solve_bruteforce, sparsest_in_kernel_real, svp_norm_check
from gapforge.reduce import quad_to_real_mdp, real_to_svp

# %% R has two +-1 rows; its kernel is 2-dimensional and contains two Boolean weight-2 vectors
g = handcrafted_gadget()
print(np.array(g.R.tolist()))
print("weight-2 Boolean kernel vectors:", boolean_slice_kernel(g.R, 2))
cert = certify_gadget(g)
print("certificate:", {k: str(v) for k, v in cert.summary().items()})

# %% one-variable systems: x^2 = 1 has the Boolean root 1, x^2 = -1 has no real root at all
yes_sys = system_from_polynomials(REAL, 1, [{(0, 0): 1}], [1], witness=(1,))
no_sys = system_from_polynomials(REAL, 1, [{(0, 0): 1}], [-1])
print(quad_solve_bruteforce(yes_sys).status, "/", quad_solve_bruteforce(no_sys).note)

# %% the reduction: an integer matrix M whose kernel is the subspace V
yes = quad_to_real_mdp(yes_sys, g, cert)
no = quad_to_real_mdp(no_sys, g, cert)
print("M is", yes.M.rows, "x", yes.M.cols, "; s =", yes.s, "; claimed gap", yes.claimed_gap)

# %% exact support search: sparsest kernel vector of each side
y = sparsest_in_kernel_real(yes.M)
n = sparsest_in_kernel_real(no.M, bound=7)
print("YES sparsity", y.optimum, "witness", y.witness)
print("NO: nothing up to 7, floor", n.floor, "-> realised gap", Fraction(n.floor, y.optimum))

# %% the SVP view: V ∩ Z^N, basis in Hermite normal form
for p in (1, 2, 3):
    svp = real_to_svp(yes, p)
    print(f"p={p}: lattice rank {svp.lattice_basis.cols}, ||planted||_p^p = {svp_norm_check(svp, yes.planted)}")
