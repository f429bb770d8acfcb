"""Gap-producing reductions from circuit satisfiability to sparse-vector problems.

Subpackages mirror the pipeline: ``field`` and ``matrix`` for exact algebra,
``circuit`` for the quadratic encoding, ``codes`` and ``gadget`` for the
codes plugged into the reductions, ``reduce`` for the reductions themselves
and ``oracle`` for the brute-force checks.
"""

from .budget import BudgetExceeded
from .field import QQ, REAL, FieldSpec, Felem, make_field

__all__ = ["BudgetExceeded", "FieldSpec", "Felem", "QQ", "REAL", "make_field"]
__version__ = "0.1.0"
