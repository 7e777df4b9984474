"""Dense linear algebra used by the solver phases.

The systems are small (at most (N-1) x (N-1), N ~ 50) and solved many
times with fixed left sides, so each matrix is LU-factored once and its
2-norm condition number (SVD singular-value ratio) recorded as the
stability diagnostic.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

from .errors import LinearSolveError

# Beyond this 2-norm condition number a double-precision solve is not trusted.
COND_LIMIT = 1e12
RESIDUAL_TOL = 1e-10


def condition_number_2norm(A) -> float:
    """Ratio of largest to smallest singular value (inf if singular)."""
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"condition number needs a square matrix, got {A.shape}")
    s = np.linalg.svd(A, compute_uv=False)
    if s[-1] == 0.0:
        return float("inf")
    return float(s[0] / s[-1])


def solve_dense(A, b) -> np.ndarray:
    """Solve A x = b with partial pivoting and verify the residual.

    Raises :class:`LinearSolveError` (condition estimate attached) when A
    is singular, ill-conditioned beyond ``COND_LIMIT``, or the residual
    exceeds ``RESIDUAL_TOL`` * max(1, ||b||).
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"solve needs a square matrix, got {A.shape}")
    if not (np.all(np.isfinite(A)) and np.all(np.isfinite(b))):
        raise ValueError("non-finite entries in linear system")
    cond = condition_number_2norm(A)
    if not cond < COND_LIMIT:
        raise LinearSolveError(f"matrix condition {cond:.3e} beyond {COND_LIMIT:.0e}", cond)
    x = np.linalg.solve(A, b)
    res = np.linalg.norm(A @ x - b)
    if res > RESIDUAL_TOL * max(1.0, np.linalg.norm(b)):
        raise LinearSolveError(f"solve residual {res:.3e} too large", cond)
    return x


class FactoredSystem:
    """LU factorization reused across right-hand sides.

    Condition is checked once at construction; every solve verifies its
    residual against ``RESIDUAL_TOL`` * max(1, ||b||).
    """

    def __init__(self, A):
        A = np.asarray(A, dtype=float)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ValueError(f"square matrix required, got {A.shape}")
        if not np.all(np.isfinite(A)):
            raise ValueError("non-finite entries in matrix")
        self.A = A
        self.cond = condition_number_2norm(A)
        if not self.cond < COND_LIMIT:
            raise LinearSolveError(
                f"matrix condition {self.cond:.3e} beyond {COND_LIMIT:.0e}", self.cond
            )
        self._lu = scipy.linalg.lu_factor(A)

    def solve(self, b) -> np.ndarray:
        b = np.asarray(b, dtype=float)
        x = scipy.linalg.lu_solve(self._lu, b)
        res = np.linalg.norm(self.A @ x - b)
        if res > RESIDUAL_TOL * max(1.0, np.linalg.norm(b)):
            raise LinearSolveError(f"solve residual {res:.3e} too large", self.cond)
        return x
