"""Batch and recursive least-squares estimators.

Both solve the same overdetermined problem min ||A x - y||^2: `lse_batch`
in one shot through a numerically stable factorization, `rls_update` one
row at a time from an `RlsState` started at x = 0, S = gamma * I.  For a
full-rank system and large gamma the two agree to high precision, which
the test suite checks explicitly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SingularSystemError

DEFAULT_GAMMA = 1e6

# singular values below RCOND * sigma_max count as zero: cond(A) beyond 1e8
# means the normal-equations Gramian A^T A is singular in double precision
RCOND = 1e-8


def lse_batch(a, y) -> np.ndarray:
    """Minimizer of ||A x - y||^2 for a tall dense system.

    Backed by a stable factorization (no explicit normal-equations
    inverse).  Raises SingularSystemError when A is numerically rank
    deficient; callers may fall back to the recursive estimator, whose
    gamma*I start regularizes the problem.
    """
    a = np.asarray(a, dtype=float)
    y = np.asarray(y, dtype=float).ravel()
    if a.ndim != 2:
        raise ValueError("a must be a 2-D matrix")
    rows, cols = a.shape
    if rows < cols:
        raise ValueError(f"need rows >= cols, got {rows}x{cols}")
    if y.shape[0] != rows:
        raise ValueError(f"y must have length {rows}, got {y.shape[0]}")
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(y))):
        raise ValueError("system entries must be finite")
    x, _, rank, _ = np.linalg.lstsq(a, y, rcond=RCOND)
    if rank < cols:
        raise SingularSystemError(f"system is rank deficient (rank {rank} < {cols})")
    return x


@dataclass(frozen=True)
class RlsState:
    """Running state of the recursive estimator.

    `estimate` is the current solution, `covariance` the gamma-scaled
    inverse-Gramian proxy.  The covariance is re-symmetrised after every
    update so round-off cannot accumulate into asymmetry.
    """

    estimate: np.ndarray
    covariance: np.ndarray
    gamma: float

    @property
    def dim(self) -> int:
        return self.estimate.shape[0]


def rls_init(dim: int, gamma: float = DEFAULT_GAMMA) -> RlsState:
    """Fresh state: zero estimate, gamma * identity covariance."""
    if dim < 1:
        raise ValueError(f"dim must be >= 1, got {dim}")
    if gamma <= 0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    return RlsState(np.zeros(dim), float(gamma) * np.eye(dim), float(gamma))


def rls_update(state: RlsState, a_row, y: float) -> RlsState:
    """One recursive least-squares step for the observation (a_row, y)."""
    a = np.asarray(a_row, dtype=float).ravel()
    if a.shape[0] != state.dim:
        raise ValueError(f"row length {a.shape[0]} != state dimension {state.dim}")
    if not (np.all(np.isfinite(a)) and np.isfinite(y)):
        raise ValueError("observation must be finite")
    s_a = state.covariance @ a
    gain = s_a / (1.0 + a @ s_a)
    estimate = state.estimate + gain * (float(y) - a @ state.estimate)
    cov = state.covariance - np.outer(gain, s_a)
    cov = 0.5 * (cov + cov.T)
    return RlsState(estimate, cov, state.gamma)


def rls_solve(a, y, gamma: float = DEFAULT_GAMMA) -> np.ndarray:
    """Run the recursive estimator over every row of a system."""
    a = np.asarray(a, dtype=float)
    y = np.asarray(y, dtype=float).ravel()
    state = rls_init(a.shape[1], gamma)
    for row, target in zip(a, y):
        state = rls_update(state, row, target)
    return state.estimate
