"""Pivoted partial Cholesky factorizations and the fast greedy variant.

Two textbook routines with full pivoting and tolerance eps: Gaussian
elimination (keeps the dense Schur complement) and Doolittle's algorithm
(keeps only the diagonal vector and computes factor entries directly).
They produce identical pivots and entries; the fast greedy adaptation for
rate constant matrices pivots by d_v/pi_v and stops at 1/t_max.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import backend
from .errors import NegativeDiagonal
from .model import Laplacian, RateConstantMatrix, to_laplacian

_NEG_TOL = 1e-12  # relative to max|L|; beyond this the input is not PSD


@dataclass(frozen=True)
class CholeskyFactor:
    """Column-wise partial Cholesky factor under a pivot permutation.

    ``columns`` is (n, k) with column j the factor column of pivot j;
    entries in rows of earlier pivots are zero (lower-triangular under the
    permutation).  For Laplacian inputs every off-pivot entry is <= 0.
    """

    columns: np.ndarray
    pivots: tuple[int, ...]

    @classmethod
    def from_columns(cls, C: np.ndarray, pivots) -> "CholeskyFactor":
        return cls(columns=C, pivots=tuple(int(s) for s in pivots))

    @property
    def n(self) -> int:
        return self.columns.shape[0]

    @property
    def k(self) -> int:
        return len(self.pivots)

    @property
    def pivot_entries(self) -> np.ndarray:
        """C_{s^(j), j} for each accepted pivot (the sqrt-scale diagonals)."""
        return self.columns[list(self.pivots), np.arange(self.k)]

    def pivot_block(self, j: int | None = None) -> np.ndarray:
        """Lower-triangular j x j block G = C[S^(j), 1..j] in pivot order."""
        j = self.k if j is None else j
        return self.columns[list(self.pivots[:j]), :j]

    def reconstruct(self) -> np.ndarray:
        """C C^T (equals L on full completion of a PSD input)."""
        return self.columns @ self.columns.T


def _as_dense(L) -> np.ndarray:
    if isinstance(L, Laplacian):
        return L.dense()
    return np.array(L, dtype=np.float64)


def _stop(maxdiag: float, eps: float) -> bool:
    # eps == 0 additionally rejects exact zeros, matching rank semantics.
    return maxdiag < eps if eps > 0.0 else maxdiag <= 0.0


def gaussian_cholesky(L, eps: float) -> CholeskyFactor:
    """Pivoted Gaussian elimination maintaining the dense Schur complement.

    Reference implementation: Theta(n^2) memory, diagonal updated by the
    Schur formula.  Raises NegativeDiagonal when a remaining diagonal drops
    below -1e-12*max|L| (non-PSD input).
    """
    W = _as_dense(L)
    n = W.shape[0]
    neg_tol = _NEG_TOL * (float(np.abs(W).max()) if n else 0.0)
    alive = np.ones(n, dtype=bool)
    C = np.zeros((n, n), dtype=np.float64)
    pivots = []
    for j in range(n):
        d = np.where(alive, np.diagonal(W), -np.inf)
        worst = np.where(alive, np.diagonal(W), np.inf).min()
        if worst < -neg_tol:
            raise NegativeDiagonal(f"Schur diagonal {worst!r}; input not PSD")
        s = int(np.argmax(d))
        if _stop(W[s, s], eps):
            break
        pivots.append(s)
        csj = np.sqrt(W[s, s])
        alive[s] = False
        C[:, j] = np.where(alive, W[:, s] / csj, 0.0)
        C[s, j] = csj
        col = W[:, s].copy()
        W -= np.outer(col, col) / col[s]  # symmetric input: row_s == col_s
        W[s, :] = 0.0
        W[:, s] = 0.0
    k = len(pivots)
    return CholeskyFactor.from_columns(C[:, :k].copy(), pivots)


def doolittle_cholesky(L, eps: float) -> CholeskyFactor:
    """Pivoted Doolittle factorization; same output as gaussian_cholesky.

    Keeps only the diagonal vector d and computes each factor column from
    inner products against the settled columns.  Roundoff-negative
    diagonals are clamped to zero (sqrt must never see a negative).
    """
    stats = np.zeros(4, dtype=np.int64)
    k, pivots, _, _, C, _ = backend.kernels().doolittle_run(
        _as_dense(L), None, eps, stats
    )
    return CholeskyFactor.from_columns(C, pivots)


def fast_greedy(K: RateConstantMatrix, t_max: float):
    """Doolittle-based selection: pivot argmax d_v/pi_v, stop below 1/t_max.

    Produces the same pivot sequence as the dense greedy in exact
    arithmetic; the d update is the subtractive one, so this variant is the
    fast-but-unstable baseline.  Returns (GreedyResult, CholeskyFactor).
    """
    from .greedy_ref import GreedyResult  # deferred to avoid an import cycle

    L = to_laplacian(K)
    stats = np.zeros(4, dtype=np.int64)
    k, pivots, vals, stop, C, _ = backend.kernels().doolittle_run(
        L.dense(), K.pi, 1.0 / t_max, stats
    )
    result = GreedyResult(
        k=int(k),
        pivots=tuple(int(s) for s in pivots),
        pivot_diagonals=tuple(float(v) for v in vals),
        stop_diagonal=stop,
    )
    return result, CholeskyFactor.from_columns(C, result.pivots)
