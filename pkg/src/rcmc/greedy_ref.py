"""Baseline dense greedy steady-state selection and log-det marginal gains.

This is the ground-truth implementation the fast variants are tested
against: it keeps the full dense working matrix -K^(j), selects the largest
diagonal, and recomputes diagonals as negated off-diagonal column sums after
every elimination, so no like-sign subtraction ever occurs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import backend
from .cholesky import CholeskyFactor
from .errors import SingularPrefix
from .model import RateConstantMatrix, to_laplacian


@dataclass(frozen=True)
class GreedyResult:
    """Outcome of a steady-state selection run.

    ``pivot_diagonals[j]`` is the selected diagonal -K^(j-1)_ss (units 1/s);
    ``stop_diagonal`` is the first rejected value, or None when k = n.
    """

    k: int
    pivots: tuple[int, ...]
    pivot_diagonals: tuple[float, ...]
    stop_diagonal: float | None

    def __post_init__(self):
        assert len(self.pivots) == self.k == len(self.pivot_diagonals)


def _working_matrix(K: RateConstantMatrix) -> np.ndarray:
    """Dense W = -K with the diagonal recomputed from column sums."""
    L = to_laplacian(K)
    W = L.off_diag.toarray() / K.pi[np.newaxis, :]
    np.fill_diagonal(W, 0.0)
    np.fill_diagonal(W, -W.sum(axis=0))
    return W


def greedy_factored(
    K: RateConstantMatrix, t_max: float
) -> tuple[GreedyResult, CholeskyFactor]:
    """greedy() plus the partial Cholesky factor of L accumulated en route.

    Recording the factor column for each accepted pivot is O(n) against the
    O(n^2) elimination step, so it is always collected.
    """
    W = _working_matrix(K)
    thr = 1.0 / t_max
    k, pivots, diags, stop, C = backend.kernels().greedy_run(W, K.pi, thr)
    result = GreedyResult(
        k=int(k),
        pivots=tuple(int(s) for s in pivots),
        pivot_diagonals=tuple(float(v) for v in diags),
        stop_diagonal=stop,
    )
    factor = CholeskyFactor.from_columns(C, result.pivots)
    return result, factor


def greedy(K: RateConstantMatrix, t_max: float) -> GreedyResult:
    """Greedy selection: argmax -K^(j-1)_vv, stop below 1/t_max.

    Ties break to the smallest state index.  k = 0 is a legal outcome when
    every initial diagonal is already below threshold.
    """
    return greedy_factored(K, t_max)[0]


def marginal_gain_logdet(K: RateConstantMatrix, S, v: int) -> float:
    """log det(-K)_{S+v} - log det(-K)_S via explicit determinant ratios.

    Equals log(-K^(|S|)_vv) when S is a greedy prefix; -inf when the
    augmented minor is singular.  Raises SingularPrefix when det(-K)_SS
    itself vanishes.
    """
    S = list(S)
    negK = -K.dense()
    if S:
        sign, logdet = np.linalg.slogdet(negK[np.ix_(S, S)])
        if sign <= 0:
            raise SingularPrefix(f"det(-K)_SS vanishes for S = {S}")
        base = logdet
    else:
        base = 0.0
    Sv = S + [v]
    sign, logdet = np.linalg.slogdet(negK[np.ix_(Sv, Sv)])
    if sign == 0 or not np.isfinite(logdet):
        return -np.inf
    if sign < 0:
        raise SingularPrefix(f"det(-K) negative on {Sv}; input not a rate matrix")
    return float(logdet - base)
