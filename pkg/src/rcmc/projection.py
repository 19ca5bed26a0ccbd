"""Reference times and approximate yield vectors from a selection run.

For each settled prefix S = S^(j) the population is projected through the
quasi-steady-state block formula: with A = -K_SS^{-1} K_ST, B = -K_TS
K_SS^{-1}, and U the reciprocal of Diag(1^T + 1^T K_TS K_SS^{-2} K_ST),

    q_T = U (B p_S + p_T),   q_S = A q_T,   t^(j) = 1 / (-K^(j-1)_ss).

All blocks are assembled in their entrywise-nonnegative forms (triangular
solves against the Cholesky factor of L_SS), so mass stays nonnegative and
conserved: the reciprocal diagonal U is exactly what makes 1^T q = 1^T p.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.linalg import solve_triangular
from scipy.sparse.csgraph import connected_components

from .cholesky import CholeskyFactor
from .errors import IncompatibleFactor, DisconnectedNetwork
from .greedy_ref import GreedyResult
from .model import RateConstantMatrix, YieldVector


@dataclass(frozen=True)
class Trajectory:
    """Sequence of (j, t^(j), q^(j)) entries from the projection step."""

    mode: str  # "full" | "last"
    entries: tuple[tuple[int, float, YieldVector], ...]

    def times(self) -> np.ndarray:
        return np.array([t for _, t, _ in self.entries])


def project(
    K: RateConstantMatrix,
    result: GreedyResult,
    factor: CholeskyFactor,
    p: YieldVector,
    mode: str = "full",
) -> tuple[Trajectory, list[float]]:
    """Project the initial populations through every settled prefix.

    ``mode="full"`` emits one entry per j = 1..k (recording per-entry wall
    times tau_j); ``mode="last"`` emits only j = k, computed by the same
    code path so it matches the final full-mode entry bitwise.  Returns
    (trajectory, tau list).  Raises IncompatibleFactor when the factor's
    pivot order disagrees with the result.
    """
    if mode not in ("full", "last"):
        raise ValueError(f"mode must be 'full' or 'last', got {mode!r}")
    if tuple(factor.pivots[: result.k]) != result.pivots:
        raise IncompatibleFactor("factor pivot order disagrees with greedy result")
    k = result.k
    n = K.n
    piv = np.fromiter(result.pivots, dtype=np.int64, count=k)
    Koff = K.off_diag.tocsc()
    pi = K.pi
    px = np.asarray(p.x, dtype=np.float64)
    if px.shape != (n,):
        raise ValueError(f"p has length {px.shape}, expected {n}")

    entries = []
    taus: list[float] = []
    js = range(1, k + 1) if mode == "full" else ([k] if k else [])
    for j in js:
        t0 = time.perf_counter()
        S = piv[:j]
        mask = np.ones(n, dtype=bool)
        mask[S] = False
        T = np.flatnonzero(mask)
        G = factor.columns[S[:, None], np.arange(j)[None, :]]  # lower tri, pivot order
        K_TS = Koff[T][:, S]
        K_ST = Koff[S][:, T]
        pS = px[S]
        pT = px[T]
        piS = pi[S]

        # y = B p_S = K_TS (Pi_S G^{-T} G^{-1} p_S), entrywise >= 0
        a = solve_triangular(G, pS, lower=True)
        a = solve_triangular(G, a, lower=True, trans="T")
        y = K_TS @ (piS * a)

        # U^{-1} diagonal: w = 1 + K_ST^T ((-K_SS)^T)^{-2} (K_TS^T 1)
        r = np.asarray(K_TS.sum(axis=0)).ravel()
        v = solve_triangular(G, piS * r, lower=True)
        v = solve_triangular(G, v, lower=True, trans="T")
        v = solve_triangular(G, piS * v, lower=True)
        v = solve_triangular(G, v, lower=True, trans="T")
        w = 1.0 + (K_ST.T @ v)

        qT = (y + pT) / w
        tmp = solve_triangular(G, K_ST @ qT, lower=True)
        qS = piS * solve_triangular(G, tmp, lower=True, trans="T")

        q = np.zeros(n, dtype=np.float64)
        q[S] = qS
        q[T] = qT
        t_j = 1.0 / result.pivot_diagonals[j - 1]
        entries.append((j, float(t_j), YieldVector(q)))
        taus.append(time.perf_counter() - t0)
    return Trajectory(mode=mode, entries=tuple(entries)), taus


def stationary_limit(K: RateConstantMatrix, p: YieldVector) -> YieldVector:
    """The t -> infinity limit: pi rescaled to the total mass of p.

    Requires a connected network; otherwise the limit is component-wise and
    DisconnectedNetwork reports the components.
    """
    pattern = K.off_diag + K.off_diag.T
    ncomp, labels = connected_components(pattern, directed=False)
    if ncomp > 1:
        comps = [list(np.flatnonzero(labels == c)) for c in range(ncomp)]
        raise DisconnectedNetwork(comps)
    return YieldVector(K.pi * (p.total / K.pi.sum()))
