"""Lazy fast greedy selection: stale upper bounds in a max-heap.

The priority queue holds exponentiated marginal-gain bounds rho_v =
d_v^(b_v)/pi_v; submodularity makes every stored key an upper bound on the
current value, so a popped candidate whose refreshed key still tops the
queue is the true argmax.  The diagonal refresh here is the subtractive
d - sum C_ul^2, which is fast but cancellation-prone; the stable variants
replace exactly that step.
"""

from __future__ import annotations

import heapq

import numpy as np

from . import backend
from .cholesky import CholeskyFactor
from .counters import InstrumentationCounters
from .model import Laplacian, RateConstantMatrix, to_laplacian


class _Workspace:
    """Grow-on-demand factor storage plus a dense scatter row of L."""

    def __init__(self, L: Laplacian):
        self.L = L
        n = L.n
        self.C = np.zeros((n, min(n, 128) or 1), dtype=np.float64)
        self.pivots = np.zeros(n, dtype=np.int64)
        self.lrow = np.zeros(n, dtype=np.float64)

    def ensure_columns(self, cols: int) -> None:
        n, width = self.C.shape
        if cols > width:
            grown = np.zeros((n, min(n, max(2 * width, cols))), dtype=np.float64)
            grown[:, :width] = self.C
            self.C = grown

    def scatter_row(self, u: int) -> np.ndarray:
        self.lrow[:] = 0.0
        idx, vals = self.L.column(u)  # symmetric: column u == row u
        self.lrow[idx] = vals
        return self.lrow


class _UnstableRefresher:
    """The plain lazy refresh: complete the factor row, subtract squares."""

    def __init__(self, ws: _Workspace, counters: InstrumentationCounters, dsnap):
        self.ws = ws
        self.counters = counters
        self.dsnap = dsnap
        self.kern = backend.kernels()

    def initial_d(self) -> np.ndarray:
        return self.ws.L.diag.copy()

    def refresh(self, u: int, b_old: int, jm1: int) -> float:
        ws = self.ws
        ws.ensure_columns(max(jm1, 1))
        lrow = ws.scatter_row(u)
        sumsq, moff = self.kern.complete_row(ws.C, u, b_old, jm1, ws.pivots, lrow)
        self.counters.m_offdiag += int(moff)
        d = self.dsnap[u] - sumsq  # the known-unstable like-sign subtraction
        if d < 0.0:
            self.counters.clamp_events += 1
            d = 0.0
        return float(d)

    def on_accept(self, u: int, col: int, csj: float) -> None:
        pass


def run_lazy_loop(K: RateConstantMatrix, t_max: float, make_refresher):
    """Shared heap-managed selection loop (the lazy greedy skeleton).

    ``make_refresher(ws, counters, dsnap)`` supplies the diagonal refresh
    strategy.  Counting rules keep every counter identity exact: each valid
    pop that performs a refresh is one round of c_j; a re-popped candidate
    whose refresh is already current (b_u = j-1) is accepted directly and
    charged to its earlier round.
    """
    if not (t_max > 0.0 and np.isfinite(t_max)):
        raise ValueError(f"t_max must be positive and finite, got {t_max!r}")
    L = to_laplacian(K)
    n, pi = K.n, K.pi
    thr = 1.0 / t_max

    counters = InstrumentationCounters(n=n)
    ws = _Workspace(L)
    dsnap = np.zeros(n, dtype=np.float64)
    refresher = make_refresher(ws, counters, dsnap)
    dsnap[:] = refresher.initial_d()

    b = np.zeros(n, dtype=np.int64)
    version = np.zeros(n, dtype=np.int64)
    heap = [(-dsnap[v] / pi[v], v, 0) for v in range(n)]
    heapq.heapify(heap)

    c_counts: list[int] = []
    pivots_list: list[int] = []
    diags_k: list[float] = []
    stop_diag: float | None = None
    j = 1

    def valid_top():
        while heap and heap[0][2] != version[heap[0][1]]:
            heapq.heappop(heap)
        return heap[0] if heap else None

    def accept(u: int, rho: float) -> None:
        nonlocal j
        pivots_list.append(u)
        diags_k.append(rho)
        csj = float(np.sqrt(dsnap[u]))
        ws.ensure_columns(j)
        ws.C[u, j - 1] = csj
        ws.pivots[j - 1] = u
        refresher.on_accept(u, j - 1, csj)
        version[u] += 1  # retire any queue entry
        j += 1

    while True:
        if valid_top() is None:
            break  # every state accepted: k = n
        neg_rho, u, _ = heapq.heappop(heap)
        jm1 = j - 1
        if b[u] == jm1 and j > 1:
            # Refresh already current for this iteration: direct acceptance,
            # charged to the round that performed the refresh.
            rho = -neg_rho
            if rho < thr:
                stop_diag = rho
                break
            accept(u, rho)
            continue
        while len(c_counts) < j:
            c_counts.append(0)
        c_counts[j - 1] += 1
        dL = refresher.refresh(u, int(b[u]), jm1)
        dsnap[u] = dL
        b[u] = jm1
        rho = dL / pi[u]
        nxt = valid_top()
        if nxt is None or (rho, -u) >= (-nxt[0], -nxt[1]):
            if rho < thr:
                stop_diag = rho
                break
            accept(u, rho)
        else:
            version[u] += 1
            heapq.heappush(heap, (-rho, u, int(version[u])))

    k = j - 1
    counters.k = k
    counters.c = c_counts
    counters.b = [int(x) for x in b]
    from .greedy_ref import GreedyResult  # local import; greedy_ref needs cholesky

    result = GreedyResult(
        k=k,
        pivots=tuple(pivots_list),
        pivot_diagonals=tuple(diags_k),
        stop_diagonal=stop_diag,
    )
    factor = CholeskyFactor.from_columns(ws.C[:, :k].copy(), result.pivots)
    return result, factor, counters


def lazy_fast_greedy(K: RateConstantMatrix, t_max: float):
    """Heap-managed fast greedy with lazily completed factor columns.

    Matches the dense greedy in exact arithmetic.  The diagonal refresh
    subtracts like-sign numbers by design — divergence on ill-conditioned
    inputs is this variant's documented failure mode, detected by the
    comparison harness rather than here.

    Returns (GreedyResult, CholeskyFactor, InstrumentationCounters).
    """
    return run_lazy_loop(
        K, t_max, lambda ws, counters, dsnap: _UnstableRefresher(ws, counters, dsnap)
    )
