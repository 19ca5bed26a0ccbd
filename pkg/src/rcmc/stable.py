"""Stable and relaxed lazy greedy: cancellation-free diagonal refresh.

The candidate diagonal is recovered from the compressed factor row — the
aggregate of all transient factor rows — so every subtraction on the
refresh path combines a nonpositive and a nonnegative quantity.  Column
aggregates of L are served by a bank of nonnegative-sum segment trees.
The relaxed variant additionally permits the like-sign shortcut
row[l] = prev_row[l] - C_ul whenever the certified ratio test passes,
skipping that entry's inner product and range queries.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import backend
from .counters import InstrumentationCounters
from .errors import BankInvariantViolation, PreconditionViolation
from .lazy import run_lazy_loop
from .model import Laplacian, RateConstantMatrix

DEFAULT_EPS_RELAX = 1e-16


def _next_pow2(m: int) -> int:
    p = 1
    while p < m:
        p <<= 1
    return p


class SegmentTreeBank:
    """One nonnegative-sum segment tree per column of L, in a flat arena.

    Column v's leaves are the nonzero off-diagonal slots of L_{*v}, holding
    magnitudes -L_uv >= 0; slots are zeroed (never subtracted) as states
    leave the relevant transient sets.  The flat layout keeps every tree
    addressable from the compiled kernels without per-query indirection.
    """

    def __init__(self, L: Laplacian):
        self.n = L.n
        off = L.off_diag
        self.pos_off = off.indptr.astype(np.int64)
        self.pos = off.indices.astype(np.int64)  # sorted within each column
        m = np.diff(self.pos_off)
        self.size_arr = np.array([_next_pow2(max(int(x), 1)) for x in m], dtype=np.int64)
        self.heap_off = np.zeros(self.n + 1, dtype=np.int64)
        np.cumsum(2 * self.size_arr, out=self.heap_off[1:])
        self.heap = np.zeros(int(self.heap_off[-1]), dtype=np.float64)
        vals = -off.data  # magnitudes
        for v in range(self.n):
            base = self.heap_off[v]
            size = self.size_arr[v]
            lo, hi = self.pos_off[v], self.pos_off[v + 1]
            self.heap[base + size : base + size + (hi - lo)] = vals[lo:hi]
            for i in range(size - 1, 0, -1):
                self.heap[base + i] = self.heap[base + 2 * i] + self.heap[base + 2 * i + 1]

    def arrays(self):
        return (self.pos, self.pos_off, self.heap, self.heap_off, self.size_arr)

    def column_total(self, v: int) -> float:
        return float(self.heap[self.heap_off[v] + 1]) if self.size_arr[v] else 0.0

    def sum_excluding(self, v: int, u: int) -> float:
        """Sum of column v's live slots, skipping original index u."""
        kern = backend.kernels()
        return float(kern.bank_sum_excl(*self.arrays(), v, u))

    def zero_slot(self, v: int, slot: int) -> None:
        backend.kernels().bank_zero(*self.arrays(), v, slot)

    def zero_slot_many(self, cols, slot: int) -> None:
        backend.kernels().bank_zero_many(*self.arrays(), cols, slot)

    def audit(self, L: Laplacian, transient_of) -> None:
        """Debug check of the bank invariant; raises BankInvariantViolation.

        ``transient_of(v)`` must yield the index set whose L-column entries
        should still be live in tree v.
        """
        for v in range(self.n):
            live = set(transient_of(v))
            idx, vals = L.column(v)
            want = -sum(val for u, val in zip(idx, vals) if int(u) in live)
            got = self.column_total(v)
            scale = max(abs(want), abs(got), 1e-300)
            if abs(want - got) > 1e-12 * scale:
                raise BankInvariantViolation(
                    f"tree {v + 1}: total {got!r} but invariant demands {want!r}"
                )


@dataclass(frozen=True)
class CompressedRow:
    """Aggregated transient factor row for candidate (j, u); entries <= 0."""

    j: int
    u: int
    entries: np.ndarray


def compressed_entry_L(bank: SegmentTreeBank, u: int, v: int) -> float:
    """Compressed Laplacian entry: sum of column v over live transient rows,
    excluding the candidate u, returned with the Laplacian sign (<= 0).

    The exclusion is a range split around u's slot, so the value is a pure
    negated sum of nonnegative numbers.
    """
    return -bank.sum_excluding(v, u)


def stably_compute_diagonal(
    j: int,
    u: int,
    factor,
    bank: SegmentTreeBank,
    relax: tuple[float, CompressedRow] | None = None,
) -> tuple[float, CompressedRow]:
    """Recompute d_u^(j-1) from the compressed factor row (subtraction-free).

    ``factor`` must have columns 1..j-1 settled for row u and all pivots.
    With ``relax = (eps, previous_row)`` the like-sign shortcut is taken for
    every entry whose ratio passes the eps/(2+eps) gate.  Returns the
    diagonal and the compressed row (reused as the next previous_row after
    acceptance).
    """
    C = factor.columns if hasattr(factor, "columns") else factor
    pivots = np.asarray(
        factor.pivots[: j - 1] if hasattr(factor, "pivots") else [], dtype=np.int64
    )
    out = np.zeros(j - 1, dtype=np.float64)
    stats = np.zeros(4, dtype=np.int64)
    if relax is None:
        prev, eps_ratio = None, -1.0
    else:
        eps, prev_row = relax
        prev = prev_row.entries if isinstance(prev_row, CompressedRow) else prev_row
        eps_ratio = eps / (2.0 + eps)
    d = backend.kernels().alg5_refresh(
        C, u, j - 1, pivots, *bank.arrays(), prev, eps_ratio, out, stats
    )
    return float(d), CompressedRow(j=j, u=u, entries=out)


class _StableRefresher:
    """Alg-4 refresh strategy backed by the segment-tree bank."""

    def __init__(self, ws, counters: InstrumentationCounters, dsnap, L, eps_relax, on_refresh=None):
        self.ws = ws
        self.counters = counters
        self.bank = SegmentTreeBank(L)
        self.kern = backend.kernels()
        self.eps_ratio = -1.0 if eps_relax is None else eps_relax / (2.0 + eps_relax)
        self.relaxed = eps_relax is not None
        self.stats = np.zeros(4, dtype=np.int64)
        self.prev_row: np.ndarray | None = None
        self.stash: dict[int, tuple[int, np.ndarray, float]] = {}
        self.on_refresh = on_refresh

    def initial_d(self) -> np.ndarray:
        # Tree totals, not the CSC column sums: the j = 1 refresh must
        # reproduce the heap keys bitwise so that c_1 = 1 stays exact.
        return np.array([self.bank.column_total(v) for v in range(self.ws.L.n)])

    def refresh(self, u: int, b_old: int, jm1: int) -> float:
        ws, bank = self.ws, self.bank
        ws.ensure_columns(max(jm1, 1))
        lrow = ws.scatter_row(u)
        _, moff = self.kern.complete_row(ws.C, u, b_old, jm1, ws.pivots, lrow)
        self.counters.m_offdiag += int(moff)
        self.kern.bank_zero_range(*bank.arrays(), u, ws.pivots, b_old, jm1)
        row = np.zeros(jm1, dtype=np.float64)
        prev = self.prev_row if (self.relaxed and self.eps_ratio >= 0.0) else None
        d = self.kern.alg5_refresh(
            ws.C, u, jm1, ws.pivots, *bank.arrays(), prev, self.eps_ratio, row, self.stats
        )
        self.stash[u] = (jm1, row, float(d))
        if self.on_refresh is not None:
            self.on_refresh(jm1 + 1, u, row, float(d))
        return float(d)

    def on_accept(self, u: int, col: int, csj: float) -> None:
        # Retire the accepted state's slot in every settled pivot column.
        self.bank.zero_slot_many(self.ws.pivots[:col], u)
        if self.relaxed:
            stashed = self.stash.get(u)
            if stashed is not None and stashed[0] == col:
                row = stashed[1]
            else:  # defensive regeneration; unreachable under the loop rules
                d, comp = stably_compute_diagonal(
                    col + 1,
                    u,
                    _FactorView(self.ws.C, self.ws.pivots[:col]),
                    self.bank,
                )
                self.stats[0] += (col * (col + 1)) // 2
                row = comp.entries
            # Column sums of C vanish, so the aggregated entry of the new
            # pivot column is exactly -csj; appending it lets the next
            # iteration relax all j settled entries.
            self.prev_row = np.append(row, -csj)
        self.stash.pop(u, None)

    def finalize(self, counters: InstrumentationCounters) -> None:
        counters.m_diag = int(self.stats[0])
        if self.relaxed:
            counters.relax_hits = int(self.stats[1])
            counters.relax_misses = int(self.stats[2])


class _FactorView:
    def __init__(self, columns, pivots):
        self.columns = columns
        self.pivots = tuple(int(s) for s in pivots)


def stable_lazy_fast_greedy(
    K: RateConstantMatrix,
    t_max: float,
    eps_relax: float | None = None,
    on_refresh=None,
):
    """Lazy fast greedy with the subtraction-free diagonal refresh.

    ``eps_relax=None`` runs the fully stable variant; a float enables the
    relaxing shortcut with that error tolerance (0 admits nothing and
    reproduces the stable run exactly).  Returns (GreedyResult,
    CholeskyFactor, InstrumentationCounters).
    """
    if eps_relax is not None and not (0.0 <= eps_relax):
        raise ValueError(f"eps_relax must be >= 0, got {eps_relax!r}")
    holder = {}

    def make(ws, counters, dsnap):
        refresher = _StableRefresher(
            ws, counters, dsnap, ws.L, eps_relax, on_refresh=on_refresh
        )
        holder["refresher"] = refresher
        return refresher

    result, factor, counters = run_lazy_loop(K, t_max, make)
    holder["refresher"].finalize(counters)
    return result, factor, counters


class SubtractionDecision(NamedTuple):
    allowed: bool
    bound: float


def subtraction_error_bound(
    a_hat: float, b_hat: float, e: float, eps: float
) -> SubtractionDecision:
    """Certify the like-sign subtraction a_hat - b_hat.

    Inputs carry relative error at most e; if |b_hat|/|a_hat| <= eps/(2+eps)
    the difference's relative error is at most (1+eps)*e, and the decision
    is ALLOW with that certified bound.  Otherwise DENY.  b_hat == 0 is the
    degenerate exact case (ALLOW, bound e).
    """
    if not (0.0 < e):
        raise PreconditionViolation(f"input error bound e must be positive, got {e!r}")
    if not (0.0 <= eps <= 1.0 / e - 1.0):
        raise PreconditionViolation(f"eps = {eps!r} outside [0, 1/e - 1]")
    if b_hat == 0.0:
        return SubtractionDecision(True, e)
    if a_hat * b_hat < 0.0:
        raise PreconditionViolation("operands must share a sign")
    if abs(a_hat) <= abs(b_hat):
        raise PreconditionViolation("|a_hat| must exceed |b_hat|")
    if abs(b_hat) / abs(a_hat) <= eps / (2.0 + eps):
        return SubtractionDecision(True, (1.0 + eps) * e)
    return SubtractionDecision(False, float("inf"))
