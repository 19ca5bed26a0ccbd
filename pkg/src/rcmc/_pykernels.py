"""Pure-Python/numpy implementations of the hot kernels.

This module is the fallback backend when the compiled extension
(:mod:`rcmc._native`) is unavailable; both expose identical signatures and
semantics, so the algorithm drivers can run on either.  The compiled backend
exists purely for speed — any behavioural difference between the two is a
bug (tests compare them directly).

Conventions shared by both backends:

* ``W`` is the dense working matrix -K (nonnegative diagonal, nonpositive
  off-diagonals); it is destroyed in place.
* Factor matrices ``C`` are C-contiguous (n, cap) arrays filled column by
  column; column j holds the 0-based j-th pivot column.
* Segment-tree banks are flat arenas: column v owns ``heap[heap_off[v] :
  heap_off[v] + 2*size_arr[v]]`` with leaves at offset ``size_arr[v]`` and
  sorted original row indices in ``pos[pos_off[v]:pos_off[v+1]]``.
* ``stats`` is an int64 array [m_diag, relax_hits, relax_misses, reserved].
"""

from __future__ import annotations

import numpy as np

from .errors import NegativeDiagonal, ZeroPivotColumn

NAME = "python"

# Schur diagonals below -tol * max|L| signal a non-PSD input rather than
# roundoff; smaller negatives are clamped to zero.
NEG_DIAG_REL_TOL = 1e-12


def greedy_run(W: np.ndarray, pi: np.ndarray, thr: float):
    """Dense greedy steady-state selection on the working matrix W = -K.

    Selects argmax of the (nonnegative) diagonal, stops when it falls below
    ``thr``, performs the rank-one off-diagonal update, and recomputes every
    diagonal as a negated off-diagonal column sum (never by subtraction).
    Also records the partial Cholesky column of L = -K*Diag(pi) for each
    pivot, which costs O(n) per step on top of the O(n^2) update.

    Returns (k, pivots, diags_k, stop_diag, C) where ``diags_k[j]`` is the
    selected diagonal -K_ss at step j and ``stop_diag`` is the first rejected
    diagonal (None when k = n).
    """
    n = W.shape[0]
    alive = np.ones(n, dtype=bool)
    pivots = np.empty(n, dtype=np.int64)
    diags_k = np.empty(n, dtype=np.float64)
    C = np.zeros((n, n), dtype=np.float64)
    stop_diag = None
    k = n
    for j in range(n):
        d = np.where(alive, np.diagonal(W), -np.inf)
        s = int(np.argmax(d))  # ties break to the smallest index
        ds = W[s, s]
        if ds < thr:
            k = j
            stop_diag = float(ds)
            break
        pivots[j] = s
        diags_k[j] = ds
        dL = ds * pi[s]
        csj = np.sqrt(dL)
        C[:, j] = W[:, s] * (pi[s] / csj)
        C[s, j] = csj
        col = W[:, s].copy()
        row = W[s, :].copy()
        alive[s] = False
        W -= np.outer(col, row) / ds
        W[s, :] = 0.0
        W[:, s] = 0.0
        np.fill_diagonal(W, 0.0)
        np.fill_diagonal(W, np.where(alive, 0.0 - W.sum(axis=0), 0.0))
    return k, pivots[:k].copy(), diags_k[:k].copy(), stop_diag, C[:, :k].copy()


def doolittle_run(L: np.ndarray, pi, eps: float, stats: np.ndarray):
    """Pivoted Doolittle factorization keeping only the diagonal vector.

    With ``pi is None`` this is the plain tolerance-eps variant (pivot by
    d_v, stop when the maximum falls below eps, or at <= 0 when eps == 0).
    With ``pi`` given it pivots by d_v/pi_v and stops below eps (= 1/t_max).
    ``stats[3]`` accumulates clamp events (roundoff-negative diagonals).

    Returns (k, pivots, sel_vals, stop_val, C, d) where sel_vals holds the
    selection key (d or d/pi) of each accepted pivot.
    """
    n = L.shape[0]
    d = np.diagonal(L).astype(np.float64).copy()
    lmax = float(np.abs(L).max()) if n else 0.0
    neg_tol = NEG_DIAG_REL_TOL * lmax
    alive = np.ones(n, dtype=bool)
    pivots = np.empty(n, dtype=np.int64)
    sel_vals = np.empty(n, dtype=np.float64)
    C = np.zeros((n, n), dtype=np.float64)
    stop_val = None
    k = n
    for j in range(n):
        key = np.where(alive, d if pi is None else d / pi, -np.inf)
        s = int(np.argmax(key))
        val = key[s]
        if (pi is None and ((eps > 0.0 and val < eps) or (eps == 0.0 and val <= 0.0))) or (
            pi is not None and val < eps
        ):
            k = j
            stop_val = float(val)
            break
        pivots[j] = s
        sel_vals[j] = val
        csj = np.sqrt(d[s])
        alive[s] = False
        inner = C[:, :j] @ C[s, :j]
        cj = np.where(alive, (L[:, s] - inner) / csj, 0.0)
        C[:, j] = cj
        C[s, j] = csj
        dnew = d - cj * cj
        bad = alive & (dnew < -neg_tol)
        if bad.any():
            v = int(np.argmax(np.where(bad, -dnew, -np.inf)))
            raise NegativeDiagonal(
                f"diagonal {v + 1} = {dnew[v]!r} < {-neg_tol!r}; input not PSD"
            )
        clamped = alive & (dnew < 0.0)
        stats[3] += int(clamped.sum())
        dnew[clamped] = 0.0
        d = np.where(alive, dnew, d)
    return k, pivots[:k].copy(), sel_vals[:k].copy(), stop_val, C[:, :k].copy(), d


def complete_row(C, u, b, jm1, pivots, lrow):
    """Fill the missing factor entries C[u, c] for c in [b, jm1).

    Each entry is (L_{u,s_c} - <C_u, C_{s_c}>)/C_{s_c,c}; the numerator
    combines a nonpositive with a negated-nonnegative quantity, so no
    like-sign subtraction occurs here.  Returns (sum of squares of the new
    entries, added inner-product dimension).
    """
    sumsq = 0.0
    moff = 0
    for c in range(b, jm1):
        s = pivots[c]
        num = lrow[s] - float(np.dot(C[u, :c], C[s, :c]))
        piv = C[s, c]
        if piv == 0.0:
            raise ZeroPivotColumn(f"factor pivot {c + 1} is zero")
        val = num / piv
        C[u, c] = val
        sumsq += val * val
        moff += c
    return sumsq, moff


# --- flat segment-tree bank --------------------------------------------------

def _tree_sum(heap, base, size, lo, hi):
    """Sum of leaves [lo, hi) in the tree stored at heap[base:base+2*size]."""
    acc = 0.0
    lo += size
    hi += size
    while lo < hi:
        if lo & 1:
            acc += heap[base + lo]
            lo += 1
        if hi & 1:
            hi -= 1
            acc += heap[base + hi]
        lo >>= 1
        hi >>= 1
    return acc


def bank_sum_excl(pos, pos_off, heap, heap_off, size_arr, col, excl):
    """Total of column ``col``'s leaves, skipping original index ``excl``.

    The excluded slot is removed by a range split around its leaf, keeping
    the computation a pure sum of nonnegative numbers.
    """
    lo, hi = pos_off[col], pos_off[col + 1]
    m = hi - lo
    if m == 0:
        return 0.0
    i = int(np.searchsorted(pos[lo:hi], excl))
    base = heap_off[col]
    size = size_arr[col]
    if i < m and pos[lo + i] == excl:
        return _tree_sum(heap, base, size, 0, i) + _tree_sum(heap, base, size, i + 1, m)
    return _tree_sum(heap, base, size, 0, m)


def bank_zero(pos, pos_off, heap, heap_off, size_arr, col, slot):
    """Zero the leaf of column ``col`` mapped to original index ``slot``."""
    lo, hi = pos_off[col], pos_off[col + 1]
    if hi == lo:
        return
    i = int(np.searchsorted(pos[lo:hi], slot))
    if i >= hi - lo or pos[lo + i] != slot:
        return
    base = heap_off[col]
    node = size_arr[col] + i
    heap[base + node] = 0.0
    node >>= 1
    while node >= 1:
        heap[base + node] = heap[base + 2 * node] + heap[base + 2 * node + 1]
        node >>= 1


def bank_zero_many(pos, pos_off, heap, heap_off, size_arr, cols, slot):
    """Zero ``slot`` in every column of ``cols`` (acceptance bookkeeping)."""
    for col in cols:
        bank_zero(pos, pos_off, heap, heap_off, size_arr, int(col), slot)


def bank_zero_range(pos, pos_off, heap, heap_off, size_arr, col, pivots, lo, hi):
    """Zero the slots of pivots[lo:hi] in column ``col`` (refresh catch-up)."""
    for c in range(lo, hi):
        bank_zero(pos, pos_off, heap, heap_off, size_arr, col, int(pivots[c]))


def alg5_refresh(
    C,
    u,
    jm1,
    pivots,
    pos,
    pos_off,
    heap,
    heap_off,
    size_arr,
    prev_row,
    eps_ratio,
    out_row,
    stats,
):
    """Stable recomputation of the candidate diagonal d_u via the compressed
    factor row.

    Builds out_row[c] (the aggregated transient factor row, all entries
    <= 0) by forward substitution; each numerator combines the nonpositive
    compressed Laplacian entry with a negated nonnegative inner product.
    With ``eps_ratio >= 0`` the relaxing shortcut out_row[c] =
    prev_row[c] - C[u, c] replaces the substitution whenever the like-sign
    ratio is certified small (|C_uc| / |prev| <= eps_ratio); eps_ratio == 0
    admits nothing, reproducing the unrelaxed run exactly.

    Returns d >= 0.  stats accumulates [m_diag, relax_hits, relax_misses, -].
    """
    relax = eps_ratio >= 0.0 and prev_row is not None
    for c in range(jm1):
        s = pivots[c]
        if relax:
            a = prev_row[c]
            bb = C[u, c]
            if eps_ratio > 0.0 and (
                (bb == 0.0 and a == 0.0)
                or (a != 0.0 and abs(bb) / abs(a) <= eps_ratio)
            ):
                stats[1] += 1
                out_row[c] = a - bb
                continue
            stats[2] += 1
        lstar = -bank_sum_excl(pos, pos_off, heap, heap_off, size_arr, s, u)
        ip = float(np.dot(out_row[:c], C[s, :c]))
        piv = C[s, c]
        if piv == 0.0:
            raise ZeroPivotColumn(f"factor pivot {c + 1} is zero")
        out_row[c] = (lstar - ip) / piv
        stats[0] += c
    lstar_u = -bank_sum_excl(pos, pos_off, heap, heap_off, size_arr, u, u)
    d = float(np.dot(out_row[:jm1], C[u, :jm1])) - lstar_u
    stats[0] += jm1
    return d
