"""Rate constant matrices, graph Laplacians, and small exact oracles.

A rate constant matrix K over n states has nonnegative off-diagonals,
diagonals K_vv = -sum_{u != v} K_uv (mass conservation), and satisfies
detailed balance K_uv*pi_v = K_vu*pi_u against a positive stationary
vector pi.  Equivalently L = -K*Diag(pi) is a symmetric graph Laplacian;
all fast selection algorithms in this package operate on L.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import (
    AsymmetricPattern,
    DetailedBalanceViolation,
    NegativeRate,
    NonpositivePi,
    OracleOutOfRange,
    SingularPivot,
)

DEFAULT_DB_TOL = 1e-9


@dataclass(frozen=True)
class RateConstantMatrix:
    """Validated rate constant matrix.

    ``off_diag`` stores only u != v entries (CSC, K_uv >= 0); the diagonal
    is derived and exposed as ``diag_out`` with K_vv = -diag_out[v].
    Immutable after construction and safe to share between threads.
    """

    n: int
    off_diag: sp.csc_matrix
    pi: np.ndarray
    diag_out: np.ndarray = field(init=False)  # -K_vv = column sums >= 0

    def __post_init__(self):
        out = np.asarray(self.off_diag.sum(axis=0)).ravel()
        object.__setattr__(self, "diag_out", out)

    @property
    def nnz(self) -> int:
        return self.off_diag.nnz

    def dense(self) -> np.ndarray:
        """Full dense K including the derived diagonal (small n only)."""
        K = self.off_diag.toarray()
        K[np.diag_indices(self.n)] = -self.diag_out
        return K


@dataclass(frozen=True)
class Laplacian:
    """Symmetric graph Laplacian: off-diagonals <= 0, zero column sums.

    ``off_diag`` holds only the u != v entries; ``diag`` is derived as the
    negated column sums, so the zero-sum property holds by construction.
    """

    n: int
    off_diag: sp.csc_matrix  # entries L_uv <= 0, symmetric pattern and values
    diag: np.ndarray = field(init=False)

    def __post_init__(self):
        d = -np.asarray(self.off_diag.sum(axis=0)).ravel()
        object.__setattr__(self, "diag", d)

    def dense(self) -> np.ndarray:
        L = self.off_diag.toarray()
        L[np.diag_indices(self.n)] = self.diag
        return L

    def column(self, v: int) -> tuple[np.ndarray, np.ndarray]:
        """(row indices, values) of the off-diagonal entries in column v."""
        lo, hi = self.off_diag.indptr[v], self.off_diag.indptr[v + 1]
        return self.off_diag.indices[lo:hi], self.off_diag.data[lo:hi]


@dataclass(frozen=True)
class YieldVector:
    """Componentwise nonnegative vector of state populations."""

    x: np.ndarray
    total: float = field(init=False)

    def __post_init__(self):
        x = np.asarray(self.x, dtype=np.float64)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "total", float(x.sum()))

    def __len__(self):
        return len(self.x)


def _coo_offdiag(n, rows, cols, vals) -> sp.csc_matrix:
    m = sp.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsc()
    m.sum_duplicates()
    m.eliminate_zeros()
    m.sort_indices()
    return m


def validate(
    n: int,
    entries,
    pi,
    db_tol: float = DEFAULT_DB_TOL,
) -> RateConstantMatrix:
    """Build a validated RateConstantMatrix from raw off-diagonal triples.

    ``entries`` is an iterable of (u, v, K_uv) with 0-based u != v.  The
    diagonal is always synthesized from the column sums, never trusted from
    input.  Raises NegativeRate, NonpositivePi, AsymmetricPattern, or
    DetailedBalanceViolation (with the worst pair) on bad input.
    """
    pi = np.asarray(pi, dtype=np.float64)
    if pi.shape != (n,) or not np.all(pi > 0.0) or not np.all(np.isfinite(pi)):
        bad = int(np.argmin(pi)) if pi.shape == (n,) else -1
        raise NonpositivePi(f"pi must be positive and finite (state {bad + 1})")

    rows, cols, vals = [], [], []
    for u, v, w in entries:
        if u == v:
            continue  # diagonal is derived, never stored
        if not (w >= 0.0) or not np.isfinite(w):
            raise NegativeRate(f"K[{u + 1},{v + 1}] = {w!r} violates K_uv >= 0")
        if w == 0.0:
            continue  # zero-weight edges are dropped at parse time
        rows.append(u)
        cols.append(v)
        vals.append(w)

    K = _coo_offdiag(n, rows, cols, vals)

    pattern = K.copy()
    pattern.data = np.ones_like(pattern.data)
    asym = pattern - pattern.T
    if asym.nnz and np.abs(asym.data).max() > 0:
        coo = asym.tocoo()
        i = int(np.argmax(np.abs(coo.data)))
        raise AsymmetricPattern(
            f"K[{coo.row[i] + 1},{coo.col[i] + 1}] stored without its mirror entry"
        )

    # Detailed balance: K_uv*pi_v must match K_vu*pi_u for every stored pair.
    # Pattern symmetry was established above, so the two CSC canonical forms
    # share indptr/indices and their data arrays align entrywise.
    if K.nnz:
        fwd = K.multiply(pi[np.newaxis, :]).tocsc()
        rev = (K.T).multiply(pi[:, np.newaxis]).tocsc()
        fwd.sort_indices()
        rev.sort_indices()
        a, b = fwd.data, rev.data
        denom = np.maximum(np.abs(a), np.abs(b))
        resid = np.abs(a - b) / np.where(denom > 0, denom, 1.0)
        i = int(np.argmax(resid))
        if resid[i] > db_tol:
            coo = fwd.tocoo()
            raise DetailedBalanceViolation(
                int(coo.row[i]) + 1, int(coo.col[i]) + 1, float(resid[i]), db_tol
            )

    return RateConstantMatrix(n=n, off_diag=K, pi=pi)


def from_edge_weights(n: int, edges, pi, db_tol: float = DEFAULT_DB_TOL) -> RateConstantMatrix:
    """Build K = -L*Diag(pi)^-1 from symmetric Laplacian edge weights.

    ``edges`` is an iterable of (u, v, w) with w = -L_uv > 0; the construction
    guarantees nonnegativity, pattern symmetry, and detailed balance exactly.
    """
    pi = np.asarray(pi, dtype=np.float64)
    if pi.shape != (n,) or not np.all(pi > 0.0) or not np.all(np.isfinite(pi)):
        raise NonpositivePi("pi must be a positive finite vector of length n")
    triples = []
    for u, v, w in edges:
        if w < 0.0:
            raise NegativeRate(f"edge weight w[{u + 1},{v + 1}] = {w!r} must be >= 0")
        if w == 0.0 or u == v:
            continue
        triples.append((u, v, w / pi[v]))  # K_uv = -L_uv / pi_v
        triples.append((v, u, w / pi[u]))
    return validate(n, triples, pi, db_tol=db_tol)


def to_laplacian(K: RateConstantMatrix) -> Laplacian:
    """L = -K*Diag(pi), symmetrized as (L + L^T)/2.

    Real inputs satisfy detailed balance only to roundoff; averaging makes L
    exactly symmetric, which every downstream factorization assumes.
    """
    scaled = K.off_diag.multiply(K.pi[np.newaxis, :]).tocsc()
    L = (-0.5) * (scaled + scaled.T)
    L = L.tocsc()
    L.sum_duplicates()
    L.eliminate_zeros()
    L.sort_indices()
    return Laplacian(n=K.n, off_diag=L)


def reconstruct_rate_matrix(L: Laplacian, pi) -> RateConstantMatrix:
    """Inverse of :func:`to_laplacian`: K = -L*Diag(pi)^-1."""
    pi = np.asarray(pi, dtype=np.float64)
    Koff = (-L.off_diag).multiply(1.0 / pi[np.newaxis, :]).tocsc()
    return validate_from_parts(L.n, Koff, pi)


def validate_from_parts(n, Koff, pi) -> RateConstantMatrix:
    coo = Koff.tocoo()
    return validate(n, zip(coo.row, coo.col, coo.data), pi)


def schur_complement_dense(L: Laplacian | np.ndarray, pivots) -> np.ndarray:
    """Schur complement of an ordered pivot set, by sequential elimination.

    Eliminates the pivots one at a time with the rank-one update, recomputing
    every diagonal as the negated off-diagonal column sum so the Laplacian
    class is preserved exactly.  Returns the dense matrix over the remaining
    states in ascending order.  Raises SingularPivot if a pivot diagonal is
    <= 0 at elimination time.
    """
    W = L.dense() if isinstance(L, Laplacian) else np.array(L, dtype=np.float64)
    n = W.shape[0]
    alive = np.ones(n, dtype=bool)
    for s in pivots:
        ds = W[s, s]
        if ds <= 0.0:
            raise SingularPivot(f"pivot {s + 1} has diagonal {ds!r} <= 0")
        col = W[:, s].copy()
        row = W[s, :].copy()
        W -= np.outer(col, row) / ds
        alive[s] = False
        W[s, :] = 0.0
        W[:, s] = 0.0
        np.fill_diagonal(W, 0.0)
        np.fill_diagonal(W, np.where(alive, -W.sum(axis=0), 0.0))
    idx = np.flatnonzero(alive)
    return W[np.ix_(idx, idx)]


def exact_solve_small(K: RateConstantMatrix, p: YieldVector, t: float) -> YieldVector:
    """x(t) = exp(tK) p by dense eigendecomposition; sanity oracle only.

    Uses the similarity Pi^{-1/2} L Pi^{-1/2}, which is symmetric, so eigh
    applies.  Restricted to small well-conditioned instances; raises
    OracleOutOfRange otherwise.
    """
    if K.n > 50:
        raise OracleOutOfRange(f"n = {K.n} > 50")
    vals = np.abs(K.off_diag.data)
    if vals.size and vals.max() / vals.min() > 1e6:
        raise OracleOutOfRange("off-diagonal dynamic range exceeds 1e6")
    L = to_laplacian(K).dense()
    sq = np.sqrt(K.pi)
    A = -L / np.outer(sq, sq)  # Pi^{-1/2} K Pi^{1/2}, symmetric
    lam, Q = np.linalg.eigh(A)
    y = Q @ (np.exp(t * lam) * (Q.T @ (p.x / sq)))
    return YieldVector(sq * y)
