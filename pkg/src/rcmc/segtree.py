"""Segment tree over (R_{>=0}, +): range sums and point updates in O(log m).

The tree exists so that column aggregates of a Laplacian can be maintained
with additions of nonnegative numbers only — there is deliberately no
subtraction anywhere in this module.  Layout is the standard iterative one:
a power-of-two padded array with leaves at [size, size + m) and each internal
node holding the sum of its two children.
"""

from __future__ import annotations

import numpy as np

from .errors import IndexOutOfRange, NegativeLeaf


def _next_pow2(m: int) -> int:
    p = 1
    while p < m:
        p <<= 1
    return p


class NonnegSegmentTree:
    """Nonnegative-sum segment tree over m leaves (1-based public indexing).

    ``sum(i, j)`` folds leaves i..j inclusive; the empty range (i == j + 1)
    returns 0, the adjoined identity.  ``visits`` counts node touches for the
    O(log m) cost assertion in the tests.
    """

    __slots__ = ("m", "size", "heap", "positions", "visits")

    def __init__(self, values, positions=None):
        values = np.asarray(values, dtype=np.float64)
        if values.size and values.min() < 0.0:
            raise NegativeLeaf(f"leaf value {values.min()!r} < 0")
        self.m = int(values.size)
        self.size = _next_pow2(max(self.m, 1))
        self.heap = np.zeros(2 * self.size, dtype=np.float64)
        self.heap[self.size : self.size + self.m] = values
        for i in range(self.size - 1, 0, -1):
            self.heap[i] = self.heap[2 * i] + self.heap[2 * i + 1]
        # Sparse-column mode: positions[i] is the original index of leaf i+1.
        self.positions = None if positions is None else np.asarray(positions, dtype=np.int64)
        self.visits = 0

    @property
    def total(self) -> float:
        return float(self.heap[1]) if self.m else 0.0

    def sum(self, i: int, j: int) -> float:
        """Sum of leaves i..j (1-based, inclusive); i == j + 1 is empty."""
        if not (1 <= i and j <= self.m and i <= j + 1):
            raise IndexOutOfRange(f"sum({i}, {j}) outside 1..{self.m}")
        acc = 0.0
        lo = i - 1 + self.size
        hi = j + self.size  # half-open
        while lo < hi:
            self.visits += 1
            if lo & 1:
                acc += self.heap[lo]
                lo += 1
            if hi & 1:
                hi -= 1
                acc += self.heap[hi]
            lo >>= 1
            hi >>= 1
        return acc

    def update(self, i: int, a: float) -> None:
        """Replace leaf i with a >= 0 and recompute its ancestors."""
        if not (1 <= i <= self.m):
            raise IndexOutOfRange(f"update({i}) outside 1..{self.m}")
        if not (a >= 0.0):
            raise NegativeLeaf(f"update value {a!r} < 0")
        pos = i - 1 + self.size
        self.heap[pos] = a
        pos >>= 1
        while pos >= 1:
            self.visits += 1
            self.heap[pos] = self.heap[2 * pos] + self.heap[2 * pos + 1]
            pos >>= 1

    def sum_excluding_position(self, p: int) -> float:
        """Total over all leaves except the one mapped to original index p.

        Sparse-column mode only: the excluded slot is located by binary
        search and skipped via a range split, never by subtraction.
        """
        if self.positions is None:
            raise IndexOutOfRange("tree was not built in sparse-column mode")
        if self.m == 0:
            return 0.0
        i = int(np.searchsorted(self.positions, p))
        if i < self.m and self.positions[i] == p:
            return self.sum(1, i) + self.sum(i + 2, self.m)
        return self.sum(1, self.m)

    @classmethod
    def from_sparse_column(cls, positions, values) -> "NonnegSegmentTree":
        """Tree whose leaves are the nonzero slots of a sparse column."""
        positions = np.asarray(positions, dtype=np.int64)
        order = np.argsort(positions, kind="stable")
        return cls(np.asarray(values, dtype=np.float64)[order], positions[order])
