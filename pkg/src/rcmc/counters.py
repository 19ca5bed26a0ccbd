"""Operation counters shared by the lazy greedy variants.

All counts are exact integers.  ``c[j]`` is the number of priority-queue
refresh rounds charged to iteration j (1-based, j = 1..k+1); ``b[v]`` is the
last iteration at which candidate v's diagonal was refreshed.  M_offdiag and
M_diag accumulate the dimensions of the inner products actually evaluated in
the off-diagonal completion and the stable diagonal recomputation.
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class InstrumentationCounters:
    n: int
    k: int = 0
    c: list[int] = field(default_factory=list)  # c[j-1] = rounds at iteration j
    b: list[int] = field(default_factory=list)  # final b_v per state (0-based v)
    m_offdiag: int = 0
    m_diag: int | None = None          # filled by the stable variants
    relax_hits: int | None = None      # filled by the relaxed variant
    relax_misses: int | None = None
    clamp_events: int = 0

    # -- identities and bounds (all exact integer arithmetic) -----------------

    def m_offdiag_from_b(self) -> int:
        return sum(bv * (bv - 1) for bv in self.b) // 2

    def m_diag_unrelaxed_from_c(self) -> int:
        return sum(j * (j - 1) * cj for j, cj in enumerate(self.c, start=1)) // 2

    def m_diag_relaxed_floor(self) -> int:
        return sum((j - 1) * cj for j, cj in enumerate(self.c, start=1))

    def b_sum_bounds(self) -> tuple[int, int]:
        """(lower, upper) provable bounds on sum_v b_v in terms of c_j."""
        lo = sum(self.c) - 1
        hi = sum((j - 1) * cj for j, cj in enumerate(self.c, start=1))
        return lo, hi

    def m_offdiag_envelope(self) -> tuple[int, int]:
        k, n = self.k, self.n
        return k * (k - 1) * (k + 1) // 6, k * (k - 1) * (3 * n - 2 * k - 2) // 6

    def m_diag_envelope(self) -> tuple[int, int]:
        k, n = self.k, self.n
        return (
            k * (k + 1) * (k + 2) // 6,
            k * (k + 1) * (k + 2) * (4 * n - 3 * k - 1) // 24,
        )

    def check_identities(self, relaxed: bool) -> None:
        """Assert every counter identity/bound; raises AssertionError."""
        assert self.m_offdiag == self.m_offdiag_from_b(), "M_offdiag identity"
        lo, hi = self.b_sum_bounds()
        assert lo <= sum(self.b) <= hi, "b/c inequalities"
        mlo, mhi = self.m_offdiag_envelope()
        assert mlo <= self.m_offdiag <= mhi, "M_offdiag envelope"
        if self.c:
            assert self.c[0] == 1, "c_1 = 1"
        for j, cj in enumerate(self.c, start=1):
            assert 1 <= cj <= self.n - j + 1, f"c_{j} = {cj} outside [1, n-j+1]"
        if self.m_diag is not None:
            if relaxed:
                assert (
                    self.m_diag_relaxed_floor()
                    <= self.m_diag
                    <= self.m_diag_unrelaxed_from_c()
                ), "relaxed M_diag envelope"
            else:
                assert self.m_diag == self.m_diag_unrelaxed_from_c(), "M_diag identity"

    def as_dict(self) -> dict:
        return {
            "k": self.k,
            "c": list(self.c),
            "b_sum": sum(self.b),
            "m_offdiag": self.m_offdiag,
            "m_diag": self.m_diag,
            "relax_hits": self.relax_hits,
            "relax_misses": self.relax_misses,
            "clamp_events": self.clamp_events,
            "m_offdiag_envelope": list(self.m_offdiag_envelope()),
            "m_diag_envelope": list(self.m_diag_envelope()),
        }
