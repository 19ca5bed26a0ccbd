"""Cross-method run harness: dispatch, timing, digests, divergence.

The dense greedy is always the reference implementation; a method's
divergence index is the first 1-based position where its pivot sequence
departs from the reference (including length mismatches), or None.
"""

from __future__ import annotations

import hashlib
import time
from dataclasses import dataclass, field

import numpy as np

from . import backend
from .cholesky import fast_greedy
from .counters import InstrumentationCounters
from .greedy_ref import GreedyResult, greedy_factored
from .lazy import lazy_fast_greedy
from .model import RateConstantMatrix, YieldVector
from .projection import Trajectory, project
from .stable import DEFAULT_EPS_RELAX, stable_lazy_fast_greedy

METHODS = ("greedy", "fast", "lazyfast", "stable", "relaxed")

REPORT_SCHEMA = {"schema": "rcmc-report", "version": 1}


def run_step1(method: str, K: RateConstantMatrix, t_max: float, eps_relax: float | None = None):
    """Run one selection method; returns (result, factor, counters-or-None)."""
    if method == "greedy":
        result, factor = greedy_factored(K, t_max)
        return result, factor, None
    if method == "fast":
        result, factor = fast_greedy(K, t_max)
        return result, factor, None
    if method == "lazyfast":
        return lazy_fast_greedy(K, t_max)
    if method == "stable":
        return stable_lazy_fast_greedy(K, t_max, eps_relax=None)
    if method == "relaxed":
        eps = DEFAULT_EPS_RELAX if eps_relax is None else eps_relax
        return stable_lazy_fast_greedy(K, t_max, eps_relax=eps)
    raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")


def pivots_digest(pivots) -> str:
    """Order-sensitive digest of a pivot sequence (1-based in the text)."""
    text = ",".join(str(int(s) + 1) for s in pivots)
    return hashlib.sha256(text.encode()).hexdigest()[:16]


def divergence_index(reference, pivots) -> int | None:
    """First 1-based j where the sequences differ, or None if identical."""
    for j, (a, b) in enumerate(zip(reference, pivots), start=1):
        if a != b:
            return j
    if len(reference) != len(pivots):
        return min(len(reference), len(pivots)) + 1
    return None


@dataclass
class RunReport:
    method: str
    backend: str
    n: int
    k: int
    pivots_digest: str
    t_step1: float
    stop_diagonal: float | None
    t_step2: float | None = None
    taus: list[float] = field(default_factory=list)
    counters: dict | None = None
    divergence_index: int | None = None
    pivots: list[int] | None = None  # 1-based, on demand

    def as_dict(self) -> dict:
        d = dict(REPORT_SCHEMA)
        d.update(
            method=self.method,
            backend=self.backend,
            n=self.n,
            k=self.k,
            pivots_digest=self.pivots_digest,
            t_step1=self.t_step1,
            t_step2=self.t_step2,
            tau_per_j=self.taus,
            stop_diagonal=self.stop_diagonal,
            counters=self.counters,
            divergence_index=self.divergence_index,
        )
        if self.pivots is not None:
            d["pivots"] = self.pivots
        return d


def run_method(
    method: str,
    K: RateConstantMatrix,
    t_max: float,
    eps_relax: float | None = None,
    p: YieldVector | None = None,
    mode: str | None = None,
    reference: GreedyResult | None = None,
    full_pivots: bool = False,
):
    """Time one method end to end; optionally project and compare.

    Returns (RunReport, result, factor, trajectory-or-None).
    """
    t0 = time.perf_counter()
    result, factor, counters = run_step1(method, K, t_max, eps_relax)
    t1 = time.perf_counter() - t0
    trajectory: Trajectory | None = None
    taus: list[float] = []
    t2 = None
    if p is not None and mode is not None:
        t0 = time.perf_counter()
        trajectory, taus = project(K, result, factor, p, mode=mode)
        t2 = time.perf_counter() - t0
    report = RunReport(
        method=method,
        backend=backend.current(),
        n=K.n,
        k=result.k,
        pivots_digest=pivots_digest(result.pivots),
        t_step1=t1,
        stop_diagonal=result.stop_diagonal,
        t_step2=t2,
        taus=taus,
        counters=counters.as_dict() if isinstance(counters, InstrumentationCounters) else None,
        divergence_index=(
            divergence_index(reference.pivots, result.pivots) if reference else None
        ),
        pivots=[int(s) + 1 for s in result.pivots] if full_pivots else None,
    )
    return report, result, factor, trajectory


def make_p(source: str, K: RateConstantMatrix) -> YieldVector:
    """Parse a p-source: 'uniform', 'point:IDX' (1-based), or 'file:PATH'."""
    if source == "uniform":
        return YieldVector(np.full(K.n, 1.0 / K.n))
    if source.startswith("point:"):
        idx = int(source.split(":", 1)[1])
        if not (1 <= idx <= K.n):
            raise ValueError(f"point index {idx} outside 1..{K.n}")
        x = np.zeros(K.n)
        x[idx - 1] = 1.0
        return YieldVector(x)
    if source.startswith("file:"):
        vals = np.loadtxt(source.split(":", 1)[1], dtype=np.float64, ndmin=1)
        if vals.shape != (K.n,):
            raise ValueError(f"p file holds {vals.shape[0]} values, expected {K.n}")
        return YieldVector(vals)
    raise ValueError(f"bad p source {source!r}")
