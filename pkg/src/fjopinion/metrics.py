"""Conflict, disagreement, and polarization metrics: exact and approximate.

Exact mode evaluates the defining sums on the equilibrium vector.  The
approximate path performs one certified linear solve and reads each metric
off as a squared l2 norm, with the solve tolerance chosen from the proved
per-metric thresholds so every returned value is an eps-approximation.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, asdict

import numpy as np

from fjopinion.errors import GraphInputError, NumericalError, SizeGuardError
from fjopinion.dynamics import DENSE_CAP, center_opinions, equilibrium
from fjopinion.graph import (
    Graph,
    StubbornnessVector,
    eigen_bounds,
    incidence_view,
    laplacian_apply,
    operator_matrix,
)
from fjopinion.solver import SolverRequest, solve


@dataclass(frozen=True)
class MetricsReport:
    """All four metrics plus provenance of how they were computed."""

    conflict: float
    disagreement: float
    polarization: float
    pd_index: float
    sum_z: float
    weighted_sum_z: float
    mode: str
    delta_used: float
    eps_requested: float
    conservation_residual: float
    certified: bool = True
    centered: bool = False
    graph_fingerprint: str = ""
    n: int = 0
    m: int = 0
    solver_iterations: int = 0
    solve_seconds: float = 0.0
    norms_seconds: float = 0.0

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        """Flat key-value document, one key per line, for machine diffing."""
        return json.dumps(self.to_dict(), indent=1, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "MetricsReport":
        return cls(**json.loads(text))


@dataclass(frozen=True)
class DeltaBudget:
    """Per-metric solver tolerances and their minimum.

    delta1 certifies the polarization norm, delta2 the disagreement norm,
    delta3 the conflict norm; the listing of the approximation algorithm
    sets delta = delta3, but the minimum is always safe and is what we use.
    """

    delta1: float
    delta2: float
    delta3: float

    @property
    def delta(self) -> float:
        return min(self.delta1, self.delta2, self.delta3)


def delta_budget(g: Graph, k: StubbornnessVector, s: np.ndarray, eps: float) -> DeltaBudget:
    """Solve-tolerance thresholds guaranteeing eps-approximation of each metric.

    Requires eps in (0, 1/2) and a nonzero opinion vector; expects s centered
    so the weighted sum vanishes.
    """
    if not (0.0 < eps < 0.5):
        raise GraphInputError(f"eps must be in (0, 1/2), got {eps}")
    s = np.asarray(s, dtype=np.float64)
    s_norm = float(np.linalg.norm(s))
    if s_norm == 0.0:
        raise GraphInputError("opinion vector is zero; all metrics are trivially 0")
    n = float(g.n)
    w_min, w_max = g.w_min, g.w_max
    k_min, k_max = k.k_min, k.k_max
    cap = k_max + n * w_max

    delta1 = eps / (3.0 * math.sqrt(cap / (k_min * k_max)))
    delta2 = eps * k_min * s_norm / (3.0 * n * cap) * math.sqrt(w_min / (n * cap))
    delta3 = (
        eps
        * w_min
        * k_min
        * math.sqrt(k_min)
        * s_norm
        / (3.0 * w_max * n**3 * cap * math.sqrt(n * k_max * cap))
    )
    return DeltaBudget(delta1=delta1, delta2=delta2, delta3=delta3)


def _metrics_from_z(g, k, s, z):
    """Direct defining sums evaluated on an expressed-opinion vector."""
    conflict = float(k.k @ (z - s) ** 2)
    dz = z[g.edge_u] - z[g.edge_v]
    disagreement = float(g.edge_w @ dz**2)
    polarization = float(k.k @ z**2)
    return conflict, disagreement, polarization


def conservation_residual_of(conflict, disagreement, polarization, k, s):
    """|C + 2D + P - sum k_i s_i^2|; the law holds for arbitrary s."""
    budget = float(k.k @ np.asarray(s, dtype=np.float64) ** 2)
    return abs(conflict + 2.0 * disagreement + polarization - budget), budget


def metrics_exact(
    g: Graph,
    k: StubbornnessVector,
    s: np.ndarray,
    cap: int = DENSE_CAP,
    solver_fallback: bool = False,
) -> MetricsReport:
    """Exact metrics from a direct equilibrium solve.

    Above the cap, a quasi-exact iterative solve at delta = 1e-12 is used
    if ``solver_fallback`` is set; otherwise the run is refused.
    """
    s = np.asarray(s, dtype=np.float64)
    t0 = time.perf_counter()
    if g.n <= cap:
        z = equilibrium(g, k, s, mode="exact", cap=cap)
        delta_used = 0.0
    elif solver_fallback:
        z = equilibrium(g, k, s, mode="iterative", delta=1e-12)
        delta_used = 1e-12
    else:
        raise SizeGuardError(
            f"exact metrics refused: n={g.n} exceeds cap {cap} and solver fallback is off"
        )
    solve_seconds = time.perf_counter() - t0

    t1 = time.perf_counter()
    conflict, disagreement, polarization = _metrics_from_z(g, k, s, z)
    pd_index = polarization + disagreement
    residual, budget = conservation_residual_of(conflict, disagreement, polarization, k, s)
    norms_seconds = time.perf_counter() - t1

    # Identity I_pd = sum k_i s_i z_i, a free cross-check of the solve.
    pd_identity = float(k.k @ (s * z))
    scale = max(abs(pd_index), abs(pd_identity), 1e-30)
    if abs(pd_index - pd_identity) > 1e-9 * scale:
        raise NumericalError(
            f"pd-index cross-check failed: {pd_index!r} vs {pd_identity!r}"
        )

    return MetricsReport(
        conflict=conflict,
        disagreement=disagreement,
        polarization=polarization,
        pd_index=pd_index,
        sum_z=float(z.sum()),
        weighted_sum_z=float(k.k @ z),
        mode="exact",
        delta_used=delta_used,
        eps_requested=0.0,
        conservation_residual=residual,
        certified=True,
        centered=False,
        graph_fingerprint=g.fingerprint(),
        n=g.n,
        m=g.m,
        solver_iterations=0,
        solve_seconds=solve_seconds,
        norms_seconds=norms_seconds,
    )


def approxim(g: Graph, k: StubbornnessVector, s: np.ndarray, eps: float) -> MetricsReport:
    """Approximate all four metrics from one tolerance-budgeted solve.

    The opinion vector is centered (weighted) first when its weighted sum is
    nonzero, since the error thresholds assume it vanishes.  One PCG solve
    of (L+K) q = Ks at delta = min(delta1, delta2, delta3) then yields
    conflict as ||K^{-1/2} L q||^2, disagreement as ||W^{1/2} B q||^2, and
    polarization as ||K^{1/2} q||^2.  A solve that cannot certify its
    tolerance is reported with ``certified=False``; the values are still the
    best attainable in double precision.
    """
    s = np.asarray(s, dtype=np.float64)
    if s.shape != (g.n,):
        raise GraphInputError("opinion vector length does not match graph")
    if not (0.0 < eps < 0.5):
        raise GraphInputError(f"eps must be in (0, 1/2), got {eps}")

    centered = False
    weighted_sum = float(k.k @ s)
    if abs(weighted_sum) > 1e-12 * g.n * k.k_max * max(1.0, float(np.abs(s).max(initial=0.0))):
        scale = float(np.abs(s).max(initial=0.0))
        s = center_opinions(s, k)
        centered = True
        # Centering a (numerically) constant vector leaves only rounding
        # residue; treat it as exactly zero.
        if float(np.abs(s).max(initial=0.0)) <= 1e-14 * scale:
            s = np.zeros(g.n)

    if float(np.linalg.norm(s)) == 0.0:
        return MetricsReport(
            conflict=0.0,
            disagreement=0.0,
            polarization=0.0,
            pd_index=0.0,
            sum_z=0.0,
            weighted_sum_z=0.0,
            mode="approx",
            delta_used=0.0,
            eps_requested=eps,
            conservation_residual=0.0,
            certified=True,
            centered=centered,
            graph_fingerprint=g.fingerprint(),
            n=g.n,
            m=g.m,
        )

    budget = delta_budget(g, k, s, eps)
    t = operator_matrix(g, k)
    t0 = time.perf_counter()
    res = solve(SolverRequest(matrix=t, b=k.k * s, delta=budget.delta, bounds=eigen_bounds(g, k)))
    solve_seconds = time.perf_counter() - t0
    q = res.y

    t1 = time.perf_counter()
    lq = laplacian_apply(g, q)
    conflict = float(np.sum(lq**2 / k.k))
    inc = incidence_view(g)
    disagreement = float(np.sum(inc.weighted_incidence_apply(q) ** 2))
    polarization = float(k.k @ q**2)
    pd_index = polarization + disagreement
    residual, _ = conservation_residual_of(conflict, disagreement, polarization, k, s)
    norms_seconds = time.perf_counter() - t1

    return MetricsReport(
        conflict=conflict,
        disagreement=disagreement,
        polarization=polarization,
        pd_index=pd_index,
        sum_z=float(q.sum()),
        weighted_sum_z=float(k.k @ q),
        mode="approx",
        delta_used=budget.delta,
        eps_requested=eps,
        conservation_residual=residual,
        certified=res.certified,
        centered=centered,
        graph_fingerprint=g.fingerprint(),
        n=g.n,
        m=g.m,
        solver_iterations=res.iterations,
        solve_seconds=solve_seconds,
        norms_seconds=norms_seconds,
    )


def conservation_check(report: MetricsReport, k: StubbornnessVector, s) -> tuple[float, float]:
    """Absolute and relative residual of C + 2D + P = sum k_i s_i^2."""
    residual, budget = conservation_residual_of(
        report.conflict, report.disagreement, report.polarization, k, s
    )
    relative = residual / budget if budget > 0.0 else 0.0
    return residual, relative
