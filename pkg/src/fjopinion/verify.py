"""Cross-module property suites driven by the ``verify`` CLI command.

Each check runs a named invariant over a batch of seeded random instances
and reports (name, passed, total).  ``full`` scale adds the spanning-forest
sweep certifying the fundamental matrix combinatorially.
"""

from __future__ import annotations

import numpy as np

from fjopinion import dynamics, forest, metrics
from fjopinion.generate import random_connected_gnp, random_gnp_graph
from fjopinion.graph import (
    StubbornnessVector,
    eigen_bounds,
    incidence_view,
    laplacian_apply,
    laplacian_matrix,
    operator_matrix,
)
from fjopinion.solver import SolverRequest, solve


def _instance(rng, n_max=40, connected=True):
    n = int(rng.integers(3, n_max + 1))
    seed = int(rng.integers(0, 2**31))
    if connected:
        g = random_connected_gnp(n, 0.25, seed)
    else:
        g = random_gnp_graph(n, 0.25, seed)
    k = StubbornnessVector.from_values(rng.uniform(0.5, 3.0, size=g.n))
    s = rng.uniform(-1.0, 1.0, size=g.n)
    return g, k, s


def check_laplacian_ones(rng, trials):
    passed = 0
    for _ in range(trials):
        g, _, _ = _instance(rng)
        if np.abs(laplacian_apply(g, np.ones(g.n))).max() <= 1e-12 * g.n * max(g.w_max, 1.0):
            passed += 1
    return passed


def check_incidence_composition(rng, trials):
    passed = 0
    for _ in range(trials):
        g, _, _ = _instance(rng)
        inc = incidence_view(g)
        ok = True
        for _ in range(5):
            x = rng.standard_normal(g.n)
            lx = laplacian_apply(g, x)
            scale = max(np.abs(lx).max(), 1.0)
            if np.abs(inc.laplacian_apply(x) - lx).max() > 1e-12 * scale:
                ok = False
        passed += ok
    return passed


def check_eigen_bounds(rng, trials):
    passed = 0
    for _ in range(trials):
        g, k, _ = _instance(rng)
        bounds = eigen_bounds(g, k)
        eig = np.linalg.eigvalsh(operator_matrix(g, k).toarray())
        if eig.min() >= bounds.lower - 1e-9 and eig.max() <= bounds.coarse_upper + 1e-9:
            passed += 1
    return passed


def check_row_substochastic(rng, trials):
    passed = 0
    for _ in range(trials):
        g, k, _ = _instance(rng)
        q = dynamics.ScalingDiagonal.of(g, k).q
        row_sums = q * g.degrees
        expected = g.degrees / (k.k + g.degrees)
        if np.abs(row_sums - expected).max() <= 1e-12 and row_sums.max() < 1.0:
            passed += 1
    return passed


def check_fixed_point(rng, trials):
    passed = 0
    for _ in range(trials):
        g, k, s = _instance(rng)
        z = dynamics.equilibrium(g, k, s)
        state = dynamics.step(g, k, dynamics.OpinionState(s=s, z=z))
        passed += np.abs(state.z - z).max() <= 1e-10
    return passed


def check_phi_row_stochastic(rng, trials):
    passed = 0
    for _ in range(trials):
        g, k, _ = _instance(rng)
        phi = dynamics.fundamental_matrix(g, k)
        rows_ok = np.abs(phi.sum(axis=1) - 1.0).max() <= 1e-10
        passed += rows_ok and phi.min() > 0.0
    return passed


def check_weighted_sum_preserved(rng, trials):
    passed = 0
    for _ in range(trials):
        g, k, s = _instance(rng)
        s0 = dynamics.center_opinions(s, k)
        z = dynamics.equilibrium(g, k, s0)
        passed += abs(float(k.k @ z)) <= 1e-9 * g.n * k.k_max
    return passed


def check_translation_covariance(rng, trials):
    passed = 0
    for _ in range(trials):
        g, k, s = _instance(rng)
        c = float(rng.uniform(-2.0, 2.0))
        z = dynamics.equilibrium(g, k, s)
        z_shift = dynamics.equilibrium(g, k, s + c)
        passed += np.abs(z_shift - (z + c)).max() <= 1e-10
    return passed


def check_rho_monotone(rng, trials):
    passed = 0
    for _ in range(trials):
        g, k, _ = _instance(rng)
        est = dynamics.spectral_radius(g, k, tol=1e-12)
        k2 = k.k.copy()
        i = int(rng.integers(g.n))
        k2[i] *= 1.5
        est2 = dynamics.spectral_radius(g, StubbornnessVector.from_values(k2), tol=1e-12)
        passed += est2.rho_max < est.rho_max - 1e-9
    return passed


def check_column_monotone(rng, trials):
    passed = 0
    for _ in range(trials):
        g, k, _ = _instance(rng, n_max=30)
        phi = dynamics.fundamental_matrix(g, k)
        v = int(rng.integers(g.n))
        k2 = k.k.copy()
        k2[v] *= 0.5
        phi2 = dynamics.fundamental_matrix(g, StubbornnessVector.from_values(k2))
        diff = phi2 - phi
        col_ok = np.all(diff[:, v] < -1e-12)
        off = np.delete(diff, v, axis=1)
        passed += col_ok and np.all(off > 1e-12)
    return passed


def check_uniform_k_conservation(rng, trials):
    passed = 0
    for _ in range(trials):
        g, _, s = _instance(rng)
        c = float(rng.uniform(0.3, 3.0))
        k = StubbornnessVector.uniform(g.n, c)
        z = dynamics.equilibrium(g, k, s)
        passed += abs(z.sum() - s.sum()) <= 1e-9 * max(1.0, abs(s.sum()))
    return passed


def check_geometric_decay(rng, trials):
    passed = 0
    for _ in range(trials):
        g, k, s = _instance(rng, n_max=20)
        _, trace = dynamics.simulate_until(g, k, s, z0=np.zeros(g.n), eps=1e-8)
        rho = dynamics.spectral_radius(g, k).rho_max
        ok = all(
            trace.f_norms[t + 1] <= rho * trace.f_norms[t] + 1e-9
            for t in range(len(trace.f_norms) - 1)
        )
        passed += ok
    return passed


def check_conservation_law(rng, trials):
    passed = 0
    for _ in range(trials):
        g, k, s = _instance(rng)
        report = metrics.metrics_exact(g, k, s)
        _, rel = metrics.conservation_check(report, k, s)
        passed += rel <= 1e-9
    return passed


def check_quadratic_forms(rng, trials):
    passed = 0
    for _ in range(trials):
        g, k, s = _instance(rng)
        report = metrics.metrics_exact(g, k, s)
        t_inv_ks = np.linalg.solve(operator_matrix(g, k).toarray(), k.k * s)
        lap = laplacian_matrix(g).toarray()
        c_quad = float(t_inv_ks @ (lap @ ((1.0 / k.k) * (lap @ t_inv_ks))))
        d_quad = float(t_inv_ks @ (lap @ t_inv_ks))
        p_quad = float(t_inv_ks @ (k.k * t_inv_ks))
        ok = (
            abs(c_quad - report.conflict) <= 1e-9 * max(1.0, abs(c_quad))
            and abs(d_quad - report.disagreement) <= 1e-9 * max(1.0, abs(d_quad))
            and abs(p_quad - report.polarization) <= 1e-9 * max(1.0, abs(p_quad))
        )
        passed += ok
    return passed


def check_approx_vs_exact(rng, trials):
    passed = 0
    for _ in range(trials):
        g, k, s = _instance(rng, n_max=60)
        s0 = dynamics.center_opinions(s, k)
        if np.linalg.norm(s0) == 0.0:
            passed += 1
            continue
        exact = metrics.metrics_exact(g, k, s0)
        approx = metrics.approxim(g, k, s0, eps=1e-6)
        ok = all(
            abs(a - e) <= 1e-6 * abs(e)
            for a, e in [
                (approx.conflict, exact.conflict),
                (approx.disagreement, exact.disagreement),
                (approx.polarization, exact.polarization),
                (approx.pd_index, exact.pd_index),
            ]
        )
        passed += ok
    return passed


def check_solver_contract(rng, trials):
    passed = 0
    for _ in range(trials):
        g, k, _ = _instance(rng, n_max=100)
        t = operator_matrix(g, k)
        b = rng.standard_normal(g.n)
        delta = float(10.0 ** rng.uniform(-8, -2))
        res = solve(SolverRequest(matrix=t, b=b, delta=delta, bounds=eigen_bounds(g, k)))
        x_star = np.linalg.solve(t.toarray(), b)
        err = res.y - x_star
        t_norm = lambda v: np.sqrt(float(v @ (t @ v)))
        passed += res.certified and t_norm(err) <= delta * t_norm(x_star) + 1e-14
    return passed


def check_forest_oracle(rng, trials):
    passed = 0
    for _ in range(trials):
        n = int(rng.integers(2, 8))
        g = random_connected_gnp(n, 0.4, int(rng.integers(0, 2**31)))
        k = StubbornnessVector.from_values(rng.uniform(0.5, 3.0, size=g.n))
        mapped = forest.MappedDigraph.of(g, k)
        enum = forest.enumerate_forests(mapped)
        ident_plus = np.eye(g.n) + mapped.laplacian()
        det = float(np.linalg.det(ident_plus))
        inv = np.linalg.inv(ident_plus)
        phi = enum.pair_weights / enum.total_weight
        ok = (
            abs(enum.total_weight - det) <= 1e-9 * abs(det)
            and np.abs(phi - inv).max() <= 1e-9
        )
        passed += ok
    return passed


SMALL_SUITE = [
    ("laplacian annihilates constants", check_laplacian_ones, 20),
    ("incidence composition equals laplacian", check_incidence_composition, 20),
    ("spectrum of L+K inside bounds", check_eigen_bounds, 20),
    ("update matrix row sub-stochastic", check_row_substochastic, 20),
    ("equilibrium is a fixed point", check_fixed_point, 20),
    ("fundamental matrix row-stochastic positive", check_phi_row_stochastic, 20),
    ("weighted opinion sum preserved", check_weighted_sum_preserved, 20),
    ("translation covariance", check_translation_covariance, 20),
    ("spectral radius decreases with stubbornness", check_rho_monotone, 10),
    ("column monotonicity of fundamental matrix", check_column_monotone, 10),
    ("uniform stubbornness conserves total opinion", check_uniform_k_conservation, 20),
    ("geometric decay of scaled error", check_geometric_decay, 5),
    ("conservation law", check_conservation_law, 20),
    ("quadratic forms match defining sums", check_quadratic_forms, 20),
    ("approximate metrics within eps of exact", check_approx_vs_exact, 5),
    ("solver energy-norm contract", check_solver_contract, 20),
]

FULL_EXTRA = [
    ("forest oracle matches dense inverse", check_forest_oracle, 50),
]


def run_suite(scale="small", seed=0):
    """Run every property; returns a list of (name, passed, total)."""
    checks = list(SMALL_SUITE)
    if scale == "full":
        checks += FULL_EXTRA
    results = []
    for name, fn, trials in checks:
        rng = np.random.default_rng(seed)
        results.append((name, int(fn(rng, trials)), trials))
    return results
