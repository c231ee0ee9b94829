import math

import numpy as np
import pytest

from conftest import dense_laplacian, make_instance
from fjopinion.dynamics import center_opinions
from fjopinion.errors import GraphInputError, SizeGuardError
from fjopinion.graph import StubbornnessVector, build_graph
from fjopinion.metrics import (
    MetricsReport,
    approxim,
    conservation_check,
    delta_budget,
    metrics_exact,
)


class TestExact:
    def test_symmetric_fixture(self, path2, k11):
        r = metrics_exact(path2, k11, np.array([1.0, -1.0]))
        assert r.conflict == pytest.approx(8.0 / 9.0, abs=1e-12)
        assert r.disagreement == pytest.approx(4.0 / 9.0, abs=1e-12)
        assert r.polarization == pytest.approx(2.0 / 9.0, abs=1e-12)
        assert r.pd_index == pytest.approx(2.0 / 3.0, abs=1e-12)
        assert r.conservation_residual <= 1e-12 * 2.0

    def test_heterogeneous_fixture(self, path2, k21):
        r = metrics_exact(path2, k21, np.array([1.0, -1.0]))
        assert r.conflict == pytest.approx(24.0 / 25.0, abs=1e-12)
        assert r.disagreement == pytest.approx(16.0 / 25.0, abs=1e-12)
        assert r.polarization == pytest.approx(19.0 / 25.0, abs=1e-12)
        assert r.pd_index == pytest.approx(7.0 / 5.0, abs=1e-12)
        # C + 2D + P = 3 = sum k_i s_i^2
        assert r.conflict + 2 * r.disagreement + r.polarization == pytest.approx(3.0)

    def test_zero_opinions(self, path2, k21):
        r = metrics_exact(path2, k21, np.zeros(2))
        assert (r.conflict, r.disagreement, r.polarization, r.pd_index) == (0, 0, 0, 0)

    def test_cap_refusal_without_fallback(self, path2, k21):
        with pytest.raises(SizeGuardError):
            metrics_exact(path2, k21, np.zeros(2), cap=1)

    def test_solver_fallback_above_cap(self, path2, k21):
        r = metrics_exact(path2, k21, np.array([1.0, -1.0]), cap=1, solver_fallback=True)
        assert r.conflict == pytest.approx(24.0 / 25.0, abs=1e-9)

    def test_pd_identity(self):
        rng = np.random.default_rng(53)
        for _ in range(10):
            g, k, s = make_instance(rng)
            r = metrics_exact(g, k, s)
            from fjopinion.dynamics import equilibrium

            z = equilibrium(g, k, s)
            assert r.pd_index == pytest.approx(float(k.k @ (s * z)), rel=1e-9)

    def test_quadratic_forms_match_defining_sums(self):
        rng = np.random.default_rng(59)
        for _ in range(10):
            g, k, s = make_instance(rng, n_max=60)
            r = metrics_exact(g, k, s)
            lap = dense_laplacian(g)
            t_inv_ks = np.linalg.solve(lap + np.diag(k.k), k.k * s)
            c_quad = t_inv_ks @ lap @ np.diag(1.0 / k.k) @ lap @ t_inv_ks
            d_quad = t_inv_ks @ lap @ t_inv_ks
            p_quad = t_inv_ks @ np.diag(k.k) @ t_inv_ks
            assert r.conflict == pytest.approx(c_quad, rel=1e-9, abs=1e-12)
            assert r.disagreement == pytest.approx(d_quad, rel=1e-9, abs=1e-12)
            assert r.polarization == pytest.approx(p_quad, rel=1e-9, abs=1e-12)


class TestDeltaBudget:
    # Frozen from an independent evaluation of the threshold formulas on
    # the 2-node unit instance with eps = 0.1 and |s| = sqrt(2).
    def test_first_threshold(self, path2, k11):
        b = delta_budget(path2, k11, np.array([1.0, -1.0]), eps=0.1)
        assert b.delta1 == pytest.approx(0.1 / (3 * math.sqrt(3.0)), rel=1e-12)
        assert b.delta1 == pytest.approx(0.019245008972987527, rel=1e-12)

    def test_third_threshold(self, path2, k11):
        b = delta_budget(path2, k11, np.array([1.0, -1.0]), eps=0.1)
        expected = 0.1 * math.sqrt(2.0) / (72.0 * math.sqrt(6.0))
        assert b.delta3 == pytest.approx(expected, rel=1e-12)
        assert b.delta3 == pytest.approx(0.0008018753739745458, rel=1e-12)

    def test_minimum_is_used(self, path2, k11):
        b = delta_budget(path2, k11, np.array([1.0, -1.0]), eps=0.1)
        assert b.delta == min(b.delta1, b.delta2, b.delta3)

    def test_zero_opinions_rejected(self, path2, k11):
        with pytest.raises(GraphInputError):
            delta_budget(path2, k11, np.zeros(2), eps=0.1)

    def test_eps_range_enforced(self, path2, k11):
        for eps in (0.0, 0.5, 1.0, -0.1):
            with pytest.raises(GraphInputError):
                delta_budget(path2, k11, np.array([1.0, -1.0]), eps=eps)


class TestApproxim:
    def test_precentered_two_node(self, path2, k21):
        s = np.array([1.0, -2.0])  # weighted sum 2 - 2 = 0
        r = approxim(path2, k21, s, eps=1e-6)
        assert not r.centered
        assert r.polarization == pytest.approx(24.0 / 25.0, rel=1e-6)

    def test_zero_after_centering_guard(self, path2, k21):
        r = approxim(path2, k21, np.full(2, 0.4), eps=1e-6)
        assert r.centered
        assert r.conflict == r.disagreement == r.polarization == 0.0

    def test_all_metrics_within_eps(self):
        rng = np.random.default_rng(61)
        for _ in range(5):
            g, k, s = make_instance(rng, n_max=80)
            s0 = center_opinions(s, k)
            exact = metrics_exact(g, k, s0)
            approx = approxim(g, k, s0, eps=1e-6)
            assert approx.conflict == pytest.approx(exact.conflict, rel=1e-6)
            assert approx.disagreement == pytest.approx(exact.disagreement, rel=1e-6)
            assert approx.polarization == pytest.approx(exact.polarization, rel=1e-6)
            assert approx.pd_index == pytest.approx(exact.pd_index, rel=1e-6)

    def test_auto_centering_is_reported(self, path2, k21):
        r = approxim(path2, k21, np.array([1.0, -1.0]), eps=1e-6)
        assert r.centered

    def test_eps_range_enforced(self, path2, k21):
        with pytest.raises(GraphInputError):
            approxim(path2, k21, np.array([1.0, -1.0]), eps=0.7)


class TestConservation:
    def test_symmetric_fixture_residual_zero(self, path2, k11):
        r = metrics_exact(path2, k11, np.array([1.0, -1.0]))
        residual, rel = conservation_check(r, k11, np.array([1.0, -1.0]))
        assert rel <= 1e-12

    def test_heterogeneous_fixture(self, path2, k21):
        r = metrics_exact(path2, k21, np.array([1.0, -1.0]))
        residual, rel = conservation_check(r, k21, np.array([1.0, -1.0]))
        assert rel <= 1e-12

    def test_random_graph(self):
        rng = np.random.default_rng(67)
        g, k, s = make_instance(rng, n_max=30)
        r = metrics_exact(g, k, s)
        _, rel = conservation_check(r, k, s)
        assert rel <= 1e-10

    def test_holds_without_centering(self):
        rng = np.random.default_rng(71)
        for _ in range(10):
            g, k, s = make_instance(rng)
            s_shifted = s + 0.5  # deliberately uncentered
            r = metrics_exact(g, k, s_shifted)
            _, rel = conservation_check(r, k, s_shifted)
            assert rel <= 1e-9


class TestReportSerialization:
    def test_round_trip(self, path2, k21):
        r = metrics_exact(path2, k21, np.array([1.0, -1.0]))
        again = MetricsReport.from_json(r.to_json())
        assert again == r

    def test_flat_keys(self, path2, k21):
        r = approxim(path2, k21, np.array([1.0, -2.0]), eps=1e-6)
        d = r.to_dict()
        assert all(not isinstance(v, (dict, list)) for v in d.values())
        assert d["mode"] == "approx" and d["eps_requested"] == 1e-6
