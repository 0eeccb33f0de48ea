import math

import numpy as np
import pytest

from gausschan.mc_oracle import (
    ConfigError,
    DegenerateCovariateError,
    SimConfig,
    compare_to_closed_form,
    estimate_variance,
    simulate_protocol,
    validate_grid,
)
from gausschan.dilation import SingularTransmissionError
from gausschan.qkd import AttackParams


class TestEstimateVariance:
    def test_constant(self):
        assert estimate_variance(np.full(100, 3.0)) == 0.0

    def test_standard_normal(self):
        x = np.random.default_rng(1).standard_normal(10**6)
        # sd of the sample variance is sqrt(2/n) ~ 1.4e-3
        assert abs(estimate_variance(x) - 1.0) <= 0.005

    def test_perfect_covariate(self):
        x = np.random.default_rng(2).standard_normal(1000)
        assert estimate_variance(3 * x + 1, x) == pytest.approx(0.0, abs=1e-20)

    def test_residual(self):
        rng = np.random.default_rng(3)
        x = rng.standard_normal(200_000)
        y = 2 * x + 0.5 * rng.standard_normal(200_000)
        assert estimate_variance(y, x) == pytest.approx(0.25, rel=0.02)

    def test_degenerate(self):
        with pytest.raises(DegenerateCovariateError):
            estimate_variance(np.arange(10.0), np.zeros(10))
        x = np.arange(10.0)
        with pytest.raises(DegenerateCovariateError):
            estimate_variance(x ** 2, np.column_stack([x, 2 * x]))

    def test_too_few(self):
        with pytest.raises(ValueError):
            estimate_variance([1.0])


class TestConfig:
    def test_sample_floor(self):
        with pytest.raises(ConfigError):
            SimConfig(AttackParams(0.5, 1.0, 0.0), n_samples=10)

    def test_needs_finite_mu(self):
        with pytest.raises(ConfigError):
            SimConfig(AttackParams(0.5, 1.0), n_samples=10**4)

    def test_singular_tau(self):
        with pytest.raises(SingularTransmissionError):
            SimConfig(AttackParams(1.0, 1.0, 1.0), n_samples=10**4)


def _within(report, n_se=4.0):
    return {c.quantity: c.passed for c in compare_to_closed_form(report, n_se)}


@pytest.mark.parametrize("quad", ["q", "p"])
def test_vacuum_point(quad):
    rep = simulate_protocol(SimConfig(AttackParams(0.5, 1.0, 0.0), 10**6, seed=11, quadrature=quad))
    assert abs(rep.estimates["V_B"] - 1.0) <= 3 * rep.stderr["V_B"]


@pytest.mark.parametrize(
    "tau,w,mu,vb,ve",
    [(0.5, 3.0, 8.0, 6.0, 4.5 + 0.5 / 3), (2.0, 3.0, 8.0, 21.0, 9 + 2 / 3)],
)
def test_closed_forms_within_3se(tau, w, mu, vb, ve):
    rep = simulate_protocol(SimConfig(AttackParams(tau, w, mu), 10**6, seed=5))
    assert abs(rep.estimates["V_B"] - vb) <= 3 * rep.stderr["V_B"]
    assert abs(rep.estimates["V_E"] - ve) <= 3 * rep.stderr["V_E"]


def test_bob_given_eve_large_mu():
    rep = simulate_protocol(SimConfig(AttackParams(0.5, 3.0, 1e6), 10**6, seed=8))
    assert all(_within(rep).values())
    assert rep.estimates["V_BgE"] == pytest.approx(2 / 3, rel=0.01)


def test_deterministic_and_worker_independent():
    cfg = SimConfig(AttackParams(-0.5, 3.0, 8.0), 20_000, seed=42)
    a = simulate_protocol(cfg)
    b = simulate_protocol(cfg)
    c = simulate_protocol(cfg, workers=4)
    assert a.to_dict() == b.to_dict() == c.to_dict()
    assert a.batch_estimates == c.batch_estimates


def test_seed_changes_result():
    p = AttackParams(-0.5, 3.0, 8.0)
    a = simulate_protocol(SimConfig(p, 20_000, seed=1))
    b = simulate_protocol(SimConfig(p, 20_000, seed=2))
    assert a.estimates != b.estimates


def test_stderr_shrinks_with_samples():
    p = AttackParams(0.5, 3.0, 8.0)
    # average over seeds: one batch-means stderr is itself noisy (19 dof)
    ratios = []
    for seed in range(8):
        small = simulate_protocol(SimConfig(p, 100_000, seed=seed)).stderr["V_B"]
        big = simulate_protocol(SimConfig(p, 200_000, seed=100 + seed)).stderr["V_B"]
        ratios.append(small / big)
    assert 1.15 <= float(np.mean(ratios)) <= 1.7  # sqrt(2) ~ 1.414


def test_plugin_informations():
    p = AttackParams(0.5, 1.0, 8.0)
    rep = simulate_protocol(SimConfig(p, 10**6, seed=3))
    # symmetric beam splitter with vacuum environment: I_AB = I_AE = 1/2 log2(10/2)
    assert rep.I_AB == pytest.approx(0.5 * math.log2(5), abs=0.01)
    assert rep.I_AE == pytest.approx(0.5 * math.log2(5), abs=0.01)


def test_validate_grid_record():
    grid = [{"tau": 0.5, "omega": 3.0, "mu": 8.0}, {"tau": -1.0, "omega": 1.0, "mu": 0.0}]
    rec = validate_grid(grid, 20_000, seed=7)
    assert rec["rng"]["bit_generator"] == "PCG64"
    assert len(rec["points"]) == 2
    assert {c["quantity"] for c in rec["points"][0]["checks"]} == {
        "V_B", "V_BgA", "V_E", "V_EgA", "V_BgE"}
    assert rec == validate_grid(grid, 20_000, seed=7)
