import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from scipy.optimize import brentq

from gausschan.dilation import SingularTransmissionError
from gausschan.qkd import (
    AttackParams,
    InvalidAttackError,
    additive_informations,
    asymptotic_informations,
    bob_variances,
    chi_from_epsilon,
    dr_rate,
    dr_threshold,
    equivalent_noise,
    eve_variances,
    excess_noise,
    key_rates,
    mutual_informations,
    rate_report,
    rr_rate,
    rr_threshold,
    rr_threshold_limits,
    rr_threshold_raw,
    threshold_sweep,
)


def oracle_rr_rate(eps, tau):
    # RR rate at high modulation, written out independently of the package
    chi = abs(1 - tau) / abs(tau) + eps
    return 0.5 * math.log2(1.0 / (tau * tau * chi * (1 + chi)))


def oracle_rr_threshold(tau):
    if oracle_rr_rate(0.0, tau) <= 0:
        return 0.0
    return brentq(oracle_rr_rate, 0.0, 100.0, args=(tau,), xtol=1e-15, rtol=1e-15)


def oracle_dr_threshold(tau):
    def f(eps):
        chi = abs(1 - tau) / abs(tau) + eps
        return (1 + 1 / chi) / (1 + chi) - 1
    if f(0.0) <= 0:
        return 0.0
    return brentq(f, 0.0, 100.0, xtol=1e-15, rtol=1e-15)


regular_tau = st.one_of(st.floats(-5, -1e-3), st.floats(1e-3, 1 - 1e-3), st.floats(1 + 1e-3, 5))


class TestParams:
    @pytest.mark.parametrize("tau", [0.0, 1.0])
    def test_singular_tau(self, tau):
        with pytest.raises(SingularTransmissionError):
            AttackParams(tau, 2.0)

    def test_bad_omega(self):
        with pytest.raises(InvalidAttackError):
            AttackParams(0.5, 0.9)

    def test_from_excess_noise(self):
        p = AttackParams.from_excess_noise(0.5, 2.0)
        assert p.omega == pytest.approx(3.0)
        assert p.epsilon == pytest.approx(2.0)


class TestVariances:
    def test_vacuum_bs(self):
        assert bob_variances(AttackParams(0.5, 1.0, 0.0)) == (1.0, 1.0)
        v_e, v_ega, v_bge = eve_variances(AttackParams(0.5, 1.0, 0.0))
        assert (v_e, v_bge) == (1.0, 1.0)

    def test_bob(self):
        assert bob_variances(AttackParams(0.5, 3.0, 8.0))[0] == pytest.approx(6.0)
        assert bob_variances(AttackParams(2.0, 1.0, 0.0))[0] == pytest.approx(3.0)

    def test_eve(self):
        v_e, _, _ = eve_variances(AttackParams(0.5, 3.0, 8.0))
        assert v_e == pytest.approx(4.5 + 0.5 / 3)

    def test_bob_given_eve_limit(self):
        _, _, v = eve_variances(AttackParams(0.5, 3.0, 1e6))
        assert v == pytest.approx(2 / 3, rel=1e-6)
        _, _, v_inf = eve_variances(AttackParams(0.5, 3.0))
        assert v_inf == pytest.approx(2 / 3)

    def test_bob_matches_dilation(self):
        from gausschan.canonical import regular_form
        from gausschan.dilation import physical_representation
        from gausschan.gaussian_core import GaussianState

        for tau, w, mu in [(2.0, 1.0, 0.0), (0.3, 5.0, 2.0), (-1.5, 2.0, 7.0)]:
            rep = physical_representation(regular_form(tau, (w - 1) / 2))
            out = rep.bob_state(GaussianState((mu + 1) * np.eye(2)))
            assert out.cov[0, 0] == pytest.approx(bob_variances(AttackParams(tau, w, mu))[0])


class TestNoise:
    def test_equivalent(self):
        assert equivalent_noise(1.0, 0.5) == 1.0
        assert equivalent_noise(3.0, 0.5) == 3.0
        assert equivalent_noise(5.0, 1 - 1e-8) < 1e-6

    def test_excess(self):
        assert excess_noise(1.0, 0.37) == 0.0
        assert excess_noise(3.0, 0.5) == pytest.approx(2.0)

    @settings(max_examples=200, deadline=None)
    @given(tau=regular_tau, w=st.floats(1, 100))
    def test_decomposition_roundtrip(self, tau, w):
        eps = excess_noise(w, tau)
        assert chi_from_epsilon(eps, tau) == pytest.approx(equivalent_noise(w, tau), rel=1e-12)
        p = AttackParams.from_excess_noise(tau, eps)
        assert p.omega == pytest.approx(w, rel=1e-9)


class TestInformations:
    @pytest.mark.parametrize("mu", [0.5, 8.0, 1e4])
    def test_symmetric_bs(self, mu):
        i_ab, i_ae, _ = mutual_informations(AttackParams(0.5, 1.0, mu))
        assert i_ab == pytest.approx(i_ae, rel=1e-12)

    def test_i_ab_asymptote(self):
        p = AttackParams(0.5, 3.0, 1e6)
        i_ab, _, _ = mutual_informations(p)
        assert i_ab == pytest.approx(0.5 * math.log2(1e6 / 4), abs=1e-5)
        assert asymptotic_informations(p)[0] == pytest.approx(0.5 * math.log2(1e6 / 4))

    def test_i_be_asymptote(self):
        p = AttackParams(0.5, 3.0, 1e6)
        finite = mutual_informations(p)[2]
        assert finite == pytest.approx(0.5 * math.log2(0.25 * 3 * 1e6), abs=1e-3)

    def test_needs_finite_mu(self):
        with pytest.raises(InvalidAttackError):
            mutual_informations(AttackParams(0.5, 3.0))
        with pytest.raises(InvalidAttackError):
            mutual_informations(AttackParams(0.5, 3.0, 0.0))

    @pytest.mark.parametrize("tau,w", [(0.5, 3.0), (0.2, 1.0), (1.7, 2.0), (-0.8, 4.0)])
    def test_asymptotic_convergence(self, tau, w):
        pf = AttackParams(tau, w, 1e8)
        r_dr, r_rr = key_rates(pf)
        a_dr, a_rr = key_rates(AttackParams(tau, w))
        assert abs(r_dr - a_dr) <= 1e-6
        assert abs(r_rr - a_rr) <= 1e-6

    @pytest.mark.parametrize("tau,w", [(0.5, 3.0), (0.75, 9.0), (2.0, 1.5), (-1.0, 2.0)])
    def test_additive_description(self, tau, w):
        p = AttackParams(tau, w, 1e8)
        i_ab, i_ae, _ = mutual_informations(p)
        j_ab, j_ae = additive_informations(p.chi, p.mu)
        assert abs(i_ab - j_ab) <= 1e-6
        assert abs(i_ae - j_ae) <= 1e-6


class TestRates:
    def test_dr_zero_at_chi_one(self):
        assert dr_rate(1.0) == 0.0

    def test_rr_at_half(self):
        assert rr_rate(1.0, 0.5) == pytest.approx(0.5)

    def test_rr_zero(self):
        # tau^2 chi (1 + chi) = 1 at chi = 1, tau = 1/sqrt(2)
        assert rr_rate(1.0, 1 / math.sqrt(2)) == pytest.approx(0.0, abs=1e-15)

    def test_noiseless_guard(self):
        assert dr_rate(0.0) == math.inf

    def test_negative_dr_for_noisy(self):
        assert key_rates(AttackParams(0.5, 7.0))[0] < 0

    def test_report_asymptotic(self):
        rep = rate_report(AttackParams(0.5, 1.0))
        assert rep.R_DR == 0.0
        assert rep.R_RR == pytest.approx(0.5)
        assert math.isinf(rep.V_B) and rep.V_BgA == 1.0
        assert rep.Delta == 1.0

    def test_report_finite(self):
        rep = rate_report(AttackParams(0.5, 3.0, 8.0))
        assert rep.V_B == pytest.approx(6.0)
        assert rep.R_DR == pytest.approx(rep.I_AB - rep.I_AE)


class TestThresholds:
    @pytest.mark.parametrize("tau,expected", [(0.5, 0.0), (2.0, 0.5), (-1.0, 0.0), (0.75, 2 / 3)])
    def test_dr(self, tau, expected):
        assert dr_threshold(tau) == pytest.approx(expected, abs=1e-15)
        assert dr_threshold(tau) == pytest.approx(oracle_dr_threshold(tau), abs=1e-9)

    def test_rr_half(self):
        assert rr_threshold(0.5) == pytest.approx(math.sqrt(17) / 2 - 1.5, abs=1e-15)
        assert rr_threshold(0.5) == pytest.approx(oracle_rr_threshold(0.5), abs=1e-9)

    def test_rr_small_tau(self):
        assert rr_threshold(1e-6) == pytest.approx(0.5, abs=1e-6)
        assert rr_threshold(1e-6) == pytest.approx(oracle_rr_threshold(1e-6), abs=1e-9)

    def test_rr_closes_at_three_halves(self):
        assert rr_threshold(1.5) == 0.0
        assert rr_threshold(1.5 - 1e-6) > 0
        assert oracle_rr_threshold(1.5 + 1e-6) == 0.0

    def test_rr_at_two_is_clamped(self):
        # the raw expression is negative past tau = 3/2
        assert rr_threshold_raw(2.0) == pytest.approx((math.sqrt(8) - 4) / 4)
        assert rr_threshold(2.0) == 0.0

    @pytest.mark.parametrize("tau", np.linspace(-3, 3, 61))
    def test_rr_matches_root_find(self, tau):
        if abs(tau) < 1e-9 or abs(tau - 1) < 1e-9:
            return
        assert rr_threshold(tau) == pytest.approx(oracle_rr_threshold(tau), abs=1e-9)

    def test_one_sided_limits(self):
        left, right = rr_threshold_limits(0.0)
        assert left == 0.0 and right == pytest.approx(0.5, abs=1e-6)
        left, right = rr_threshold_limits(1.0)
        golden = (math.sqrt(5) - 1) / 2
        assert left == pytest.approx(golden, abs=1e-6) and right == pytest.approx(golden, abs=1e-6)

    def test_sweep(self):
        rows = threshold_sweep([0.25, 0.5, 0.75])
        assert [r.eps_dr for r in rows] == pytest.approx([0.0, 0.0, 2 / 3])
        assert threshold_sweep([]) == []

    def test_sweep_single_amp(self):
        (row,) = threshold_sweep([2.0])
        assert (row.eps_dr, row.eps_rr) == (0.5, 0.0)

    def test_sweep_flags_singular(self):
        rows = threshold_sweep([0.0, 0.5, 1.0, 1 + 1e-12])
        assert [r.excluded for r in rows] == [True, False, True, True]
        assert math.isnan(rows[0].eps_dr)


@settings(max_examples=500, deadline=None)
@given(tau=st.floats(-5, 0.5), eps=st.floats(0, 50))
def test_dr_insecure_when_strongly_antidegradable(tau, eps):
    assume(abs(tau) > 1e-6)
    assert key_rates(AttackParams.from_excess_noise(tau, eps))[0] <= 0


@settings(max_examples=500, deadline=None)
@given(tau=st.floats(1e-4, 0.5), frac=st.floats(0, 0.999))
def test_rr_secure_below_threshold(tau, frac):
    eps = frac * rr_threshold(tau)
    assert key_rates(AttackParams.from_excess_noise(tau, eps))[1] > 0


@settings(max_examples=500, deadline=None)
@given(tau=st.floats(1 + 1e-6, 20))
def test_dr_beats_rr_for_amplifiers(tau):
    assert dr_threshold(tau) >= rr_threshold(tau)


@settings(max_examples=300, deadline=None)
@given(tau=st.one_of(st.floats(0.5 + 1e-6, 1 - 1e-6), st.floats(1 + 1e-6, 20)))
def test_dr_rate_vanishes_at_threshold(tau):
    eps = dr_threshold(tau)
    assert abs(key_rates(AttackParams.from_excess_noise(tau, eps))[0]) <= 1e-9
