"""Switching coherent-state protocol under an individual regular canonical attack.

Alice Gaussian-modulates coherent states with quadrature variance ``mu``,
Bob homodynes a random quadrature, and Eve runs the attack {tau, omega}: she
couples the signal to one half of a TMSV of variance ``omega`` via M_ae(tau),
stores everything and, once the basis is revealed, homodynes the matching
quadrature of both her modes.

Informations and rates are in bits. The base only rescales the curves, so
every threshold is base independent. ``mu = math.inf`` selects the
high-modulation limit throughout.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Iterable

from .canonical import snap_tau
from .dilation import SingularTransmissionError
from .gaussian_core import GaussianError

SHOT_NOISE = 1.0  # Delta, vacuum quadrature variance


class InvalidAttackError(GaussianError):
    pass


class InfiniteInformationError(GaussianError):
    """A conditional variance vanished, so an information diverges."""


def _log2(x: float) -> float:
    return math.log2(x)


def _check_tau(tau: float) -> float:
    if snap_tau(tau) in (0.0, 1.0):
        raise SingularTransmissionError(f"regular attacks need tau not in {{0, 1}}, got {tau!r}")
    return float(tau)


@dataclass(frozen=True)
class AttackParams:
    tau: float
    omega: float
    mu: float = math.inf

    def __post_init__(self):
        _check_tau(self.tau)
        if not self.omega >= 1.0:
            raise InvalidAttackError(f"omega must be >= 1, got {self.omega!r}")
        if not self.mu >= 0.0:
            raise InvalidAttackError(f"mu must be >= 0, got {self.mu!r}")

    @classmethod
    def from_excess_noise(cls, tau: float, epsilon: float, mu: float = math.inf) -> "AttackParams":
        """Attack whose environment yields excess noise ``epsilon`` at transmission ``tau``."""
        _check_tau(tau)
        if epsilon < 0:
            raise InvalidAttackError(f"excess noise must be >= 0, got {epsilon!r}")
        return cls(tau, 1.0 + epsilon * abs(tau / (1.0 - tau)), mu)

    @property
    def asymptotic(self) -> bool:
        return math.isinf(self.mu)

    @property
    def chi(self) -> float:
        return equivalent_noise(self.omega, self.tau)

    @property
    def epsilon(self) -> float:
        return excess_noise(self.omega, self.tau)


@dataclass(frozen=True)
class RateReport:
    tau: float
    omega: float
    mu: float
    V_B: float
    V_BgA: float
    V_E: float
    V_EgA: float
    V_BgE: float
    I_AB: float
    I_AE: float
    I_BE: float
    R_DR: float
    R_RR: float
    chi: float
    epsilon: float
    Delta: float = SHOT_NOISE

    def to_dict(self) -> dict:
        return asdict(self)


def bob_variances(p: AttackParams) -> tuple[float, float]:
    """Bob's quadrature variance V_B and its value V_B|A given Alice's amplitude."""
    t, u = abs(p.tau), abs(1.0 - p.tau)
    return t * (p.mu + 1.0) + u * p.omega, t + u * p.omega


def eve_variances(p: AttackParams) -> tuple[float, float, float]:
    """(V_E, V_E|A, V_B|E).

    Eve's variances are those of her output mode after she has conditioned on
    the homodyne outcome of her TMSV partner mode, which squeezes her input to
    variance 1/omega in the announced quadrature.
    """
    t, u = abs(p.tau), abs(1.0 - p.tau)
    v_e = u * (p.mu + 1.0) + t / p.omega
    v_ega = u + t / p.omega
    v_bge = 1.0 / (t / (p.mu + 1.0) + u * p.omega)
    return v_e, v_ega, v_bge


def equivalent_noise(omega: float, tau: float) -> float:
    _check_tau(tau)
    return abs((1.0 - tau) / tau) * omega


def total_noise(omega: float, tau: float) -> float:
    return SHOT_NOISE + equivalent_noise(omega, tau)


def excess_noise(omega: float, tau: float) -> float:
    _check_tau(tau)
    return abs((1.0 - tau) / tau) * (omega - 1.0)


def chi_from_epsilon(epsilon: float, tau: float) -> float:
    _check_tau(tau)
    return abs((1.0 - tau) / tau) + epsilon


def _half_log_ratio(v: float, v_cond: float) -> float:
    if v_cond <= 0.0:
        raise InfiniteInformationError("conditional variance is zero")
    return 0.5 * _log2(v / v_cond)


def mutual_informations(p: AttackParams) -> tuple[float, float, float]:
    """Exact finite-modulation (I_AB, I_AE, I_BE)."""
    if p.asymptotic or p.mu <= 0:
        raise InvalidAttackError("finite-modulation informations need 0 < mu < inf")
    v_b, v_bga = bob_variances(p)
    v_e, v_ega, v_bge = eve_variances(p)
    return (
        _half_log_ratio(v_b, v_bga),
        _half_log_ratio(v_e, v_ega),
        _half_log_ratio(v_b, v_bge),
    )


def asymptotic_informations(p: AttackParams, mu: float | None = None) -> tuple[float, float, float]:
    """High-modulation forms of (I_AB, I_AE, I_BE) evaluated at ``mu``.

    ``mu`` defaults to ``p.mu``; at ``mu = inf`` all three are infinite.
    """
    mu = p.mu if mu is None else mu
    chi = p.chi
    if math.isinf(mu):
        return math.inf, math.inf, math.inf
    return (
        0.5 * _log2(mu / (SHOT_NOISE + chi)),
        0.5 * _log2(mu / (1.0 + 1.0 / chi)),
        0.5 * _log2(p.tau ** 2 * chi * mu),
    )


def additive_informations(chi: float, mu: float) -> tuple[float, float]:
    """(I_AB, I_AE) of the additive model: noises chi (Bob) and 1/chi (Eve) plus shot noise."""
    i_ab = _half_log_ratio(mu + SHOT_NOISE + chi, SHOT_NOISE + chi)
    i_ae = _half_log_ratio(mu + SHOT_NOISE + 1.0 / chi, SHOT_NOISE + 1.0 / chi)
    return i_ab, i_ae


def dr_rate(chi: float) -> float:
    """Asymptotic direct-reconciliation rate; +inf for a noiseless channel."""
    if chi == 0.0:
        return math.inf
    return 0.5 * _log2((1.0 + 1.0 / chi) / (1.0 + chi))


def rr_rate(chi: float, tau: float) -> float:
    if chi == 0.0:
        return math.inf
    return -0.5 * _log2(tau ** 2 * chi * (1.0 + chi))


def key_rates(p: AttackParams) -> tuple[float, float]:
    """(R_DR, R_RR): closed asymptotic forms when ``p.mu`` is infinite."""
    if p.asymptotic:
        chi = p.chi
        return dr_rate(chi), rr_rate(chi, p.tau)
    i_ab, i_ae, i_be = mutual_informations(p)
    return i_ab - i_ae, i_ab - i_be


def rate_report(p: AttackParams) -> RateReport:
    v_b, v_bga = bob_variances(p)
    v_e, v_ega, v_bge = eve_variances(p)
    infos = asymptotic_informations(p) if p.asymptotic else mutual_informations(p)
    r_dr, r_rr = key_rates(p)
    return RateReport(
        p.tau, p.omega, p.mu, v_b, v_bga, v_e, v_ega, v_bge, *infos,
        R_DR=r_dr, R_RR=r_rr, chi=p.chi, epsilon=p.epsilon,
    )


def dr_threshold(tau: float) -> float:
    """Largest excess noise with a non-negative DR rate, i.e. chi(eps, tau) = 1."""
    _check_tau(tau)
    return max(0.0, 1.0 - abs(1.0 - tau) / abs(tau))


def rr_threshold_raw(tau: float) -> float:
    _check_tau(tau)
    a = abs(tau)
    return (math.sqrt(4.0 + tau * tau) - a - 2.0 * abs(1.0 - tau)) / (2.0 * a)


def rr_threshold(tau: float) -> float:
    """Largest excess noise with a non-negative RR rate (clamped at zero)."""
    return max(0.0, rr_threshold_raw(tau))


def rr_threshold_limits(at: float, h: float = 1e-7) -> tuple[float, float]:
    """Left and right limits of the RR threshold around ``at``."""
    return rr_threshold(at - h), rr_threshold(at + h)


@dataclass(frozen=True)
class ThresholdRow:
    tau: float
    eps_dr: float
    eps_rr: float
    excluded: bool = False


def threshold_sweep(tau_grid: Iterable[float]) -> list[ThresholdRow]:
    """One row per grid point, in grid order; tau = 0 or 1 rows are flagged ``excluded``."""
    rows = []
    for tau in tau_grid:
        tau = float(tau)
        if snap_tau(tau) in (0.0, 1.0):
            rows.append(ThresholdRow(tau, math.nan, math.nan, excluded=True))
        else:
            rows.append(ThresholdRow(tau, dr_threshold(tau), rr_threshold(tau)))
    return rows
