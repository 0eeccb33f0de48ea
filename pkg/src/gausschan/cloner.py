"""Covariance-level optimal Gaussian cloner and its link to regular attacks.

Each clone ``k`` of the cloner is the input displaced by a Gaussian random
amplitude; in quadrature units this adds ``chi_k`` to both quadrature
variances. Optimality means the two clone noises saturate
``chi_b * chi_c = 1``. With ``chi_b = nbar`` clone b is exactly the
additive-noise channel C(1, 2, nbar).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .gaussian_core import I2, GaussianError, is_physical_cov
from .qkd import SHOT_NOISE, AttackParams, additive_informations, asymptotic_informations


@dataclass(frozen=True)
class ClonerParams:
    chi_b: float
    chi_c: float = field(init=False)

    def __post_init__(self):
        if not (self.chi_b > 0 and math.isfinite(self.chi_b)):
            raise GaussianError(f"cloning noise must be positive and finite, got {self.chi_b!r}")
        object.__setattr__(self, "chi_c", 1.0 / self.chi_b)

    def noise(self, which: str) -> float:
        if which == "b":
            return self.chi_b
        if which == "c":
            return self.chi_c
        raise ValueError(f"clone must be 'b' or 'c', got {which!r}")


def clone_output_cov(p: ClonerParams, which: str, V_in: np.ndarray) -> np.ndarray:
    V_in = np.asarray(V_in, dtype=float)
    if V_in.shape != (2, 2) or not is_physical_cov(V_in):
        raise GaussianError("clone input must be a physical single-mode covariance")
    return V_in + p.noise(which) * I2


def disturbance_product(p: ClonerParams) -> float:
    """V_B|A * V_E|A = (Delta + chi_b)(Delta + chi_c)."""
    return (SHOT_NOISE + p.chi_b) * (SHOT_NOISE + p.chi_c)


def ogc_equivalent_of(p: AttackParams) -> ClonerParams:
    """Cloner reproducing the attack's DR informations at high modulation.

    Only the Alice-Bob and Alice-Eve channels are matched; nothing is
    claimed about reverse reconciliation.
    """
    return ClonerParams(p.chi)


@dataclass(frozen=True)
class EquivalenceCheck:
    chi: float
    attack_I_AB: float
    attack_I_AE: float
    cloner_I_AB: float
    cloner_I_AE: float

    @property
    def max_abs_diff(self) -> float:
        return max(abs(self.attack_I_AB - self.cloner_I_AB), abs(self.attack_I_AE - self.cloner_I_AE))


def dr_equivalence(p: AttackParams, mu: float = 1e8) -> EquivalenceCheck:
    """Compare the attack's asymptotic I_AB, I_AE with its cloner's additive model at ``mu``."""
    c = ogc_equivalent_of(p)
    i_ab, i_ae, _ = asymptotic_informations(p, mu)
    j_ab, j_ae = additive_informations(c.chi_b, mu)
    return EquivalenceCheck(c.chi_b, i_ab, i_ae, j_ab, j_ae)
