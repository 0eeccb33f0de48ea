"""Symplectic invariants and canonical forms of one-mode Gaussian channels.

A channel G(T, N, d) is classified by its generalized transmission
``tau = det T``, its rank ``r = rk(T) rk(N) / 2`` and its temperature
``nbar``. The pair (tau, r) picks the class; nbar completes the canonical
form C(tau, r, nbar) with diagonal matrices (Tc, Nc):

======  =====  ========  ===============  ==========================
tau     r      class     Tc               Nc
======  =====  ========  ===============  ==========================
0       0      A1        0                (2 nbar + 1) I
0       1      A2        (I + Z) / 2      (2 nbar + 1) I
1       1      B1        I                (I - Z) / 2
1       2      B2        I                nbar I
1       0      B2Id      I                0
(0,1)   2      C_Att     sqrt(tau) I      (1 - tau)(2 nbar + 1) I
>1      2      C_Amp     sqrt(tau) I      (tau - 1)(2 nbar + 1) I
<0      2      D         sqrt(-tau) Z     (1 - tau)(2 nbar + 1) I
======  =====  ========  ===============  ==========================
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .gaussian_core import I2, Z2, ZERO2, GaussianChannel, GaussianError

RANK_RTOL = 1e-8
TAU_SNAP = 1e-9
NBAR_FLOOR = 1e-9


class UnclassifiableChannelError(GaussianError):
    """The (tau, r) pair does not appear in the classification table."""


class CanonicalClass(str, enum.Enum):
    A1 = "A1"
    A2 = "A2"
    B1 = "B1"
    B2 = "B2"
    B2Id = "B2Id"
    C_Att = "C_Att"
    C_Amp = "C_Amp"
    D = "D"

    @property
    def is_regular(self) -> bool:
        return self in (CanonicalClass.C_Att, CanonicalClass.C_Amp, CanonicalClass.D)


@dataclass(frozen=True)
class ChannelInvariants:
    tau: float
    rank_r: int
    nbar: float

    def __post_init__(self):
        if self.rank_r not in (0, 1, 2):
            raise UnclassifiableChannelError(f"rank must be 0, 1 or 2, got {self.rank_r}")
        if not self.nbar >= 0:
            raise UnclassifiableChannelError(f"temperature must be >= 0, got {self.nbar}")

    @property
    def omega(self) -> float:
        return 2.0 * self.nbar + 1.0


@dataclass(frozen=True)
class CanonicalForm:
    cls: CanonicalClass
    invariants: ChannelInvariants
    Tc: np.ndarray
    Nc: np.ndarray

    def as_channel(self) -> GaussianChannel:
        return GaussianChannel(self.Tc, self.Nc)

    @property
    def tau(self) -> float:
        return self.invariants.tau


def numeric_rank(m: np.ndarray) -> int:
    """Rank with singular values below 1e-8 * max(s_max, 1) treated as zero."""
    s = np.linalg.svd(np.asarray(m, dtype=float), compute_uv=False)
    cutoff = RANK_RTOL * max(float(s[0]) if s.size else 0.0, 1.0)
    return int(np.sum(s > cutoff))


def snap_tau(tau: float) -> float:
    for singular in (0.0, 1.0):
        if abs(tau - singular) <= TAU_SNAP:
            return singular
    return float(tau)


def class_of(tau: float, rank_r: int) -> CanonicalClass:
    """Table lookup from (tau, r); tau is snapped to 0 or 1 when within 1e-9."""
    tau = snap_tau(tau)
    if tau == 0.0:
        table = {0: CanonicalClass.A1, 1: CanonicalClass.A2}
    elif tau == 1.0:
        table = {0: CanonicalClass.B2Id, 1: CanonicalClass.B1, 2: CanonicalClass.B2}
    elif rank_r == 2:
        if tau < 0:
            return CanonicalClass.D
        return CanonicalClass.C_Att if tau < 1 else CanonicalClass.C_Amp
    else:
        table = {}
    try:
        return table[rank_r]
    except KeyError:
        raise UnclassifiableChannelError(
            f"no canonical class for tau={tau!r}, r={rank_r!r}"
        ) from None


def _nbar_from_detN(cls: CanonicalClass, tau: float, detN: float) -> float:
    root = np.sqrt(max(detN, 0.0))
    if cls in (CanonicalClass.A1, CanonicalClass.A2):
        nbar = (root - 1.0) / 2.0
    elif cls is CanonicalClass.B2:
        nbar = root
    elif cls.is_regular:
        nbar = (root / abs(1.0 - tau) - 1.0) / 2.0
    else:
        nbar = 0.0
    # equality branch of det N >= (tau - 1)^2 may round slightly negative
    if -NBAR_FLOOR <= nbar < 0:
        nbar = 0.0
    return float(nbar)


def invariants_of(ch: GaussianChannel) -> ChannelInvariants:
    """Compute {tau, r, nbar} for a valid channel."""
    ch.check()
    tau = snap_tau(float(np.linalg.det(ch.T)))
    prod = numeric_rank(ch.T) * numeric_rank(ch.N)
    if prod % 2:
        raise UnclassifiableChannelError(f"rk(T) rk(N) = {prod} gives a half-integer rank")
    rank_r = prod // 2
    cls = class_of(tau, rank_r)
    nbar = _nbar_from_detN(cls, tau, float(np.linalg.det(ch.N)))
    return ChannelInvariants(tau, rank_r, nbar)


def classify(ch: GaussianChannel) -> CanonicalClass:
    inv = invariants_of(ch)
    return class_of(inv.tau, inv.rank_r)


def canonical_form(inv: ChannelInvariants) -> CanonicalForm:
    """Build the diagonal representative (Tc, Nc) of the table row for ``inv``."""
    tau = snap_tau(inv.tau)
    cls = class_of(tau, inv.rank_r)
    w = inv.omega
    if cls in (CanonicalClass.B1, CanonicalClass.B2Id) and inv.nbar != 0:
        raise UnclassifiableChannelError(f"class {cls.value} has no temperature, got nbar={inv.nbar}")
    if cls is CanonicalClass.A1:
        Tc, Nc = ZERO2, w * I2
    elif cls is CanonicalClass.A2:
        Tc, Nc = (I2 + Z2) / 2, w * I2
    elif cls is CanonicalClass.B1:
        Tc, Nc = I2, (I2 - Z2) / 2
    elif cls is CanonicalClass.B2:
        if inv.nbar == 0:
            raise UnclassifiableChannelError("class B2 needs nbar > 0 (nbar = 0 is B2Id)")
        Tc, Nc = I2, inv.nbar * I2
    elif cls is CanonicalClass.B2Id:
        Tc, Nc = I2, ZERO2
    elif cls is CanonicalClass.C_Att:
        Tc, Nc = np.sqrt(tau) * I2, (1 - tau) * w * I2
    elif cls is CanonicalClass.C_Amp:
        Tc, Nc = np.sqrt(tau) * I2, (tau - 1) * w * I2
    else:
        Tc, Nc = np.sqrt(-tau) * Z2, (1 - tau) * w * I2
    Tc = np.array(Tc, dtype=float)
    Nc = np.array(Nc, dtype=float)
    Tc.setflags(write=False)
    Nc.setflags(write=False)
    return CanonicalForm(cls, ChannelInvariants(tau, inv.rank_r, inv.nbar), Tc, Nc)


def is_regular(inv: ChannelInvariants) -> bool:
    tau = snap_tau(inv.tau)
    return inv.rank_r == 2 and tau not in (0.0, 1.0)


def regular_form(tau: float, nbar: float) -> CanonicalForm:
    """Shortcut for the class C / D form C(tau, 2, nbar)."""
    return canonical_form(ChannelInvariants(tau, 2, nbar))
