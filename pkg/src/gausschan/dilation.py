"""Single-mode dilations of the regular canonical forms and their degradability.

The regular forms C(tau, 2, nbar) (classes C and D) are realized by a 4x4
symplectic interaction M_ae(tau) between the signal mode ``a`` and one
environment mode ``e`` held in a thermal state of variance
``omega = 2 nbar + 1``. Purifying that thermal mode with a partner ``e~``
gives a two-mode squeezed vacuum environment and a 6x6 interaction
``M_ae + I`` (identity on ``e~``).

Output mode order is (b, c) for the 4x4 picture and (b, c, c~) for the 6x6
purification.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .canonical import TAU_SNAP, CanonicalForm, is_regular, snap_tau
from .gaussian_core import (
    GaussianError,
    GaussianState,
    SymplecticMatrix,
    conjugate,
    partial_trace,
    tensor,
    thermal,
    tmsv,
)

BOB, CHARLIE, PARTNER = 0, 1, 2


class SingularTransmissionError(GaussianError):
    """tau = 0 or tau = 1, where M_ae(tau) is not defined."""


class UnsupportedClassError(GaussianError):
    """Requested a single-mode dilation of a non-regular canonical form."""


def _sign(x: float) -> float:
    return float(np.sign(x))


def symplectic_interaction(tau: float) -> SymplecticMatrix:
    """Beam splitter (0 < tau < 1), amplifier (tau > 1) or its conjugate (tau < 0).

    Raises:
        SingularTransmissionError: if tau is within 1e-9 of 0 or 1.
    """
    if snap_tau(tau) in (0.0, 1.0):
        raise SingularTransmissionError(f"M_ae(tau) undefined at tau={tau!r}")
    t = np.sqrt(abs(tau))
    u = np.sqrt(abs(1.0 - tau))
    m = np.array([
        [t, 0.0, u, 0.0],
        [0.0, _sign(tau) * t, 0.0, _sign(1.0 - tau) * u],
        [_sign(tau - 1.0) * u, 0.0, _sign(tau) * t, 0.0],
        [0.0, -u, 0.0, t],
    ])
    return SymplecticMatrix(m)


def _require_regular(form: CanonicalForm) -> None:
    if not is_regular(form.invariants):
        raise UnsupportedClassError(
            f"class {form.cls.value} has no single-mode physical representation"
        )


@dataclass(frozen=True)
class PhysicalRepresentation:
    """Interaction ``M`` on modes (a, e) plus the thermal environment state."""

    M: SymplecticMatrix
    env: GaussianState

    @property
    def omega(self) -> float:
        return float(self.env.cov[0, 0])

    def output_state(self, s_in: GaussianState) -> GaussianState:
        """Joint (b, c) state for a single-mode input."""
        return conjugate(self.M, tensor(s_in, self.env))

    def bob_state(self, s_in: GaussianState) -> GaussianState:
        return partial_trace(self.output_state(s_in), [BOB])

    def charlie_state(self, s_in: GaussianState) -> GaussianState:
        return partial_trace(self.output_state(s_in), [CHARLIE])


@dataclass(frozen=True)
class TmsvPurification:
    """Interaction ``M_ae + I`` on (a, e, e~) with a TMSV environment on (e, e~)."""

    M_ext: SymplecticMatrix
    env: GaussianState

    @property
    def omega(self) -> float:
        return float(self.env.cov[0, 0])

    def output_state(self, s_in: GaussianState) -> GaussianState:
        """Joint (b, c, c~) state; pure whenever ``s_in`` is pure."""
        return conjugate(self.M_ext, tensor(s_in, self.env))

    def thermal_environment(self) -> GaussianState:
        return partial_trace(self.env, [0])


def physical_representation(form: CanonicalForm) -> PhysicalRepresentation:
    _require_regular(form)
    return PhysicalRepresentation(symplectic_interaction(form.tau), thermal(form.invariants.nbar))


def tmsv_purification(form: CanonicalForm) -> TmsvPurification:
    _require_regular(form)
    M = symplectic_interaction(form.tau).direct_sum(SymplecticMatrix.identity(1))
    return TmsvPurification(M, tmsv(form.invariants.omega))


# Both predicates hold at tau = 1/2; compared with a 1e-9 slack so that
# e.g. 0.1 + 0.4 still counts as the boundary.
def is_strongly_antidegradable(form: CanonicalForm) -> bool:
    _require_regular(form)
    return form.tau <= 0.5 + TAU_SNAP


def is_weakly_degradable(form: CanonicalForm) -> bool:
    _require_regular(form)
    return form.tau >= 0.5 - TAU_SNAP
