"""Phase-space algebra for Gaussian states and one-mode Gaussian channels.

Quadratures obey [q, p] = 2i, so the vacuum covariance matrix is the identity
and a coherent state |alpha> has mean (2 Re alpha, 2 Im alpha). Modes are
ordered (q1, p1, q2, p2, ...).

All objects are immutable: numpy arrays held by the dataclasses are copied on
construction and flagged read-only.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

SYMMETRY_TOL = 1e-9
PSD_TOL = 1e-9
SYMPLECTIC_TOL = 1e-9
SINGULAR_TOL = 1e-12


class GaussianError(ValueError):
    """Base class for errors raised by the phase-space layer."""


class InvalidStateError(GaussianError):
    pass


class InvalidChannelError(GaussianError):
    pass


class NotSymplecticError(GaussianError):
    pass


class DimensionError(GaussianError):
    pass


class SingularConditioningError(GaussianError):
    """The measured quadrature has (numerically) zero variance."""


def _frozen(a, ndim: int, name: str) -> np.ndarray:
    arr = np.array(a, dtype=float, copy=True)
    if arr.ndim != ndim:
        raise DimensionError(f"{name} must be {ndim}-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise GaussianError(f"{name} contains non-finite entries")
    arr.setflags(write=False)
    return arr


def omega_form(n_modes: int) -> np.ndarray:
    """Symplectic form: block diagonal with blocks [[0, 1], [-1, 0]]."""
    return np.kron(np.eye(n_modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def is_symmetric(m: np.ndarray, tol: float = SYMMETRY_TOL) -> bool:
    m = np.asarray(m)
    return m.shape[0] == m.shape[1] and bool(np.max(np.abs(m - m.T), initial=0.0) <= tol)


def is_psd(m: np.ndarray, tol: float = PSD_TOL) -> bool:
    sym = 0.5 * (np.asarray(m) + np.asarray(m).T)
    return bool(np.min(np.linalg.eigvalsh(sym)) >= -tol)


def is_physical_cov(cov: np.ndarray, tol: float = PSD_TOL) -> bool:
    """Check the uncertainty principle V + i Omega >= 0."""
    cov = np.asarray(cov, dtype=float)
    n = cov.shape[0] // 2
    herm = 0.5 * (cov + cov.T) + 1j * omega_form(n)
    return bool(np.min(np.linalg.eigvalsh(herm)) >= -tol)


def symplectic_residual(m: np.ndarray) -> float:
    """Max-norm of M Omega M^T - Omega."""
    m = np.asarray(m, dtype=float)
    om = omega_form(m.shape[0] // 2)
    return float(np.max(np.abs(m @ om @ m.T - om)))


def rotation(theta: float) -> np.ndarray:
    """Phase rotation of a single mode (a symplectic 2x2 matrix)."""
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, s], [-s, c]])


I2 = np.eye(2)
Z2 = np.diag([1.0, -1.0])
ZERO2 = np.zeros((2, 2))


@dataclass(frozen=True)
class GaussianState:
    """Gaussian state given by its covariance matrix and mean vector.

    The covariance is checked on construction for symmetry, positivity and
    the uncertainty principle ``V + i Omega >= 0``.
    """

    cov: np.ndarray
    mean: np.ndarray | None = None

    def __post_init__(self):
        cov = _frozen(self.cov, 2, "cov")
        if cov.shape[0] != cov.shape[1] or cov.shape[0] % 2:
            raise DimensionError(f"covariance must be 2n x 2n, got {cov.shape}")
        if not is_symmetric(cov):
            raise InvalidStateError("covariance matrix is not symmetric")
        if not is_psd(cov):
            raise InvalidStateError("covariance matrix is not positive semidefinite")
        if not is_physical_cov(cov):
            raise InvalidStateError("covariance violates the uncertainty principle")
        mean = np.zeros(cov.shape[0]) if self.mean is None else self.mean
        mean = _frozen(mean, 1, "mean")
        if mean.shape[0] != cov.shape[0]:
            raise DimensionError("mean length does not match covariance size")
        object.__setattr__(self, "cov", cov)
        object.__setattr__(self, "mean", mean)

    @property
    def n_modes(self) -> int:
        return self.cov.shape[0] // 2

    def purity(self) -> float:
        # 1 / sqrt(det V) under the vacuum = I convention
        return float(1.0 / np.sqrt(np.linalg.det(self.cov)))

    def mode_cov(self, mode: int) -> np.ndarray:
        return self.cov[2 * mode:2 * mode + 2, 2 * mode:2 * mode + 2]


def vacuum(n_modes: int = 1) -> GaussianState:
    return GaussianState(np.eye(2 * n_modes))


def thermal(nbar: float) -> GaussianState:
    """Single-mode thermal state with mean photon number ``nbar``."""
    if nbar < 0:
        raise InvalidStateError(f"mean photon number must be >= 0, got {nbar}")
    return GaussianState((2.0 * nbar + 1.0) * I2)


def coherent(alpha: complex) -> GaussianState:
    return GaussianState(I2, np.array([2.0 * alpha.real, 2.0 * alpha.imag]))


def tmsv_cov(omega: float) -> np.ndarray:
    """Covariance of a two-mode squeezed vacuum with local variance ``omega``."""
    if omega < 1.0:
        raise InvalidStateError(f"TMSV requires omega >= 1, got {omega}")
    c = np.sqrt(omega * omega - 1.0)
    return np.block([[omega * I2, c * Z2], [c * Z2, omega * I2]])


def tmsv(omega: float) -> GaussianState:
    return GaussianState(tmsv_cov(omega))


@dataclass(frozen=True)
class SymplecticMatrix:
    """Real 2n x 2n matrix with M Omega M^T = Omega (checked to 1e-9)."""

    matrix: np.ndarray

    def __post_init__(self):
        m = _frozen(self.matrix, 2, "matrix")
        if m.shape[0] != m.shape[1] or m.shape[0] % 2:
            raise DimensionError(f"symplectic matrix must be 2n x 2n, got {m.shape}")
        res = symplectic_residual(m)
        if res > SYMPLECTIC_TOL:
            raise NotSymplecticError(f"M Omega M^T deviates from Omega by {res:.3e}")
        object.__setattr__(self, "matrix", m)

    @property
    def n_modes(self) -> int:
        return self.matrix.shape[0] // 2

    def direct_sum(self, other: "SymplecticMatrix") -> "SymplecticMatrix":
        a, b = self.matrix, other.matrix
        out = np.zeros((a.shape[0] + b.shape[0],) * 2)
        out[:a.shape[0], :a.shape[0]] = a
        out[a.shape[0]:, a.shape[0]:] = b
        return SymplecticMatrix(out)

    @classmethod
    def identity(cls, n_modes: int) -> "SymplecticMatrix":
        return cls(np.eye(2 * n_modes))


@dataclass(frozen=True)
class GaussianChannel:
    """One-mode Gaussian channel V -> T V T^T + N, x -> T x + d.

    Construction only checks shapes, so that invalid parameter sets can still
    be inspected (see :meth:`validity`). Operations that need a physical
    channel call :meth:`check`.
    """

    T: np.ndarray
    N: np.ndarray
    d: np.ndarray | None = None

    def __post_init__(self):
        T = _frozen(self.T, 2, "T")
        N = _frozen(self.N, 2, "N")
        d = _frozen(np.zeros(2) if self.d is None else self.d, 1, "d")
        if T.shape != (2, 2) or N.shape != (2, 2) or d.shape != (2,):
            raise DimensionError("one-mode channel needs 2x2 T, N and a 2-vector d")
        object.__setattr__(self, "T", T)
        object.__setattr__(self, "N", N)
        object.__setattr__(self, "d", d)

    def validity(self) -> dict[str, bool]:
        """Individual validity predicates, keyed by name."""
        detT = float(np.linalg.det(self.T))
        detN = float(np.linalg.det(self.N))
        return {
            "N_symmetric": is_symmetric(self.N),
            "N_psd": is_psd(self.N),
            "complete_positivity": detN >= (detT - 1.0) ** 2 - PSD_TOL,
        }

    def is_valid(self) -> bool:
        return all(self.validity().values())

    def check(self) -> "GaussianChannel":
        failed = [k for k, ok in self.validity().items() if not ok]
        if failed:
            raise InvalidChannelError("invalid Gaussian channel: " + ", ".join(failed))
        return self


def apply_channel(ch: GaussianChannel, s: GaussianState) -> GaussianState:
    """Propagate a single-mode state through a one-mode Gaussian channel."""
    if s.n_modes != 1:
        raise DimensionError(f"apply_channel needs a single-mode state, got {s.n_modes} modes")
    ch.check()
    cov = ch.T @ s.cov @ ch.T.T + ch.N
    return GaussianState(0.5 * (cov + cov.T), ch.T @ s.mean + ch.d)


def conjugate(M: SymplecticMatrix, s: GaussianState) -> GaussianState:
    """Apply the linear quadrature map M: V -> M V M^T, x -> M x."""
    if M.matrix.shape[0] != s.cov.shape[0]:
        raise DimensionError(
            f"symplectic acts on {M.n_modes} modes but state has {s.n_modes}"
        )
    m = M.matrix
    cov = m @ s.cov @ m.T
    return GaussianState(0.5 * (cov + cov.T), m @ s.mean)


def tensor(s1: GaussianState, s2: GaussianState) -> GaussianState:
    n1, n2 = s1.cov.shape[0], s2.cov.shape[0]
    cov = np.zeros((n1 + n2, n1 + n2))
    cov[:n1, :n1] = s1.cov
    cov[n1:, n1:] = s2.cov
    return GaussianState(cov, np.concatenate([s1.mean, s2.mean]))


def tensor_all(states: Iterable[GaussianState]) -> GaussianState:
    states = list(states)
    out = states[0]
    for s in states[1:]:
        out = tensor(out, s)
    return out


def _quad_indices(modes: Sequence[int]) -> list[int]:
    return [i for m in modes for i in (2 * m, 2 * m + 1)]


def partial_trace(s: GaussianState, keep: Sequence[int]) -> GaussianState:
    """Reduced state on the modes listed in ``keep`` (in the given order)."""
    keep = list(keep)
    if not keep:
        raise DimensionError("keep must name at least one mode")
    if len(set(keep)) != len(keep) or any(not 0 <= k < s.n_modes for k in keep):
        raise DimensionError(f"bad mode indices {keep} for a {s.n_modes}-mode state")
    idx = _quad_indices(keep)
    return GaussianState(s.cov[np.ix_(idx, idx)], s.mean[idx])


def condition_on_homodyne(
    s: GaussianState,
    measured_mode: int,
    quadrature: str = "q",
    outcome: float = 0.0,
) -> GaussianState:
    """Conditional state of the other modes after homodyning one quadrature.

    With the covariance split into the unmeasured block ``A``, the measured
    mode block ``B`` and their correlations ``C``, the result has covariance
    ``A - C pi (pi B pi)^- pi C^T`` where ``pi`` projects onto the measured
    quadrature. The covariance does not depend on ``outcome``; the mean is
    shifted by the regression of the unmeasured quadratures on the outcome.
    """
    if s.n_modes < 2:
        raise DimensionError("homodyne conditioning needs at least two modes")
    if not 0 <= measured_mode < s.n_modes:
        raise DimensionError(f"mode {measured_mode} out of range")
    if quadrature not in ("q", "p"):
        raise ValueError(f"quadrature must be 'q' or 'p', got {quadrature!r}")
    rest = [m for m in range(s.n_modes) if m != measured_mode]
    ia = _quad_indices(rest)
    j = 2 * measured_mode + (0 if quadrature == "q" else 1)
    var = s.cov[j, j]
    if var < SINGULAR_TOL:
        raise SingularConditioningError(
            f"measured quadrature variance {var:.3e} is below {SINGULAR_TOL}"
        )
    c = s.cov[ia, j]
    cov = s.cov[np.ix_(ia, ia)] - np.outer(c, c) / var
    mean = s.mean[ia] + c * (outcome - s.mean[j]) / var
    return GaussianState(0.5 * (cov + cov.T), mean)
