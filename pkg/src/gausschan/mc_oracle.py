"""Monte Carlo oracle for the individual regular attack.

Samples the linear quadrature dynamics directly: Alice's Gaussian amplitude
plus vacuum noise on mode ``a``, Eve's TMSV environment prepared in the
remote-preparation order (homodyne the partner mode first, then draw mode
``e`` from the conditional state), and the interaction M_ae(tau). Conditional
variances are least-squares residual variances of the recorded outcomes, so
nothing here uses the closed-form variance expressions it is checked against.

Each run is split into batches with independent child seeds spawned from one
``numpy.random.SeedSequence``; batch estimates give batch-means standard
errors and are merged in batch order, so results do not depend on the number
of worker threads.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .dilation import symplectic_interaction
from .gaussian_core import GaussianError, condition_on_homodyne, tmsv
from .qkd import AttackParams, bob_variances, eve_variances

MIN_SAMPLES = 1000
N_BATCHES = 20
BIT_GENERATOR = "PCG64"
QUANTITIES = ("V_B", "V_BgA", "V_E", "V_EgA", "V_BgE")


class ConfigError(GaussianError):
    pass


class DegenerateCovariateError(GaussianError):
    pass


@dataclass(frozen=True)
class SimConfig:
    attack: AttackParams
    n_samples: int
    seed: int = 0
    quadrature: str = "q"
    n_batches: int = N_BATCHES

    def __post_init__(self):
        if self.attack.asymptotic:
            raise ConfigError("Monte Carlo needs a finite modulation mu")
        if self.n_samples < MIN_SAMPLES:
            raise ConfigError(f"n_samples must be >= {MIN_SAMPLES}, got {self.n_samples}")
        if self.quadrature not in ("q", "p"):
            raise ConfigError(f"quadrature must be 'q' or 'p', got {self.quadrature!r}")
        if self.n_batches < 2 or self.n_samples // self.n_batches < 10:
            raise ConfigError("need at least 2 batches of at least 10 samples")

    def to_dict(self) -> dict:
        a = self.attack
        return {
            "tau": a.tau, "omega": a.omega, "mu": a.mu,
            "n_samples": self.n_samples, "seed": self.seed,
            "quadrature": self.quadrature, "n_batches": self.n_batches,
        }


def estimate_variance(samples, covariates=None) -> float:
    """Unbiased variance, or the residual variance after a least-squares fit.

    ``covariates`` is an (n,) or (n, k) array; an intercept is always fitted.
    Raises DegenerateCovariateError when the covariates are constant or
    linearly dependent.
    """
    y = np.asarray(samples, dtype=float)
    if y.ndim != 1 or y.size < 2:
        raise ValueError("need a 1-d array of at least 2 samples")
    if covariates is None:
        return float(np.var(y, ddof=1))
    x = np.asarray(covariates, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    n, k = x.shape
    if n != y.size:
        raise ValueError("samples and covariates differ in length")
    if n <= k + 1:
        raise ValueError("not enough samples for the regression")
    xc = x - x.mean(axis=0)
    yc = y - y.mean()
    scale = np.sqrt(np.sum(xc * xc, axis=0))
    if np.any(scale <= 1e-12 * max(1.0, float(np.max(np.abs(x))) * math.sqrt(n))):
        raise DegenerateCovariateError("a covariate is constant")
    xs = xc / scale
    if np.linalg.matrix_rank(xs) < k:
        raise DegenerateCovariateError("covariates are linearly dependent")
    coef, *_ = np.linalg.lstsq(xs, yc, rcond=None)
    resid = yc - xs @ coef
    return float(resid @ resid / (n - k - 1))


@dataclass(frozen=True)
class EmpiricalReport:
    config: SimConfig
    estimates: dict
    stderr: dict
    I_AB: float
    I_AE: float
    I_BE: float
    batch_estimates: dict = field(repr=False)

    def to_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "estimates": dict(self.estimates),
            "stderr": dict(self.stderr),
            "I_AB": self.I_AB, "I_AE": self.I_AE, "I_BE": self.I_BE,
        }


def _environment_sampler(omega: float, quadrature: str):
    """Conditional covariance factor and outcome gain for mode e after homodyning e~."""
    env = tmsv(omega)
    j = 0 if quadrature == "q" else 1
    cond0 = condition_on_homodyne(env, measured_mode=1, quadrature=quadrature, outcome=0.0)
    cond1 = condition_on_homodyne(env, measured_mode=1, quadrature=quadrature, outcome=1.0)
    gain = cond1.mean - cond0.mean
    chol = np.linalg.cholesky(cond0.cov)
    partner_var = env.cov[2 + j, 2 + j]
    return partner_var, gain, chol


def _simulate_batch(cfg: SimConfig, seed_seq: np.random.SeedSequence, n: int) -> dict:
    a = cfg.attack
    rng = np.random.Generator(np.random.PCG64(seed_seq))
    j = 0 if cfg.quadrature == "q" else 1
    M = symplectic_interaction(a.tau).matrix
    partner_var, gain, chol = _environment_sampler(a.omega, cfg.quadrature)

    alice = math.sqrt(a.mu) * rng.standard_normal((n, 2))
    mode_a = alice + rng.standard_normal((n, 2))
    partner = math.sqrt(partner_var) * rng.standard_normal(n)
    mode_e = partner[:, None] * gain + rng.standard_normal((n, 2)) @ chol.T
    out = np.hstack([mode_a, mode_e]) @ M.T

    x = alice[:, j]
    bob = out[:, j]
    eve = out[:, 2 + j]
    # with mu = 0 Alice's amplitude is the constant 0 and conditioning on it is a no-op
    if a.mu > 0:
        v_bga = estimate_variance(bob, x)
        v_ega = estimate_variance(eve, np.column_stack([partner, x]))
    else:
        v_bga = estimate_variance(bob)
        v_ega = estimate_variance(eve, partner)
    return {
        "V_B": estimate_variance(bob),
        "V_BgA": v_bga,
        "V_E": estimate_variance(eve, partner),
        "V_EgA": v_ega,
        "V_BgE": estimate_variance(bob, np.column_stack([eve, partner])),
    }


def _batch_sizes(n: int, k: int) -> list[int]:
    base, extra = divmod(n, k)
    return [base + (1 if i < extra else 0) for i in range(k)]


def simulate_protocol(cfg: SimConfig, workers: int = 1) -> EmpiricalReport:
    children = np.random.SeedSequence(cfg.seed).spawn(cfg.n_batches)
    sizes = _batch_sizes(cfg.n_samples, cfg.n_batches)
    args = list(zip(children, sizes))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            batches = list(pool.map(lambda cs: _simulate_batch(cfg, *cs), args))
    else:
        batches = [_simulate_batch(cfg, c, s) for c, s in args]

    per = {q: np.array([b[q] for b in batches]) for q in QUANTITIES}
    weights = np.array(sizes, dtype=float) / cfg.n_samples
    est = {q: float(weights @ per[q]) for q in QUANTITIES}
    se = {q: float(np.std(per[q], ddof=1) / math.sqrt(cfg.n_batches)) for q in QUANTITIES}

    def info(v, v_cond):
        return 0.5 * math.log2(v / v_cond) if v_cond > 0 else math.inf

    return EmpiricalReport(
        cfg, est, se,
        I_AB=info(est["V_B"], est["V_BgA"]),
        I_AE=info(est["V_E"], est["V_EgA"]),
        I_BE=info(est["V_B"], est["V_BgE"]),
        batch_estimates={q: per[q].tolist() for q in QUANTITIES},
    )


def closed_form_targets(p: AttackParams) -> dict:
    v_b, v_bga = bob_variances(p)
    v_e, v_ega, v_bge = eve_variances(p)
    return {"V_B": v_b, "V_BgA": v_bga, "V_E": v_e, "V_EgA": v_ega, "V_BgE": v_bge}


@dataclass(frozen=True)
class OracleCheck:
    quantity: str
    estimate: float
    stderr: float
    target: float
    n_se: float

    @property
    def z(self) -> float:
        diff = self.estimate - self.target
        if self.stderr == 0:
            return 0.0 if diff == 0 else math.inf
        return diff / self.stderr

    @property
    def passed(self) -> bool:
        return abs(self.estimate - self.target) <= self.n_se * self.stderr

    def to_dict(self) -> dict:
        return {
            "quantity": self.quantity, "estimate": self.estimate, "stderr": self.stderr,
            "target": self.target, "z": self.z, "n_se": self.n_se, "passed": self.passed,
        }


def compare_to_closed_form(report: EmpiricalReport, n_se: float = 4.0) -> list[OracleCheck]:
    targets = closed_form_targets(report.config.attack)
    return [
        OracleCheck(q, report.estimates[q], report.stderr[q], targets[q], n_se)
        for q in QUANTITIES
    ]


def rng_metadata() -> dict:
    return {
        "bit_generator": BIT_GENERATOR,
        "seeding": "numpy.random.SeedSequence(seed).spawn(n_batches)",
        "numpy_version": np.__version__,
    }


DEFAULT_GRID = [
    {"tau": tau, "omega": omega, "mu": mu}
    for tau in (-0.5, 0.5, 2.0)
    for omega in (1.0, 3.0, 9.0)
    for mu in (0.0, 8.0)
]


def validate_grid(grid, n_samples: int, seed: int, n_se: float = 4.0, workers: int = 1,
                  quadrature: str = "q") -> dict:
    """Run the oracle on every grid point and return a JSON-ready run record.

    Grid point ``i`` uses seed ``seed + i`` so points are independent and the
    record is reproducible from ``seed`` alone.
    """
    points = []
    all_passed = True
    for i, g in enumerate(grid):
        attack = AttackParams(float(g["tau"]), float(g["omega"]), float(g["mu"]))
        cfg = SimConfig(attack, n_samples, seed + i, quadrature)
        rep = simulate_protocol(cfg, workers=workers)
        checks = compare_to_closed_form(rep, n_se)
        ok = all(c.passed for c in checks)
        all_passed &= ok
        points.append({
            **rep.to_dict(),
            "targets": closed_form_targets(attack),
            "checks": [c.to_dict() for c in checks],
            "passed": ok,
        })
    return {"rng": rng_metadata(), "n_se": n_se, "points": points, "passed": all_passed}
