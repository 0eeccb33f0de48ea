"""Canonical forms, dilations and individual-attack security of one-mode Gaussian channels."""

from .canonical import (
    CanonicalClass,
    CanonicalForm,
    ChannelInvariants,
    canonical_form,
    classify,
    invariants_of,
    is_regular,
)
from .cloner import ClonerParams, clone_output_cov, disturbance_product, ogc_equivalent_of
from .dilation import (
    is_strongly_antidegradable,
    is_weakly_degradable,
    physical_representation,
    symplectic_interaction,
    tmsv_purification,
)
from .gaussian_core import (
    GaussianChannel,
    GaussianState,
    SymplecticMatrix,
    apply_channel,
    condition_on_homodyne,
    conjugate,
    partial_trace,
    tensor,
)
from .qkd import AttackParams, dr_threshold, key_rates, rate_report, rr_threshold, threshold_sweep

__version__ = "0.1.0"
