"""Degree of unitarity of quantum processes.

Exact values for channels with orthogonal mixed-unitary structure,
certified lower/upper bounds for arbitrary channels, a unitary-group
optimizer, fidelity measures, and reproducible random-channel studies.
"""

__version__ = "0.1.0"

from .channels import (
    CanonicalKraus,
    ChannelValidationError,
    ChiMatrix,
    KrausChannel,
    MixedUnitaryForm,
    ValidationReport,
    apply_channel,
    as_mixed_unitary,
    canonicalize,
    chi_to_kraus,
    compose,
    convex_unitary_mixture,
    identity_channel,
    kraus_to_chi,
    random_channel,
    require_trace_preserving,
    standard_channel,
    unitary_channel,
    validate,
)
from .du import (
    BoundReport,
    DuResult,
    OrthogonalityError,
    du,
    du_bounds,
    du_exact_mixed_unitary,
    du_optimize,
)
from .fidelity import (
    FidelityPair,
    MonteCarloFidelity,
    average_fidelity,
    average_fidelity_mc,
    average_from_process,
    fidelity_pair,
    process_fidelity,
    process_fidelity_chi,
    process_from_average,
)
from .harness import (
    DuHistogram,
    Table1Report,
    TightnessRecord,
    TightnessResult,
    Trajectory,
    WitnessReport,
    closed_form_du,
    run_distribution,
    run_table1,
    run_tightness,
    run_witness,
)
from .linalg import (
    PolarFactors,
    haar_state,
    haar_unitary,
    hermitian_eig,
    hs_inner,
    polar,
    svd,
)

__all__ = [
    "__version__",
    "BoundReport",
    "CanonicalKraus",
    "ChannelValidationError",
    "ChiMatrix",
    "DuHistogram",
    "DuResult",
    "FidelityPair",
    "KrausChannel",
    "MixedUnitaryForm",
    "MonteCarloFidelity",
    "OrthogonalityError",
    "PolarFactors",
    "Table1Report",
    "TightnessRecord",
    "TightnessResult",
    "Trajectory",
    "ValidationReport",
    "WitnessReport",
    "apply_channel",
    "as_mixed_unitary",
    "average_fidelity",
    "average_fidelity_mc",
    "average_from_process",
    "canonicalize",
    "chi_to_kraus",
    "closed_form_du",
    "compose",
    "convex_unitary_mixture",
    "du",
    "du_bounds",
    "du_exact_mixed_unitary",
    "du_optimize",
    "fidelity_pair",
    "haar_state",
    "haar_unitary",
    "hermitian_eig",
    "hs_inner",
    "identity_channel",
    "kraus_to_chi",
    "polar",
    "process_fidelity",
    "process_fidelity_chi",
    "process_from_average",
    "random_channel",
    "require_trace_preserving",
    "run_distribution",
    "run_table1",
    "run_tightness",
    "run_witness",
    "standard_channel",
    "svd",
    "unitary_channel",
    "validate",
]
