"""Deterministic sparse Fourier recovery via prime-grouped aliased sampling.

Identifies the most energetic frequencies of a frequency-sparse signal and
estimates their coefficients from far fewer samples than a full transform,
with no randomness anywhere in the measurement design or the decoder.
"""

from .design import (
    PrimePlan,
    SubsetAddress,
    plan_parameters,
    subset_membership,
    verify_k_majority,
    verify_lift_uniqueness,
)
from .measurement import (
    MeasurementSet,
    dft_arbitrary_length,
    make_trig_sampler,
    measure_from_grid,
    measure_function,
    measure_vector,
    telescoping_residual,
)
from .number_theory import ResidueSystem, crt_combine, extended_gcd, generate_primes
from .reconstruct import (
    Candidate,
    RecoveryParameters,
    RecoveryReport,
    compute_epsilon_bprime,
    estimate,
    identify,
    select_parameters,
    sparse_approximate,
)
from .signals import (
    SIGNED_WINDOW,
    UNSIGNED_WINDOW,
    CompressibilityModel,
    ExplicitSpectrum,
    ExplicitTimeVector,
    FunctionSampler,
    SignalSource,
    SparseRepresentation,
    default_kappa,
    error_l2,
    gen_signal,
    interpolate_sample,
    interpolate_samples,
    load_signal_csv,
    oracle_dft,
    oracle_idft,
    oracle_top_b,
    save_signal_csv,
    signed_frequencies,
    synthesize_time_vector,
)

__version__ = "0.1.0"

__all__ = [
    "Candidate",
    "CompressibilityModel",
    "ExplicitSpectrum",
    "ExplicitTimeVector",
    "FunctionSampler",
    "MeasurementSet",
    "PrimePlan",
    "RecoveryParameters",
    "RecoveryReport",
    "ResidueSystem",
    "SIGNED_WINDOW",
    "SignalSource",
    "SparseRepresentation",
    "SubsetAddress",
    "UNSIGNED_WINDOW",
    "compute_epsilon_bprime",
    "crt_combine",
    "default_kappa",
    "dft_arbitrary_length",
    "error_l2",
    "estimate",
    "extended_gcd",
    "gen_signal",
    "generate_primes",
    "identify",
    "interpolate_sample",
    "interpolate_samples",
    "load_signal_csv",
    "make_trig_sampler",
    "measure_from_grid",
    "measure_function",
    "measure_vector",
    "oracle_dft",
    "oracle_idft",
    "oracle_top_b",
    "plan_parameters",
    "save_signal_csv",
    "select_parameters",
    "signed_frequencies",
    "sparse_approximate",
    "subset_membership",
    "synthesize_time_vector",
    "telescoping_residual",
    "verify_k_majority",
    "verify_lift_uniqueness",
]
