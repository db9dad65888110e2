"""Semiquantum key distribution with an interactive eavesdropper.

Closed-form success probabilities and advantages, an exact small-system
statevector oracle, vectorized protocol rounds with configurable attacks,
Monte Carlo comparison against the analytic forms, and CSV/figure export.
"""

from .analytic import (
    CurvePoint,
    DisturbanceParams,
    D_from_p,
    crossover_disturbance,
    curve_point,
    eps_from_p,
    p_from_D,
    pe_backward_hadamard,
    pe_one_way,
    pe_two_way_avg,
    pe_two_way_avg_H,
    pe_two_way_match,
    pe_two_way_match_H,
    pe_two_way_mismatch,
    posterior_match,
    sample_curve,
)
from .channel import (
    CombinationMode,
    Direction,
    DirectionalObservation,
    backward_advantage_hadamard,
    combine_guesses,
    derive_rng,
    enumerate_independent_success,
    sample_combined_correct,
    sample_flip,
    sample_guess,
)
from .errors import (
    DimensionError,
    DomainError,
    InsufficientBitsError,
    InvalidCollapseError,
    UnsupportedInputError,
)
from .experiments import (
    ComparisonRow,
    CurveTables,
    EstimateWithCI,
    Quantity,
    StrategyKind,
    VerifyReport,
    advantage_tables,
    build_strategy,
    comparisons_csv,
    curves_csv,
    estimate_disturbance,
    estimate_success,
    monte_carlo_rows,
    verify_all,
)
from .protocol import (
    AbortReason,
    Basis,
    BobAction,
    EveAuto,
    EveNone,
    EveOneWay,
    EveStrategy,
    EveTwoWay,
    ProtocolConfig,
    PublicAnnouncements,
    Role,
    RunResult,
    TranscriptEntry,
    Variant,
    choose_strategy,
    expected_sifted_count,
    public_announcements,
    resolve_strategy,
    run_protocol,
    transcript_csv,
)
from .statevector import (
    DEFAULT_PROBES,
    ProbeBasis,
    PureState,
    apply_interaction,
    basis_state,
    collapse_and_resend,
    extend_interaction,
    hadamard,
    measure_signal_marginal,
    roundtrip_error,
)

__version__ = "0.1.0"

__all__ = [
    "AbortReason",
    "Basis",
    "BobAction",
    "CombinationMode",
    "ComparisonRow",
    "CurvePoint",
    "CurveTables",
    "D_from_p",
    "DEFAULT_PROBES",
    "DimensionError",
    "Direction",
    "DirectionalObservation",
    "DisturbanceParams",
    "DomainError",
    "EstimateWithCI",
    "EveAuto",
    "EveNone",
    "EveOneWay",
    "EveStrategy",
    "EveTwoWay",
    "InsufficientBitsError",
    "InvalidCollapseError",
    "ProbeBasis",
    "ProtocolConfig",
    "PublicAnnouncements",
    "PureState",
    "Quantity",
    "Role",
    "RunResult",
    "StrategyKind",
    "TranscriptEntry",
    "UnsupportedInputError",
    "Variant",
    "VerifyReport",
    "advantage_tables",
    "apply_interaction",
    "backward_advantage_hadamard",
    "basis_state",
    "build_strategy",
    "choose_strategy",
    "collapse_and_resend",
    "combine_guesses",
    "comparisons_csv",
    "crossover_disturbance",
    "curve_point",
    "curves_csv",
    "derive_rng",
    "enumerate_independent_success",
    "eps_from_p",
    "estimate_disturbance",
    "estimate_success",
    "expected_sifted_count",
    "extend_interaction",
    "hadamard",
    "measure_signal_marginal",
    "monte_carlo_rows",
    "p_from_D",
    "pe_backward_hadamard",
    "pe_one_way",
    "pe_two_way_avg",
    "pe_two_way_avg_H",
    "pe_two_way_match",
    "pe_two_way_match_H",
    "pe_two_way_mismatch",
    "posterior_match",
    "public_announcements",
    "resolve_strategy",
    "roundtrip_error",
    "run_protocol",
    "sample_combined_correct",
    "sample_curve",
    "sample_flip",
    "sample_guess",
    "transcript_csv",
    "verify_all",
]
