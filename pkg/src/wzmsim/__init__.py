"""Signal coherence of two downconverters sharing an idler path."""

from .errors import ConfigError, ConvergenceFailure, InvalidArgument, UndefinedCoherence
from .experiment import (
    ExperimentConfig,
    FringeScanResult,
    build_chain,
    fringe_scan,
    g1_closed_form,
    g1_exact,
    g1_from_moments,
    g1_nbar_form,
    limit_report,
    moments_closed_form,
)
from .modes import (
    LAYOUT,
    BogoliubovTransform,
    ModeLayout,
    MomentSet,
    beam_splitter,
    compose,
    identity_transform,
    two_mode_squeezer,
    vacuum_moments,
)

__all__ = [
    "ConfigError", "ConvergenceFailure", "InvalidArgument", "UndefinedCoherence",
    "ExperimentConfig", "FringeScanResult", "build_chain", "fringe_scan",
    "g1_closed_form", "g1_exact", "g1_from_moments", "g1_nbar_form",
    "limit_report", "moments_closed_form",
    "LAYOUT", "BogoliubovTransform", "ModeLayout", "MomentSet", "beam_splitter",
    "compose", "identity_transform", "two_mode_squeezer", "vacuum_moments",
]
