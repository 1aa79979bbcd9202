"""Mechanism lab: baselines and the seeded comparison harness."""

from doublescore.lab.comparison import (
    APPROVAL_POINT_THRESHOLD,
    BadConfig,
    ComparisonConfig,
    TrialReport,
    ballot_top_level,
    derive_approval_ballot,
    derive_binary_ballot,
    format_report,
    run_comparison,
    write_report,
)
from doublescore.lab.kernels import BACKEND, panel_points, panel_points_numpy
from doublescore.lab.mechanisms import (
    ApprovalBallot,
    ApprovalResult,
    BinaryBallot,
    BinaryOutcome,
    approval_tally,
    binary_majority,
)
from doublescore.lab.panels import (
    CredibilityMode,
    PanelSpec,
    acceptance_limit,
    accuracy,
    generate_panel,
)

__all__ = [
    "APPROVAL_POINT_THRESHOLD",
    "BACKEND",
    "ApprovalBallot",
    "ApprovalResult",
    "BadConfig",
    "BinaryBallot",
    "BinaryOutcome",
    "ComparisonConfig",
    "CredibilityMode",
    "PanelSpec",
    "TrialReport",
    "acceptance_limit",
    "accuracy",
    "approval_tally",
    "ballot_top_level",
    "binary_majority",
    "derive_approval_ballot",
    "derive_binary_ballot",
    "format_report",
    "generate_panel",
    "panel_points",
    "panel_points_numpy",
    "run_comparison",
    "write_report",
]
