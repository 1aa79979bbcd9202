"""Seeded Monte Carlo comparison of the score mechanism against baselines.

Per trial: a true level is drawn uniformly, a synthetic panel votes, and
three rules decide from the same underlying ballots:

- double score: credibility-weighted aggregation and conservative argmax;
- binary majority (unweighted): an expert approves iff their own ballot's
  argmax is R or HR, with in-ballot ties resolving toward the lower level;
- approval: an expert approves every level holding at least 30 of their
  100 points, falling back to their argmax alone when none reach 30.

Recovery is scored two ways: exact (decision equals the true level) and
coarse (decision is positive, i.e. R/HR or binary Approve, iff the truth
is positive). Insufficient-participation outcomes count as not positive.

Everything is integer or exact-rational arithmetic on a named seeded
stream, so a report is a pure, bit-stable function of (config, seed):
trial t draws its truth from stream value 2t of the run seed and builds
its panel from a sub-stream seeded with value 2t + 1.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from pathlib import Path

from doublescore.lab.mechanisms import (
    ApprovalBallot,
    BinaryBallot,
    BinaryOutcome,
    approval_tally,
    binary_majority,
)
from doublescore.lab.panels import PanelSpec, generate_panel
from doublescore.lab.rng import MASK64, stream_value
from doublescore.voting import (
    LEVELS,
    POSITIVE_LEVELS,
    RecommendationLevel,
    VoteDistribution,
    WeightedBallot,
    aggregate,
    decide,
    most_conservative_argmax,
)

APPROVAL_POINT_THRESHOLD = 30


class BadConfig(ValueError):
    pass


@dataclass(frozen=True)
class ComparisonConfig:
    trials: int
    spec: PanelSpec

    def __post_init__(self):
        if self.trials < 1:
            raise BadConfig(f"trials must be >= 1, got {self.trials}")


@dataclass(frozen=True)
class TrialReport:
    """Recovery rates as exact fractions, reproducible from the seed."""

    trials: int
    exact_recovery_double: Fraction
    coarse_recovery_double: Fraction
    coarse_recovery_binary: Fraction
    exact_recovery_approval: Fraction
    seed: int


def ballot_top_level(distribution: VoteDistribution) -> RecommendationLevel:
    """The ballot's own argmax, ties resolving toward the lower level."""
    level, _ = most_conservative_argmax(distribution.points)
    return level


def derive_binary_ballot(ballot: WeightedBallot) -> BinaryBallot:
    approve = ballot_top_level(ballot.distribution) in POSITIVE_LEVELS
    return BinaryBallot(ballot.credibility, approve)


def derive_approval_ballot(ballot: WeightedBallot) -> ApprovalBallot:
    approved = frozenset(
        level for level in LEVELS
        if ballot.distribution[level] >= APPROVAL_POINT_THRESHOLD
    )
    if not approved:
        approved = frozenset({ballot_top_level(ballot.distribution)})
    return ApprovalBallot(approved)


def run_comparison(config: ComparisonConfig, seed: int) -> TrialReport:
    if not 0 <= seed <= MASK64:
        raise BadConfig("seed must be an unsigned 64-bit integer")
    exact_double = 0
    coarse_double = 0
    coarse_binary = 0
    exact_approval = 0
    for trial in range(config.trials):
        truth = LEVELS[stream_value(seed, 2 * trial) % 4]
        panel_seed = stream_value(seed, 2 * trial + 1)
        panel = generate_panel(replace(config.spec, seed=panel_seed), truth)
        truth_positive = truth in POSITIVE_LEVELS

        scores = aggregate(panel)
        outcome = decide(scores, len(panel), sum(b.credibility for b in panel), quorum=1)
        if outcome.recommendation == truth:
            exact_double += 1
        double_positive = outcome.recommendation in POSITIVE_LEVELS
        if double_positive == truth_positive:
            coarse_double += 1

        binary = binary_majority([derive_binary_ballot(b) for b in panel], weighted=False)
        if (binary is BinaryOutcome.APPROVE) == truth_positive:
            coarse_binary += 1

        approval = approval_tally([derive_approval_ballot(b) for b in panel])
        if approval.winner == truth:
            exact_approval += 1

    trials = config.trials
    return TrialReport(
        trials=trials,
        exact_recovery_double=Fraction(exact_double, trials),
        coarse_recovery_double=Fraction(coarse_double, trials),
        coarse_recovery_binary=Fraction(coarse_binary, trials),
        exact_recovery_approval=Fraction(exact_approval, trials),
        seed=seed,
    )


def format_report(report: TrialReport, config: ComparisonConfig) -> str:
    """Key: value report text; exact fractions keep the file bit-stable."""
    spec = config.spec
    lines = [
        "# mechanism comparison report",
        "# rng: splitmix64 counter stream (gamma 0x9E3779B97F4A7C15)",
        "# binary baseline: expert approves iff own-ballot argmax is r or hr"
        " (in-ballot ties toward the lower level); unweighted majority, ties reject",
        f"# approval baseline: expert approves levels holding >= {APPROVAL_POINT_THRESHOLD}"
        " of 100 points, else own argmax only",
        f"trials: {report.trials}",
        f"experts: {spec.expert_count}",
        "competence: " + ",".join(str(c) for c in spec.competence),
        f"credibility_mode: {spec.credibility_mode.value}",
        f"seed: {report.seed}",
        f"exact_recovery_double: {report.exact_recovery_double}",
        f"coarse_recovery_double: {report.coarse_recovery_double}",
        f"coarse_recovery_binary: {report.coarse_recovery_binary}",
        f"exact_recovery_approval: {report.exact_recovery_approval}",
    ]
    return "\n".join(lines) + "\n"


def write_report(report: TrialReport, config: ComparisonConfig, path: str | Path) -> None:
    Path(path).write_text(format_report(report, config), encoding="utf-8")
