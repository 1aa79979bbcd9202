"""Baseline voting mechanisms: weighted/unweighted binary and approval.

These are the simpler rules the score-based mechanism is measured against.
Both share the conservative tie policy of the main mechanism: a tied
outcome resolves toward the less favourable result.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from doublescore.voting import (
    LEVELS,
    RecommendationLevel,
    most_conservative_argmax,
    validate_credibility,
)


class BinaryOutcome(Enum):
    APPROVE = "approve"
    REJECT = "reject"
    INSUFFICIENT_PARTICIPATION = "insufficient_participation"


@dataclass(frozen=True)
class BinaryBallot:
    """Yes/no vote with the voter's credibility weight."""

    credibility: int
    approve: bool

    def __post_init__(self):
        validate_credibility(self.credibility)


def binary_majority(ballots: list[BinaryBallot], weighted: bool) -> BinaryOutcome:
    """Approve iff approve mass strictly exceeds reject mass.

    Mass is credibility when weighted, else one per ballot. A tie is the
    conservative Reject; an empty panel is insufficient participation.
    """
    if not ballots:
        return BinaryOutcome.INSUFFICIENT_PARTICIPATION
    approve_mass = 0
    reject_mass = 0
    for ballot in ballots:
        mass = ballot.credibility if weighted else 1
        if ballot.approve:
            approve_mass += mass
        else:
            reject_mass += mass
    return BinaryOutcome.APPROVE if approve_mass > reject_mass else BinaryOutcome.REJECT


@dataclass(frozen=True)
class ApprovalBallot:
    """Multi-select ballot: one or more acceptable levels, equally counted."""

    approved_levels: frozenset[RecommendationLevel]

    def __post_init__(self):
        if not self.approved_levels:
            raise ValueError("an approval ballot must select at least one level")


@dataclass(frozen=True)
class ApprovalResult:
    """Per-level approval counts; winner is None for an empty panel."""

    counts: dict[RecommendationLevel, int]
    winner: RecommendationLevel | None
    tie_applied: bool


def approval_tally(ballots: list[ApprovalBallot]) -> ApprovalResult:
    """Each ballot adds one to every approved level; argmax wins.

    Ties go to the most conservative of the tied levels; no ballots means
    insufficient participation (winner None).
    """
    counts = {level: 0 for level in LEVELS}
    for ballot in ballots:
        for level in ballot.approved_levels:
            counts[level] += 1
    if not ballots:
        return ApprovalResult(counts, None, False)
    winner, tie = most_conservative_argmax([counts[level] for level in LEVELS])
    return ApprovalResult(counts, winner, tie)
