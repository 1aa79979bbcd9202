"""Project lifecycle: approval opens a timed window, experts vote, a
sweeper finalizes due projects through the scoring core.

The only legal state path is pending-approval -> under-evaluation ->
decided, and decided is terminal. All timing decisions come from the
``now`` argument rather than a wall clock, so callers (and tests) control
time; the voting window is half-open, [opened_at, closes_at).

The engine holds no mutable state of its own: every transition funnels
through the store's atomic compare-and-set operations, which is what makes
concurrent finalization and overlapping sweepers safe.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from datetime import datetime, timedelta
from typing import Mapping

from doublescore.models import (
    DecisionRecord,
    EvaluationWindow,
    ExpertProfile,
    ExpertVote,
    NotificationRecord,
    Project,
    ProjectState,
    VoterSnapshot,
    new_id,
)
from doublescore.store import AlreadyApproved, NotFound, Store
from doublescore.voting import (
    DecisionOutcome,
    RecommendationLevel,
    WeightedBallot,
    aggregate,
    basis_point_shares,
    decide,
    validate_distribution,
)

logger = logging.getLogger(__name__)

DEFAULT_WINDOW_HOURS = 48
DEFAULT_QUORUM = 1

BADGES = {
    RecommendationLevel.HR: "Highly Recommended by Experts",
    RecommendationLevel.R: "Recommended by Experts",
    RecommendationLevel.NR: "Not Recommended by Experts",
    RecommendationLevel.HNR: "Highly Not Recommended by Experts",
    None: "Insufficient Expert Participation",
}


class WindowClosed(ValueError):
    """Vote arrived outside an open evaluation window."""


class WindowStillOpen(ValueError):
    """Finalization attempted before the window expired."""


class NotEligible(PermissionError):
    """The expert may not vote on this project."""


@dataclass(frozen=True)
class EngineConfig:
    window_hours: int = DEFAULT_WINDOW_HOURS
    quorum: int = DEFAULT_QUORUM

    def __post_init__(self):
        if self.window_hours < 1:
            raise ValueError("window_hours must be >= 1")
        if self.quorum < 1:
            raise ValueError("quorum must be >= 1")


def eligible_experts(
    project: Project, experts: list[ExpertProfile]
) -> list[ExpertProfile]:
    """Active experts whose specializations overlap the project's categories,
    ordered by expert id."""
    matching = [
        e
        for e in experts
        if e.active and e.specializations & project.categories
    ]
    return sorted(matching, key=lambda e: e.id)


def outcome_badge(outcome: DecisionOutcome) -> str:
    return BADGES[outcome.recommendation]


class WorkflowEngine:
    def __init__(self, store: Store, config: EngineConfig | None = None):
        self.store = store
        self.config = config or EngineConfig()

    # -- stage 1: approval opens the window -----------------------------------

    def approve_project(self, project_id: str, now: datetime) -> EvaluationWindow:
        """Open the evaluation window and enqueue one notification per
        eligible expert. The project stays unlisted to the public."""
        project = self.store.get_project(project_id)
        if project is None:
            raise NotFound(f"project {project_id!r} not found")
        if project.state is not ProjectState.PENDING_APPROVAL:
            raise AlreadyApproved(f"project {project_id!r} is {project.state.value}")
        window = EvaluationWindow(
            opened_at=now, closes_at=now + timedelta(hours=self.config.window_hours)
        )
        notifications = [
            NotificationRecord(
                id=new_id("ntf"),
                expert_id=expert.id,
                project_id=project_id,
                created_at=now,
            )
            for expert in eligible_experts(project, self.store.list_experts())
        ]
        if not self.store.open_evaluation(project_id, window, notifications):
            raise AlreadyApproved(f"project {project_id!r} is no longer pending")
        return window

    # -- stage 2: vote collection ----------------------------------------------

    def submit_vote(
        self,
        project_id: str,
        expert_id: str,
        raw_points: Mapping[RecommendationLevel, int],
        comment: str | None,
        now: datetime,
    ) -> ExpertVote:
        """Validate and append a vote; the newest append is the effective one,
        so an expert may revise freely until the window closes."""
        project = self.store.get_project(project_id)
        if project is None:
            raise NotFound(f"project {project_id!r} not found")
        if project.state is not ProjectState.UNDER_EVALUATION or project.window is None:
            raise WindowClosed(f"project {project_id!r} is not under evaluation")
        if not project.window.is_open(now):
            raise WindowClosed("the evaluation window is closed")
        expert = self.store.get_expert(expert_id)
        if expert is None:
            raise NotFound(f"expert {expert_id!r} not found")
        if not expert.active:
            raise NotEligible("expert account is inactive")
        if not expert.specializations & project.categories:
            raise NotEligible("expert specializations do not match the project")
        if expert.id == project.creator_id:
            raise NotEligible("creators cannot vote on their own project")
        vote = ExpertVote(
            project_id=project_id,
            expert_id=expert_id,
            distribution=validate_distribution(raw_points),
            comment=comment,
            submitted_at=now,
        )
        self.store.append_vote(vote)
        return vote

    # -- stage 3: aggregation at the deadline -----------------------------------

    def finalize_project(self, project_id: str, now: datetime) -> DecisionOutcome:
        outcome, _ = self._finalize(project_id, now)
        return outcome

    def _finalize(self, project_id: str, now: datetime) -> tuple[DecisionOutcome, bool]:
        """Returns (outcome, newly_decided). Idempotent: a decided project
        returns its stored outcome with no writes."""
        project = self.store.get_project(project_id)
        if project is None:
            raise NotFound(f"project {project_id!r} not found")
        if project.state is ProjectState.DECIDED:
            record = self.store.get_decision(project_id)
            return record.outcome, False
        if project.window is None or now < project.window.closes_at:
            raise WindowStillOpen(f"project {project_id!r} cannot be finalized yet")

        # Effective votes joined with each voter's credibility as of now;
        # the decision snapshots those weights for audit.
        pairs = self.store.effective_votes(project_id)
        ballots = [
            WeightedBallot(profile.credibility, vote.distribution)
            for vote, profile in pairs
        ]
        scores = aggregate(ballots)
        outcome = decide(
            scores,
            vote_count=len(ballots),
            total_weight=sum(b.credibility for b in ballots),
            quorum=self.config.quorum,
        )
        record = DecisionRecord(
            project_id=project_id,
            outcome=outcome,
            scores=scores,
            shares={
                level.wire_name: share
                for level, share in basis_point_shares(scores).items()
            },
            voters=tuple(
                VoterSnapshot(profile.id, profile.credibility, vote.distribution)
                for vote, profile in pairs
            ),
            badge=outcome_badge(outcome),
            decided_at=now,
        )
        stored, canonical = self.store.store_decision_once(record)
        return canonical.outcome, stored

    def sweep_due(self, now: datetime) -> list[tuple[str, DecisionOutcome]]:
        """Finalize every due project; returns only the newly decided ones.

        Per-project failures are logged and skipped so one bad record
        cannot stall the sweep. Immediately repeating a sweep is a no-op.
        """
        decided = []
        for project_id in self.store.due_projects(now):
            try:
                outcome, newly = self._finalize(project_id, now)
            except Exception:
                logger.exception("sweep failed to finalize project %s", project_id)
                continue
            if newly:
                decided.append((project_id, outcome))
        return decided
