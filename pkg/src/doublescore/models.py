"""Shared domain records: experts, projects, votes, decisions, principals.

Timestamps are timezone-aware UTC datetimes in code and integer epoch
microseconds at rest, converted with exact integer arithmetic so window
boundary comparisons never pass through floats.
"""

from __future__ import annotations

import secrets
import time
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from enum import Enum

from doublescore.voting import (
    DecisionOutcome,
    LevelScores,
    VoteDistribution,
    validate_credibility,
)

_EPOCH = datetime(1970, 1, 1, tzinfo=timezone.utc)

MAX_COMMENT_LENGTH = 2000


def utc_now() -> datetime:
    return datetime.now(timezone.utc)


def to_micros(dt: datetime) -> int:
    delta = dt - _EPOCH
    return (delta.days * 86_400 + delta.seconds) * 1_000_000 + delta.microseconds


def from_micros(us: int) -> datetime:
    return _EPOCH + timedelta(microseconds=us)


def new_id(prefix: str) -> str:
    """Time-ordered unique identifier: hex milliseconds then random hex."""
    return f"{prefix}_{time.time_ns() // 1_000_000:011x}{secrets.token_hex(5)}"


class Role(str, Enum):
    ADMIN = "admin"
    CREATOR = "creator"
    EXPERT = "expert"
    BACKER = "backer"


@dataclass(frozen=True)
class Principal:
    """An authenticated caller: one role, one opaque bearer token."""

    user_id: str
    role: Role
    token: str


class ProjectState(str, Enum):
    PENDING_APPROVAL = "pending_approval"
    UNDER_EVALUATION = "under_evaluation"
    DECIDED = "decided"


@dataclass(frozen=True)
class EvaluationWindow:
    """Half-open voting window [opened_at, closes_at)."""

    opened_at: datetime
    closes_at: datetime

    def __post_init__(self):
        if self.closes_at <= self.opened_at:
            raise ValueError("closes_at must be after opened_at")

    def is_open(self, now: datetime) -> bool:
        return self.opened_at <= now < self.closes_at


@dataclass(frozen=True)
class ExpertProfile:
    id: str
    display_name: str
    credibility: int
    specializations: frozenset[str]
    active: bool = True

    def __post_init__(self):
        validate_credibility(self.credibility)


@dataclass(frozen=True)
class Project:
    id: str
    creator_id: str
    title: str
    description: str
    categories: frozenset[str]
    funding_goal: int
    state: ProjectState = ProjectState.PENDING_APPROVAL
    window: EvaluationWindow | None = None

    def __post_init__(self):
        if not self.categories:
            raise ValueError("a project needs at least one category tag")
        if self.funding_goal < 0:
            raise ValueError("funding_goal cannot be negative")


@dataclass(frozen=True)
class ExpertVote:
    project_id: str
    expert_id: str
    distribution: VoteDistribution
    comment: str | None
    submitted_at: datetime

    def __post_init__(self):
        if self.comment is not None and len(self.comment) > MAX_COMMENT_LENGTH:
            raise CommentTooLong(len(self.comment))


class CommentTooLong(ValueError):
    def __init__(self, length: int):
        self.length = length
        super().__init__(
            f"comment is {length} characters; the limit is {MAX_COMMENT_LENGTH}"
        )


@dataclass(frozen=True)
class VoterSnapshot:
    """Credibility and ballot of one voter as used in a decision."""

    expert_id: str
    credibility: int
    distribution: VoteDistribution


@dataclass(frozen=True)
class DecisionRecord:
    """The once-only stored result of finalizing a project."""

    project_id: str
    outcome: DecisionOutcome
    scores: LevelScores
    shares: dict[str, int]  # wire-name -> basis points, sums to 10000 (or all 0)
    voters: tuple[VoterSnapshot, ...]
    badge: str
    decided_at: datetime


@dataclass(frozen=True)
class NotificationRecord:
    id: str
    expert_id: str
    project_id: str
    created_at: datetime
    read: bool = False
