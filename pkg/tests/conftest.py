from __future__ import annotations

from datetime import datetime, timedelta, timezone

import pytest

from doublescore.models import ExpertProfile, Project, new_id
from doublescore.store import Store
from doublescore.voting import LEVELS, VoteDistribution, WeightedBallot
from doublescore.workflow import EngineConfig, WorkflowEngine

T0 = datetime(2026, 3, 2, 9, 0, 0, tzinfo=timezone.utc)


class FakeClock:
    """Settable clock for driving window boundaries in tests."""

    def __init__(self, start: datetime = T0):
        self.now = start

    def __call__(self) -> datetime:
        return self.now

    def advance(self, **kwargs) -> datetime:
        self.now += timedelta(**kwargs)
        return self.now


def dist(hnr: int, nr: int, r: int, hr: int) -> VoteDistribution:
    return VoteDistribution((hnr, nr, r, hr))


def ballot(credibility: int, points: tuple[int, int, int, int]) -> WeightedBallot:
    return WeightedBallot(credibility, VoteDistribution(points))


def oracle_scores(ballots) -> dict:
    """Independent naive recomputation: loop over (ballot, level) pairs."""
    totals = {level: 0 for level in LEVELS}
    for b in ballots:
        for level in LEVELS:
            totals[level] += b.credibility * b.distribution.points[level]
    return totals


def make_expert(store: Store, specializations=("hardware",), credibility=500,
                active=True, display_name="An Expert") -> ExpertProfile:
    profile = ExpertProfile(
        id=new_id("exp"),
        display_name=display_name,
        credibility=credibility,
        specializations=frozenset(specializations),
        active=active,
    )
    store.add_expert(profile)
    return profile


def make_project(store: Store, categories=("hardware",), creator_id="creator-1",
                 title="A Project") -> Project:
    project = Project(
        id=new_id("proj"),
        creator_id=creator_id,
        title=title,
        description="Something to evaluate.",
        categories=frozenset(categories),
        funding_goal=250_000,
    )
    store.add_project(project)
    return project


@pytest.fixture
def store(tmp_path):
    s = Store(tmp_path / "platform.db")
    yield s
    s.close()


@pytest.fixture
def engine(store):
    return WorkflowEngine(store, EngineConfig())


@pytest.fixture
def clock():
    return FakeClock()
