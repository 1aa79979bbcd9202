"""Ballot validation and credibility-weighted score aggregation.

Each expert spreads exactly 100 points across four recommendation levels,
and carries an integer credibility weight in [0, 1000]. A panel's tally is,
per level, the sum of credibility x points over all ballots, computed in
exact integer arithmetic so that ties are platform-independent. The final
recommendation is the top-scoring level; ties break toward the more
conservative (less favourable) level, and a quorum rule turns empty or
weightless panels into an explicit "insufficient participation" outcome.

Everything here is a pure function over immutable values: no storage, no
clock, no I/O. Safe to call concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

TOTAL_POINTS = 100
MAX_CREDIBILITY = 1000
BASIS_POINTS = 10_000


class RecommendationLevel(IntEnum):
    """The four-level recommendation scale, least favourable first.

    The integer value doubles as the conservativeness order: a lower value
    is the more cautious recommendation, which is what tie-breaking uses.
    """

    HNR = 0  # highly not recommended
    NR = 1   # not recommended
    R = 2    # recommended
    HR = 3   # highly recommended

    @property
    def wire_name(self) -> str:
        """Lowercase name used in JSON bodies and report files."""
        return self.name.lower()


LEVELS: tuple[RecommendationLevel, ...] = tuple(RecommendationLevel)
LEVEL_BY_WIRE_NAME = {lvl.wire_name: lvl for lvl in LEVELS}
POSITIVE_LEVELS = frozenset((RecommendationLevel.R, RecommendationLevel.HR))


class BallotError(ValueError):
    """A raw point allocation violates the ballot rules."""

    rule = "invalid_ballot"

    def payload(self) -> dict:
        return {"error": self.rule, "message": str(self)}


class MissingLevel(BallotError):
    rule = "missing_level"

    def __init__(self, level: RecommendationLevel):
        self.level = level
        super().__init__(f"no point value for level {level.wire_name!r}")

    def payload(self) -> dict:
        return {"error": self.rule, "level": self.level.wire_name, "message": str(self)}


class OutOfRange(BallotError):
    rule = "out_of_range"

    def __init__(self, level: RecommendationLevel, value):
        self.level = level
        self.value = value
        super().__init__(
            f"level {level.wire_name!r} must be an integer in [0, {TOTAL_POINTS}], got {value!r}"
        )

    def payload(self) -> dict:
        return {"error": self.rule, "level": self.level.wire_name, "message": str(self)}


class BadSum(BallotError):
    rule = "bad_sum"

    def __init__(self, actual: int):
        self.actual = actual
        super().__init__(f"points sum to {actual}, expected exactly {TOTAL_POINTS}")

    def payload(self) -> dict:
        return {"error": self.rule, "actual": self.actual, "message": str(self)}


class InvalidQuorum(ValueError):
    def __init__(self, quorum: int):
        self.quorum = quorum
        super().__init__(f"quorum must be >= 1, got {quorum}")


class CredibilityOutOfRange(ValueError):
    def __init__(self, value):
        self.value = value
        super().__init__(
            f"credibility must be an integer in [0, {MAX_CREDIBILITY}], got {value!r}"
        )


def validate_credibility(value) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise CredibilityOutOfRange(value)
    if not 0 <= value <= MAX_CREDIBILITY:
        raise CredibilityOutOfRange(value)
    return value


@dataclass(frozen=True)
class VoteDistribution:
    """A validated 100-point allocation, indexed by RecommendationLevel."""

    points: tuple[int, int, int, int]

    def __post_init__(self):
        if len(self.points) != len(LEVELS):
            raise BallotError(f"expected {len(LEVELS)} point values, got {len(self.points)}")
        for level in LEVELS:
            value = self.points[level]
            if isinstance(value, bool) or not isinstance(value, int):
                raise OutOfRange(level, value)
            if not 0 <= value <= TOTAL_POINTS:
                raise OutOfRange(level, value)
        total = sum(self.points)
        if total != TOTAL_POINTS:
            raise BadSum(total)

    def __getitem__(self, level: RecommendationLevel) -> int:
        return self.points[level]

    def as_dict(self) -> dict[RecommendationLevel, int]:
        return {level: self.points[level] for level in LEVELS}

    def wire_dict(self) -> dict[str, int]:
        return {level.wire_name: self.points[level] for level in LEVELS}

    @classmethod
    def of(cls, hnr: int, nr: int, r: int, hr: int) -> "VoteDistribution":
        return cls((hnr, nr, r, hr))


def validate_distribution(raw_points: Mapping[RecommendationLevel, int]) -> VoteDistribution:
    """Build a VoteDistribution from a raw level -> points mapping.

    Raises MissingLevel for an absent level, OutOfRange for a value outside
    [0, 100] (or not an integer), and BadSum when the values do not add up
    to exactly 100. The input mapping is not mutated.
    """
    values = []
    for level in LEVELS:
        if level not in raw_points:
            raise MissingLevel(level)
        values.append(raw_points[level])
    return VoteDistribution(tuple(values))


@dataclass(frozen=True)
class WeightedBallot:
    """One expert's validated ballot paired with their credibility weight."""

    credibility: int
    distribution: VoteDistribution

    def __post_init__(self):
        validate_credibility(self.credibility)


@dataclass(frozen=True)
class LevelScores:
    """Per-level aggregate: credibility-units x points, exact integers."""

    scores: tuple[int, int, int, int]

    def __getitem__(self, level: RecommendationLevel) -> int:
        return self.scores[level]

    def as_dict(self) -> dict[RecommendationLevel, int]:
        return {level: self.scores[level] for level in LEVELS}

    def wire_dict(self) -> dict[str, int]:
        return {level.wire_name: self.scores[level] for level in LEVELS}

    @property
    def total(self) -> int:
        return sum(self.scores)


@dataclass(frozen=True)
class DecisionOutcome:
    """Result of deciding a panel.

    ``recommendation`` is None exactly when participation was insufficient
    (fewer effective votes than the quorum, or zero total weight).
    """

    recommendation: RecommendationLevel | None
    tie_applied: bool
    vote_count: int
    total_weight: int

    @property
    def insufficient(self) -> bool:
        return self.recommendation is None

    @property
    def kind(self) -> str:
        return "insufficient_participation" if self.insufficient else "recommended"


def aggregate(ballots: Iterable[WeightedBallot]) -> LevelScores:
    """Sum credibility x points per level over all ballots.

    Python integers are unbounded, so the >= 64-bit accumulator contract
    holds for any panel size; an empty iterable yields all-zero scores, and
    ballot order cannot affect the result (integer addition commutes).
    """
    totals = [0, 0, 0, 0]
    for ballot in ballots:
        credibility = ballot.credibility
        points = ballot.distribution.points
        for level in LEVELS:
            totals[level] += credibility * points[level]
    return LevelScores(tuple(totals))


def most_conservative_argmax(values: Sequence[int]) -> tuple[RecommendationLevel, bool]:
    """Index of the maximal value, preferring the lowest level on ties.

    Returns (level, tie_applied) where tie_applied is True iff two or more
    levels share the maximum.
    """
    best = max(values)
    winners = [level for level in LEVELS if values[level] == best]
    return winners[0], len(winners) > 1


def decide(
    scores: LevelScores,
    vote_count: int,
    total_weight: int,
    quorum: int = 1,
) -> DecisionOutcome:
    """Pick the final recommendation from aggregated scores.

    Below-quorum panels and panels whose ballots carry zero total weight
    yield the insufficient-participation outcome rather than surfacing an
    all-zero tie as a recommendation.
    """
    if quorum < 1:
        raise InvalidQuorum(quorum)
    if vote_count < quorum or total_weight == 0:
        return DecisionOutcome(None, False, vote_count, total_weight)
    level, tie = most_conservative_argmax(scores.scores)
    return DecisionOutcome(level, tie, vote_count, total_weight)


def normalize_scores(scores: LevelScores) -> dict[RecommendationLevel, Fraction]:
    """Exact per-level share of the total score; all zero when total is 0."""
    total = scores.total
    if total == 0:
        return {level: Fraction(0) for level in LEVELS}
    return {level: Fraction(scores[level], total) for level in LEVELS}


def basis_point_shares(scores: LevelScores) -> dict[RecommendationLevel, int]:
    """Shares as integer basis points summing to exactly 10000.

    Largest-remainder rounding: every level gets the floor of its exact
    share, then the leftover basis points go to the largest remainders
    (ties broken toward the more conservative level). Zero total gives all
    zeros.
    """
    total = scores.total
    if total == 0:
        return {level: 0 for level in LEVELS}
    base = {}
    remainders = []
    for level in LEVELS:
        raw = scores[level] * BASIS_POINTS
        base[level] = raw // total
        remainders.append((-(raw % total), level))
    leftover = BASIS_POINTS - sum(base.values())
    for _, level in sorted(remainders)[:leftover]:
        base[level] += 1
    return base
