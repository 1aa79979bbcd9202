"""Credibility-weighted expert score voting.

Library layout:

- ``voting``    pure ballot validation, aggregation, and decision rules
- ``lab``       baseline mechanisms and the seeded comparison harness
- ``models``    shared domain records (projects, experts, votes, decisions)
- ``store``     embedded sqlite-backed persistence contract
- ``workflow``  project lifecycle engine (approve, vote, finalize, sweep)
- ``api``       REST service and the periodic sweeper
- ``cli``       ``doublescore`` command line entry point
"""

from doublescore.voting import (
    BadSum,
    BallotError,
    DecisionOutcome,
    InvalidQuorum,
    LevelScores,
    MissingLevel,
    OutOfRange,
    RecommendationLevel,
    VoteDistribution,
    WeightedBallot,
    aggregate,
    basis_point_shares,
    decide,
    normalize_scores,
    validate_distribution,
)

__version__ = "0.1.0"

__all__ = [
    "BadSum",
    "BallotError",
    "DecisionOutcome",
    "InvalidQuorum",
    "LevelScores",
    "MissingLevel",
    "OutOfRange",
    "RecommendationLevel",
    "VoteDistribution",
    "WeightedBallot",
    "aggregate",
    "basis_point_shares",
    "decide",
    "normalize_scores",
    "validate_distribution",
    "__version__",
]
