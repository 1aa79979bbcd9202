"""Synthetic expert panels for mechanism comparison.

The generative model: an expert with competence c places each of their 100
points independently on the true level with probability 0.25 + 0.75*c, and
otherwise uniformly on one of the other three levels. Competence 0 is pure
noise, competence 1 a perfect signal, and every generated ballot satisfies
the distribution invariants by construction.

Probabilities are handled as exact rationals: the placement draw u (a
uint64 stream value) hits the truth level iff u <= floor(a * 2**64) - 1,
which equals probability a exactly for a = 1 and to within 2**-64
otherwise. Same (spec, truth) always yields the same panel.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

import numpy as np

from doublescore.lab.kernels import panel_points
from doublescore.lab.rng import MASK64
from doublescore.voting import (
    MAX_CREDIBILITY,
    RecommendationLevel,
    VoteDistribution,
    WeightedBallot,
)


class CredibilityMode(str, Enum):
    """How synthetic credibility relates to competence."""

    INFORMATIVE = "informative"  # credibility = round(1000 * competence)
    UNIFORM = "uniform"          # every expert weighted 1000


@dataclass(frozen=True)
class PanelSpec:
    """Shape of a synthetic panel: who votes and how well-informed they are."""

    expert_count: int
    competence: tuple[Fraction, ...]
    credibility_mode: CredibilityMode
    seed: int

    def __post_init__(self):
        if self.expert_count < 1:
            raise ValueError(f"expert_count must be >= 1, got {self.expert_count}")
        if len(self.competence) != self.expert_count:
            raise ValueError(
                f"expected {self.expert_count} competence values, got {len(self.competence)}"
            )
        for c in self.competence:
            if not 0 <= c <= 1:
                raise ValueError(f"competence must lie in [0, 1], got {c}")
        if not 0 <= self.seed <= MASK64:
            raise ValueError("seed must be an unsigned 64-bit integer")

    def credibilities(self) -> tuple[int, ...]:
        if self.credibility_mode is CredibilityMode.UNIFORM:
            return (MAX_CREDIBILITY,) * self.expert_count
        return tuple(round(MAX_CREDIBILITY * c) for c in self.competence)


def accuracy(competence: Fraction) -> Fraction:
    """Chance a single point lands on the true level."""
    return Fraction(1, 4) + Fraction(3, 4) * competence


def acceptance_limit(competence: Fraction) -> int:
    """Largest uint64 draw that counts as hitting the truth level.

    floor(a * 2**64) - 1 for a = accuracy(competence); a >= 1/4 keeps this
    non-negative, and a = 1 gives 2**64 - 1 (every draw hits).
    """
    a = accuracy(competence)
    return (a.numerator << 64) // a.denominator - 1


def generate_panel(spec: PanelSpec, truth: RecommendationLevel) -> list[WeightedBallot]:
    """Generate one ballot per expert, deterministically from (spec, truth)."""
    limits = np.array([acceptance_limit(c) for c in spec.competence], dtype=np.uint64)
    counts = panel_points(spec.seed, limits, int(truth))
    return [
        WeightedBallot(credibility, VoteDistribution(tuple(int(n) for n in row)))
        for credibility, row in zip(spec.credibilities(), counts)
    ]
