import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from doublescore.voting import (
    BASIS_POINTS,
    LEVELS,
    BadSum,
    DecisionOutcome,
    InvalidQuorum,
    LevelScores,
    MissingLevel,
    OutOfRange,
    RecommendationLevel as L,
    VoteDistribution,
    WeightedBallot,
    aggregate,
    basis_point_shares,
    decide,
    normalize_scores,
    validate_distribution,
)

from .conftest import ballot, dist, oracle_scores


def raw(hnr, nr, r, hr):
    return {L.HNR: hnr, L.NR: nr, L.R: r, L.HR: hr}


@st.composite
def distributions(draw):
    """Uniformly-shaped valid ballots: three cut points over [0, 100]."""
    cuts = sorted(draw(st.lists(st.integers(0, 100), min_size=3, max_size=3)))
    parts = (cuts[0], cuts[1] - cuts[0], cuts[2] - cuts[1], 100 - cuts[2])
    return VoteDistribution(parts)


@st.composite
def panels(draw, max_experts=8):
    n = draw(st.integers(1, max_experts))
    return [
        WeightedBallot(draw(st.integers(0, 1000)), draw(distributions()))
        for _ in range(n)
    ]


class TestValidateDistribution:
    def test_valid(self):
        d = validate_distribution(raw(10, 20, 40, 30))
        assert d.points == (10, 20, 40, 30)
        assert d[L.R] == 40

    def test_bad_sum(self):
        with pytest.raises(BadSum) as err:
            validate_distribution(raw(25, 25, 25, 26))
        assert err.value.actual == 101

    def test_negative_value(self):
        with pytest.raises(OutOfRange):
            validate_distribution(raw(-5, 35, 35, 35))

    def test_value_above_hundred(self):
        with pytest.raises(OutOfRange):
            validate_distribution({L.HNR: 101, L.NR: 0, L.R: 0, L.HR: -1})

    def test_missing_level(self):
        with pytest.raises(MissingLevel) as err:
            validate_distribution({L.HNR: 50, L.NR: 50})
        assert err.value.level is L.R

    def test_non_integer_rejected(self):
        with pytest.raises(OutOfRange):
            validate_distribution(raw(10.5, 19.5, 40, 30))
        with pytest.raises(OutOfRange):
            validate_distribution(raw(True, 29, 40, 30))

    def test_input_not_mutated(self):
        points = raw(10, 20, 40, 30)
        snapshot = dict(points)
        validate_distribution(points)
        assert points == snapshot


class TestAggregate:
    def test_single_expert_all_in(self):
        scores = aggregate([ballot(1000, (0, 0, 0, 100))])
        assert scores.scores == (0, 0, 0, 100_000)

    def test_empty_panel(self):
        assert aggregate([]).scores == (0, 0, 0, 0)

    def test_three_expert_panel(self):
        # Recomputed with the naive (ballot, level) double loop in
        # oracle_scores before being frozen here.
        panel = [
            ballot(200, (0, 0, 20, 80)),
            ballot(100, (10, 20, 50, 20)),
            ballot(100, (0, 50, 50, 0)),
        ]
        expected = oracle_scores(panel)
        assert expected == {L.HNR: 1000, L.NR: 7000, L.R: 14000, L.HR: 18000}
        assert aggregate(panel).as_dict() == expected

    def test_zero_weight_ballot_changes_nothing(self):
        panel = [ballot(200, (0, 0, 20, 80)), ballot(100, (10, 20, 50, 20))]
        with_zero = panel + [ballot(0, (100, 0, 0, 0))]
        assert aggregate(panel) == aggregate(with_zero)

    def test_oracle_equivalence_random_panels(self):
        rng = random.Random(20260302)
        for _ in range(300):
            panel = [
                ballot(rng.randint(0, 1000), _random_points(rng))
                for _ in range(rng.randint(0, 10))
            ]
            assert aggregate(panel).as_dict() == oracle_scores(panel)

    @given(panels())
    def test_order_invariance(self, panel):
        shuffled = list(panel)
        random.Random(7).shuffle(shuffled)
        assert aggregate(shuffled) == aggregate(panel)

    @given(panels(), st.integers(1, 10))
    def test_scaling_credibility_scales_scores(self, panel, k):
        # keep scaled weights inside the 0..1000 cap
        base_panel = [
            WeightedBallot(b.credibility // k, b.distribution) for b in panel
        ]
        scaled_panel = [
            WeightedBallot(b.credibility * k, b.distribution) for b in base_panel
        ]
        base = aggregate(base_panel)
        scaled = aggregate(scaled_panel)
        assert all(scaled[lvl] == k * base[lvl] for lvl in LEVELS)
        base_total = sum(b.credibility for b in base_panel)
        a = decide(base, len(base_panel), base_total, quorum=1)
        b = decide(scaled, len(scaled_panel), base_total * k, quorum=1)
        assert (a.kind, a.recommendation, a.tie_applied) == (
            b.kind, b.recommendation, b.tie_applied
        )


def _random_points(rng):
    cuts = sorted(rng.randint(0, 100) for _ in range(3))
    return (cuts[0], cuts[1] - cuts[0], cuts[2] - cuts[1], 100 - cuts[2])


class TestDecide:
    def test_unique_maximum(self):
        outcome = decide(LevelScores((0, 0, 0, 100_000)), 1, 1000, quorum=1)
        assert outcome == DecisionOutcome(L.HR, False, 1, 1000)

    def test_tie_breaks_conservative(self):
        outcome = decide(LevelScores((0, 0, 1000, 1000)), 2, 2000, quorum=1)
        assert outcome.recommendation is L.R
        assert outcome.tie_applied

    def test_no_votes_is_insufficient(self):
        outcome = decide(LevelScores((0, 0, 0, 0)), 0, 0, quorum=1)
        assert outcome.insufficient
        assert outcome.kind == "insufficient_participation"
        assert not outcome.tie_applied

    def test_zero_total_weight_is_insufficient(self):
        outcome = decide(LevelScores((0, 0, 0, 0)), 3, 0, quorum=1)
        assert outcome.insufficient

    def test_below_quorum_is_insufficient(self):
        outcome = decide(LevelScores((0, 0, 0, 50_000)), 2, 1000, quorum=3)
        assert outcome.insufficient

    def test_invalid_quorum(self):
        with pytest.raises(InvalidQuorum):
            decide(LevelScores((0, 0, 0, 0)), 0, 0, quorum=0)

    def test_all_level_ties_pick_hnr(self):
        outcome = decide(LevelScores((25_000,) * 4), 1, 1000, quorum=1)
        assert outcome.recommendation is L.HNR
        assert outcome.tie_applied

    @given(panels())
    def test_unanimity(self, panel):
        target = L.NR
        unanimous = [
            WeightedBallot(b.credibility, dist(0, 100, 0, 0)) for b in panel
        ]
        total = sum(b.credibility for b in unanimous)
        outcome = decide(aggregate(unanimous), len(unanimous), total, quorum=1)
        if total > 0:
            assert outcome.recommendation is target


class TestNormalize:
    def test_single_nonzero(self):
        shares = normalize_scores(LevelScores((0, 0, 0, 100_000)))
        assert shares == {L.HNR: 0, L.NR: 0, L.R: 0, L.HR: 1}

    def test_worked_panel_shares(self):
        # 1000+7000+14000+18000 = 40000
        shares = normalize_scores(LevelScores((1000, 7000, 14000, 18000)))
        assert shares == {
            L.HNR: Fraction(1, 40),
            L.NR: Fraction(7, 40),
            L.R: Fraction(35, 100),
            L.HR: Fraction(45, 100),
        }
        assert sum(shares.values()) == 1

    def test_zero_total(self):
        assert normalize_scores(LevelScores((0, 0, 0, 0))) == {
            lvl: 0 for lvl in LEVELS
        }
        assert basis_point_shares(LevelScores((0, 0, 0, 0))) == {
            lvl: 0 for lvl in LEVELS
        }

    def test_basis_points_worked_panel(self):
        bp = basis_point_shares(LevelScores((1000, 7000, 14000, 18000)))
        assert bp == {L.HNR: 250, L.NR: 1750, L.R: 3500, L.HR: 4500}

    def test_basis_points_largest_remainder(self):
        # 10000/3 leaves one leftover point; equal remainders go to the
        # most conservative level first.
        bp = basis_point_shares(LevelScores((1, 1, 1, 0)))
        assert bp == {L.HNR: 3334, L.NR: 3333, L.R: 3333, L.HR: 0}

    @given(st.tuples(*(st.integers(0, 10**9) for _ in range(4))))
    def test_basis_points_always_sum(self, scores):
        bp = basis_point_shares(LevelScores(scores))
        if sum(scores) == 0:
            assert all(v == 0 for v in bp.values())
        else:
            assert sum(bp.values()) == BASIS_POINTS


class TestMonotonicity:
    def test_moving_points_moves_scores(self):
        rng = random.Random(99)
        for _ in range(200):
            points = list(_random_points(rng))
            src_options = [lvl for lvl in LEVELS if points[lvl] > 0]
            if not src_options:
                continue
            src = rng.choice(src_options)
            dst_options = [
                lvl for lvl in LEVELS if lvl != src and points[lvl] < 100
            ]
            if not dst_options:
                continue
            dst = rng.choice(dst_options)
            p = rng.randint(1, min(points[src], 100 - points[dst]))
            credibility = rng.randint(1, 1000)
            before = aggregate([ballot(credibility, tuple(points))])
            moved = list(points)
            moved[src] -= p
            moved[dst] += p
            after = aggregate([ballot(credibility, tuple(moved))])
            assert after[dst] - before[dst] == credibility * p
            assert before[src] - after[src] == credibility * p
            for lvl in LEVELS:
                if lvl not in (src, dst):
                    assert after[lvl] == before[lvl]
