from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from datetime import timedelta

import pytest

from doublescore.models import (
    DecisionRecord,
    EvaluationWindow,
    ExpertVote,
    NotificationRecord,
    Principal,
    ProjectState,
    Role,
    VoterSnapshot,
)
from doublescore.store import NotFound, Store, UnknownReference
from doublescore.voting import DecisionOutcome, LevelScores, RecommendationLevel as L

from .conftest import T0, dist, make_expert, make_project


def vote(project, expert, points=(10, 20, 40, 30), at=T0, comment=None):
    return ExpertVote(
        project_id=project.id,
        expert_id=expert.id,
        distribution=dist(*points),
        comment=comment,
        submitted_at=at,
    )


def decision(project, level=L.HR):
    outcome = DecisionOutcome(level, False, 1, 1000)
    return DecisionRecord(
        project_id=project.id,
        outcome=outcome,
        scores=LevelScores((0, 0, 0, 100_000)),
        shares={"hnr": 0, "nr": 0, "r": 0, "hr": 10_000},
        voters=(VoterSnapshot("exp_x", 1000, dist(0, 0, 0, 100)),),
        badge="Highly Recommended by Experts",
        decided_at=T0,
    )


def open_project(store, project, opened=T0, hours=48):
    window = EvaluationWindow(opened, opened + timedelta(hours=hours))
    assert store.open_evaluation(project.id, window, [])
    return window


class TestVoteLog:
    def test_first_append_gets_sequence_one(self, store):
        expert = make_expert(store)
        project = make_project(store)
        assert store.append_vote(vote(project, expert)) == 1

    def test_sequences_strictly_increase(self, store):
        expert = make_expert(store)
        project = make_project(store)
        seqs = [store.append_vote(vote(project, expert)) for _ in range(5)]
        assert seqs == sorted(seqs)
        assert len(set(seqs)) == 5

    def test_unknown_project_rejected(self, store):
        expert = make_expert(store)
        project = make_project(store)
        bad = ExpertVote("missing", expert.id, dist(10, 20, 40, 30), None, T0)
        with pytest.raises(UnknownReference):
            store.append_vote(bad)
        bad = ExpertVote(project.id, "missing", dist(10, 20, 40, 30), None, T0)
        with pytest.raises(UnknownReference):
            store.append_vote(bad)

    def test_revision_keeps_log_but_changes_effective(self, store):
        expert = make_expert(store)
        project = make_project(store)
        store.append_vote(vote(project, expert, points=(100, 0, 0, 0)))
        store.append_vote(vote(project, expert, points=(0, 0, 0, 100), at=T0 + timedelta(hours=1)))
        effective = store.effective_votes(project.id)
        assert len(effective) == 1
        assert effective[0][0].distribution.points == (0, 0, 0, 100)
        # both appends stay in the log
        log = [r for r in store.export_records() if r["record"] == "vote"]
        assert len(log) == 2
        assert log[0]["points"]["hnr"] == 100

    def test_effective_votes_sorted_one_per_expert(self, store):
        experts = sorted((make_expert(store) for _ in range(3)), key=lambda e: e.id)
        project = make_project(store)
        for e in reversed(experts):
            store.append_vote(vote(project, e))
        effective = store.effective_votes(project.id)
        assert [profile.id for _, profile in effective] == [e.id for e in experts]

    def test_effective_votes_unknown_project(self, store):
        with pytest.raises(NotFound):
            store.effective_votes("missing")

    def test_no_votes_is_empty(self, store):
        project = make_project(store)
        assert store.effective_votes(project.id) == []

    def test_store_has_no_vote_mutation_surface(self, store):
        vote_ops = [n for n in dir(store) if "vote" in n and not n.startswith("_")]
        assert sorted(vote_ops) == ["append_vote", "effective_votes", "voted_project_ids"]


class TestDecideOnce:
    def test_first_store_wins(self, store):
        project = make_project(store)
        open_project(store, project)
        stored, record = store.store_decision_once(decision(project))
        assert stored
        assert store.get_project(project.id).state is ProjectState.DECIDED

    def test_second_store_returns_original(self, store):
        project = make_project(store)
        open_project(store, project)
        store.store_decision_once(decision(project, L.HR))
        stored, existing = store.store_decision_once(decision(project, L.NR))
        assert not stored
        assert existing.outcome.recommendation is L.HR
        assert store.get_decision(project.id).outcome.recommendation is L.HR

    def test_concurrent_stores_one_winner(self, store):
        project = make_project(store)
        open_project(store, project)
        record = decision(project)
        with ThreadPoolExecutor(max_workers=8) as pool:
            results = list(pool.map(lambda _: store.store_decision_once(record), range(16)))
        assert sum(1 for stored, _ in results if stored) == 1

    def test_unknown_project(self, store):
        record = replace(decision(make_project(store)), project_id="missing")
        with pytest.raises(UnknownReference):
            store.store_decision_once(record)


class TestDueProjects:
    def test_due_boundary_inclusive(self, store):
        project = make_project(store)
        window = open_project(store, project)
        assert store.due_projects(window.closes_at) == [project.id]
        assert store.due_projects(window.closes_at - timedelta(microseconds=1)) == []

    def test_decided_never_due(self, store):
        project = make_project(store)
        window = open_project(store, project)
        store.store_decision_once(decision(project))
        assert store.due_projects(window.closes_at + timedelta(days=1)) == []

    def test_pending_never_due(self, store):
        make_project(store)
        assert store.due_projects(T0 + timedelta(days=365)) == []


class TestCrashPersistence:
    def test_reopen_preserves_acknowledged_writes(self, tmp_path):
        path = tmp_path / "crashy.db"
        store = Store(path)
        expert = make_expert(store)
        project = make_project(store)
        open_project(store, project)
        store.append_vote(vote(project, expert))
        store.store_decision_once(decision(project))
        store.put_principal(Principal("u1", Role.ADMIN, "tok-1"))
        store.close()

        reopened = Store(path)
        try:
            assert reopened.get_expert(expert.id) == expert
            assert reopened.get_project(project.id).state is ProjectState.DECIDED
            assert len(reopened.effective_votes(project.id)) == 1
            assert reopened.get_decision(project.id).badge == "Highly Recommended by Experts"
            assert reopened.principal_for_token("tok-1").role is Role.ADMIN
        finally:
            reopened.close()


class TestNotificationsAndPrincipals:
    def test_open_evaluation_writes_outbox(self, store):
        expert = make_expert(store)
        project = make_project(store)
        window = EvaluationWindow(T0, T0 + timedelta(hours=48))
        note = NotificationRecord("ntf-1", expert.id, project.id, T0)
        assert store.open_evaluation(project.id, window, [note])
        got = store.notifications_for_expert(expert.id)
        assert [n.project_id for n in got] == [project.id]
        assert not got[0].read

    def test_open_evaluation_cas(self, store):
        project = make_project(store)
        window = EvaluationWindow(T0, T0 + timedelta(hours=48))
        assert store.open_evaluation(project.id, window, [])
        assert not store.open_evaluation(project.id, window, [])

    def test_principal_roundtrip_and_revocation(self, store):
        store.put_principal(Principal("u9", Role.EXPERT, "tok-9"))
        assert store.principal_for_token("tok-9").user_id == "u9"
        store.remove_principal("tok-9")
        assert store.principal_for_token("tok-9") is None

    def test_unknown_token(self, store):
        assert store.principal_for_token("nope") is None


class TestExport:
    def test_export_covers_all_record_kinds(self, store):
        expert = make_expert(store)
        project = make_project(store)
        window = EvaluationWindow(T0, T0 + timedelta(hours=48))
        note = NotificationRecord("ntf-1", expert.id, project.id, T0)
        assert store.open_evaluation(project.id, window, [note])
        store.append_vote(vote(project, expert, comment="solid plan"))
        store.store_decision_once(decision(project))
        store.put_principal(Principal("u1", Role.ADMIN, "tok-1"))
        kinds = {r["record"] for r in store.export_records()}
        assert kinds == {
            "expert", "project", "vote", "decision", "notification", "principal",
        }
