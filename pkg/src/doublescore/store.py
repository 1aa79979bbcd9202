"""Embedded persistence: users, projects, append-only votes, decisions.

A single sqlite file behind a narrow contract. Votes are an append-only
log (there is deliberately no update or delete operation for them); the
decision table enforces at-most-one record per project, and the
pending -> under-evaluation and decide-once transitions are compare-and-set
writes inside immediate transactions, so every operation here is atomic
and linearizable with respect to the others.

Connections are per-thread (WAL journal, foreign keys on) which makes the
store safe to share across request handlers and the sweeper. The schema
carries a version tag in ``PRAGMA user_version``.
"""

from __future__ import annotations

import json
import sqlite3
import threading
from contextlib import contextmanager
from datetime import datetime
from pathlib import Path
from typing import Iterator

from doublescore.models import (
    DecisionRecord,
    EvaluationWindow,
    ExpertProfile,
    ExpertVote,
    NotificationRecord,
    Principal,
    Project,
    ProjectState,
    Role,
    VoterSnapshot,
    from_micros,
    to_micros,
)
from doublescore.voting import (
    LEVELS,
    DecisionOutcome,
    LevelScores,
    RecommendationLevel,
    VoteDistribution,
)

SCHEMA_VERSION = 1

_SCHEMA = """
CREATE TABLE IF NOT EXISTS experts (
    id              TEXT PRIMARY KEY,
    display_name    TEXT NOT NULL,
    credibility     INTEGER NOT NULL CHECK (credibility BETWEEN 0 AND 1000),
    specializations TEXT NOT NULL,
    active          INTEGER NOT NULL DEFAULT 1
);
CREATE TABLE IF NOT EXISTS projects (
    id           TEXT PRIMARY KEY,
    creator_id   TEXT NOT NULL,
    title        TEXT NOT NULL,
    description  TEXT NOT NULL,
    categories   TEXT NOT NULL,
    funding_goal INTEGER NOT NULL,
    state        TEXT NOT NULL
                 CHECK (state IN ('pending_approval', 'under_evaluation', 'decided')),
    opened_at_us INTEGER,
    closes_at_us INTEGER
);
CREATE TABLE IF NOT EXISTS votes (
    seq             INTEGER PRIMARY KEY AUTOINCREMENT,
    project_id      TEXT NOT NULL REFERENCES projects(id),
    expert_id       TEXT NOT NULL REFERENCES experts(id),
    hnr             INTEGER NOT NULL,
    nr              INTEGER NOT NULL,
    r               INTEGER NOT NULL,
    hr              INTEGER NOT NULL,
    comment         TEXT,
    submitted_at_us INTEGER NOT NULL
);
CREATE TABLE IF NOT EXISTS decisions (
    project_id    TEXT PRIMARY KEY REFERENCES projects(id),
    kind          TEXT NOT NULL,
    level         TEXT,
    tie_applied   INTEGER NOT NULL,
    vote_count    INTEGER NOT NULL,
    total_weight  INTEGER NOT NULL,
    scores        TEXT NOT NULL,
    shares        TEXT NOT NULL,
    voters        TEXT NOT NULL,
    badge         TEXT NOT NULL,
    decided_at_us INTEGER NOT NULL
);
CREATE TABLE IF NOT EXISTS notifications (
    id            TEXT PRIMARY KEY,
    expert_id     TEXT NOT NULL REFERENCES experts(id),
    project_id    TEXT NOT NULL REFERENCES projects(id),
    created_at_us INTEGER NOT NULL,
    read          INTEGER NOT NULL DEFAULT 0,
    UNIQUE (expert_id, project_id)
);
CREATE TABLE IF NOT EXISTS principals (
    token   TEXT PRIMARY KEY,
    user_id TEXT NOT NULL,
    role    TEXT NOT NULL
);
CREATE INDEX IF NOT EXISTS votes_by_project ON votes (project_id, expert_id, seq);
CREATE INDEX IF NOT EXISTS projects_due ON projects (state, closes_at_us);
"""


class NotFound(LookupError):
    """The referenced record does not exist."""


class AlreadyApproved(ValueError):
    """The project already left the pending-approval state."""


class UnknownReference(ValueError):
    """A write referenced a project or expert that does not exist."""


class Store:
    """sqlite-backed store; one instance may be shared across threads."""

    def __init__(self, path: str | Path):
        self._path = str(path)
        if self._path != ":memory:":
            Path(self._path).parent.mkdir(parents=True, exist_ok=True)
        self._local = threading.local()
        self._conns: list[sqlite3.Connection] = []
        self._conns_lock = threading.Lock()
        conn = self._conn()  # autocommit mode; executescript commits as it goes
        version = conn.execute("PRAGMA user_version").fetchone()[0]
        if version not in (0, SCHEMA_VERSION):
            raise ValueError(f"unsupported store schema version {version}")
        conn.executescript(_SCHEMA)
        conn.execute(f"PRAGMA user_version = {SCHEMA_VERSION}")

    # -- connection plumbing -------------------------------------------------

    def _conn(self) -> sqlite3.Connection:
        conn = getattr(self._local, "conn", None)
        if conn is None:
            conn = sqlite3.connect(self._path, check_same_thread=False)
            conn.isolation_level = None  # explicit BEGIN/COMMIT below
            conn.row_factory = sqlite3.Row
            conn.execute("PRAGMA journal_mode = WAL")
            conn.execute("PRAGMA busy_timeout = 10000")
            conn.execute("PRAGMA foreign_keys = ON")
            conn.execute("PRAGMA synchronous = NORMAL")
            self._local.conn = conn
            with self._conns_lock:
                self._conns.append(conn)
        return conn

    @contextmanager
    def _write(self) -> Iterator[sqlite3.Connection]:
        conn = self._conn()
        conn.execute("BEGIN IMMEDIATE")
        try:
            yield conn
        except BaseException:
            conn.execute("ROLLBACK")
            raise
        conn.execute("COMMIT")

    def close(self) -> None:
        with self._conns_lock:
            for conn in self._conns:
                try:
                    conn.close()
                except sqlite3.ProgrammingError:
                    pass
            self._conns.clear()
        self._local = threading.local()

    def __enter__(self) -> "Store":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    # -- experts ---------------------------------------------------------------

    def add_expert(self, profile: ExpertProfile) -> None:
        with self._write() as conn:
            try:
                conn.execute(
                    "INSERT INTO experts (id, display_name, credibility, specializations, active)"
                    " VALUES (?, ?, ?, ?, ?)",
                    (
                        profile.id,
                        profile.display_name,
                        profile.credibility,
                        _tags_json(profile.specializations),
                        int(profile.active),
                    ),
                )
            except sqlite3.IntegrityError:
                raise ValueError(f"expert {profile.id!r} already exists") from None

    def get_expert(self, expert_id: str) -> ExpertProfile | None:
        row = self._conn().execute(
            "SELECT * FROM experts WHERE id = ?", (expert_id,)
        ).fetchone()
        return _expert_from_row(row) if row else None

    def list_experts(self) -> list[ExpertProfile]:
        rows = self._conn().execute("SELECT * FROM experts ORDER BY id").fetchall()
        return [_expert_from_row(row) for row in rows]

    def set_expert_credibility(self, expert_id: str, credibility: int) -> None:
        with self._write() as conn:
            cur = conn.execute(
                "UPDATE experts SET credibility = ? WHERE id = ?",
                (credibility, expert_id),
            )
            if cur.rowcount == 0:
                raise NotFound(f"expert {expert_id!r} not found")

    def set_expert_active(self, expert_id: str, active: bool) -> None:
        with self._write() as conn:
            cur = conn.execute(
                "UPDATE experts SET active = ? WHERE id = ?", (int(active), expert_id)
            )
            if cur.rowcount == 0:
                raise NotFound(f"expert {expert_id!r} not found")

    # -- projects ----------------------------------------------------------------

    def add_project(self, project: Project) -> None:
        with self._write() as conn:
            try:
                conn.execute(
                    "INSERT INTO projects (id, creator_id, title, description, categories,"
                    " funding_goal, state, opened_at_us, closes_at_us)"
                    " VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?)",
                    (
                        project.id,
                        project.creator_id,
                        project.title,
                        project.description,
                        _tags_json(project.categories),
                        project.funding_goal,
                        project.state.value,
                        to_micros(project.window.opened_at) if project.window else None,
                        to_micros(project.window.closes_at) if project.window else None,
                    ),
                )
            except sqlite3.IntegrityError:
                raise ValueError(f"project {project.id!r} already exists") from None

    def get_project(self, project_id: str) -> Project | None:
        row = self._conn().execute(
            "SELECT * FROM projects WHERE id = ?", (project_id,)
        ).fetchone()
        return _project_from_row(row) if row else None

    def list_projects(self, state: ProjectState | None = None) -> list[Project]:
        if state is None:
            rows = self._conn().execute("SELECT * FROM projects ORDER BY id").fetchall()
        else:
            rows = self._conn().execute(
                "SELECT * FROM projects WHERE state = ? ORDER BY id", (state.value,)
            ).fetchall()
        return [_project_from_row(row) for row in rows]

    def open_evaluation(
        self,
        project_id: str,
        window: EvaluationWindow,
        notifications: list[NotificationRecord],
    ) -> bool:
        """CAS pending -> under-evaluation; False when the project was not pending.

        The notification outbox rows land in the same transaction, so a
        successful approval and its expert notifications are atomic.
        """
        with self._write() as conn:
            cur = conn.execute(
                "UPDATE projects SET state = ?, opened_at_us = ?, closes_at_us = ?"
                " WHERE id = ? AND state = ?",
                (
                    ProjectState.UNDER_EVALUATION.value,
                    to_micros(window.opened_at),
                    to_micros(window.closes_at),
                    project_id,
                    ProjectState.PENDING_APPROVAL.value,
                ),
            )
            if cur.rowcount == 0:
                return False
            for note in notifications:
                conn.execute(
                    "INSERT INTO notifications (id, expert_id, project_id, created_at_us, read)"
                    " VALUES (?, ?, ?, ?, ?)",
                    (
                        note.id,
                        note.expert_id,
                        note.project_id,
                        to_micros(note.created_at),
                        int(note.read),
                    ),
                )
            return True

    def due_projects(self, now: datetime) -> list[str]:
        rows = self._conn().execute(
            "SELECT id FROM projects WHERE state = ? AND closes_at_us <= ? ORDER BY id",
            (ProjectState.UNDER_EVALUATION.value, to_micros(now)),
        ).fetchall()
        return [row["id"] for row in rows]

    # -- vote log ---------------------------------------------------------------

    def append_vote(self, vote: ExpertVote) -> int:
        """Append to the vote log; returns the assigned sequence number."""
        with self._write() as conn:
            if not _row_exists(conn, "projects", vote.project_id):
                raise UnknownReference(f"project {vote.project_id!r} not found")
            if not _row_exists(conn, "experts", vote.expert_id):
                raise UnknownReference(f"expert {vote.expert_id!r} not found")
            cur = conn.execute(
                "INSERT INTO votes (project_id, expert_id, hnr, nr, r, hr, comment,"
                " submitted_at_us) VALUES (?, ?, ?, ?, ?, ?, ?, ?)",
                (
                    vote.project_id,
                    vote.expert_id,
                    *(vote.distribution[level] for level in LEVELS),
                    vote.comment,
                    to_micros(vote.submitted_at),
                ),
            )
            return cur.lastrowid

    def effective_votes(self, project_id: str) -> list[tuple[ExpertVote, ExpertProfile]]:
        """Latest appended vote per expert, joined with the current profile.

        Sorted by expert id. The append order (sequence number) is the
        authority on which revision counts, so last write wins even if a
        caller-supplied clock regressed between revisions.
        """
        conn = self._conn()
        if not _row_exists(conn, "projects", project_id):
            raise NotFound(f"project {project_id!r} not found")
        rows = conn.execute(
            "SELECT v.*, e.display_name, e.credibility, e.specializations, e.active"
            " FROM votes v"
            " JOIN (SELECT expert_id, MAX(seq) AS top FROM votes WHERE project_id = ?"
            "       GROUP BY expert_id) latest"
            "   ON v.expert_id = latest.expert_id AND v.seq = latest.top"
            " JOIN experts e ON e.id = v.expert_id"
            " ORDER BY v.expert_id",
            (project_id,),
        ).fetchall()
        out = []
        for row in rows:
            vote = ExpertVote(
                project_id=row["project_id"],
                expert_id=row["expert_id"],
                distribution=VoteDistribution(
                    (row["hnr"], row["nr"], row["r"], row["hr"])
                ),
                comment=row["comment"],
                submitted_at=from_micros(row["submitted_at_us"]),
            )
            out.append((vote, _expert_from_row(row, id_key="expert_id")))
        return out

    def voted_project_ids(self, expert_id: str) -> set[str]:
        rows = self._conn().execute(
            "SELECT DISTINCT project_id FROM votes WHERE expert_id = ?", (expert_id,)
        ).fetchall()
        return {row["project_id"] for row in rows}

    # -- decisions ---------------------------------------------------------------

    def store_decision_once(self, record: DecisionRecord) -> tuple[bool, DecisionRecord]:
        """Compare-and-set: first caller stores and flips the project to decided.

        Returns (True, record) for the winning write and (False, existing)
        for everyone else; the existing record is never overwritten.
        """
        with self._write() as conn:
            if not _row_exists(conn, "projects", record.project_id):
                raise UnknownReference(f"project {record.project_id!r} not found")
            row = conn.execute(
                "SELECT * FROM decisions WHERE project_id = ?", (record.project_id,)
            ).fetchone()
            if row is not None:
                return False, _decision_from_row(row)
            outcome = record.outcome
            conn.execute(
                "INSERT INTO decisions (project_id, kind, level, tie_applied, vote_count,"
                " total_weight, scores, shares, voters, badge, decided_at_us)"
                " VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?)",
                (
                    record.project_id,
                    outcome.kind,
                    outcome.recommendation.wire_name if outcome.recommendation else None,
                    int(outcome.tie_applied),
                    outcome.vote_count,
                    outcome.total_weight,
                    json.dumps(record.scores.wire_dict(), sort_keys=True),
                    json.dumps(record.shares, sort_keys=True),
                    json.dumps(
                        [
                            [v.expert_id, v.credibility, list(v.distribution.points)]
                            for v in record.voters
                        ]
                    ),
                    record.badge,
                    to_micros(record.decided_at),
                ),
            )
            conn.execute(
                "UPDATE projects SET state = ? WHERE id = ?",
                (ProjectState.DECIDED.value, record.project_id),
            )
            return True, record

    def get_decision(self, project_id: str) -> DecisionRecord | None:
        row = self._conn().execute(
            "SELECT * FROM decisions WHERE project_id = ?", (project_id,)
        ).fetchone()
        return _decision_from_row(row) if row else None

    # -- notifications ----------------------------------------------------------

    def notifications_for_expert(
        self, expert_id: str, unread_only: bool = True
    ) -> list[NotificationRecord]:
        sql = "SELECT * FROM notifications WHERE expert_id = ?"
        if unread_only:
            sql += " AND read = 0"
        rows = self._conn().execute(sql + " ORDER BY created_at_us, id", (expert_id,)).fetchall()
        return [
            NotificationRecord(
                id=row["id"],
                expert_id=row["expert_id"],
                project_id=row["project_id"],
                created_at=from_micros(row["created_at_us"]),
                read=bool(row["read"]),
            )
            for row in rows
        ]

    # -- principals ---------------------------------------------------------------

    def put_principal(self, principal: Principal) -> None:
        with self._write() as conn:
            conn.execute(
                "INSERT OR REPLACE INTO principals (token, user_id, role) VALUES (?, ?, ?)",
                (principal.token, principal.user_id, principal.role.value),
            )

    def principal_for_token(self, token: str) -> Principal | None:
        row = self._conn().execute(
            "SELECT * FROM principals WHERE token = ?", (token,)
        ).fetchone()
        if row is None:
            return None
        return Principal(user_id=row["user_id"], role=Role(row["role"]), token=row["token"])

    def remove_principal(self, token: str) -> None:
        with self._write() as conn:
            conn.execute("DELETE FROM principals WHERE token = ?", (token,))

    # -- export -----------------------------------------------------------------

    def export_records(self) -> Iterator[dict]:
        """All records as plain dicts, one per row, in a stable order."""
        conn = self._conn()
        for profile in self.list_experts():
            yield {
                "record": "expert",
                "id": profile.id,
                "display_name": profile.display_name,
                "credibility": profile.credibility,
                "specializations": sorted(profile.specializations),
                "active": profile.active,
            }
        for project in self.list_projects():
            yield {
                "record": "project",
                "id": project.id,
                "creator_id": project.creator_id,
                "title": project.title,
                "description": project.description,
                "categories": sorted(project.categories),
                "funding_goal": project.funding_goal,
                "state": project.state.value,
                "opened_at": project.window.opened_at.isoformat() if project.window else None,
                "closes_at": project.window.closes_at.isoformat() if project.window else None,
            }
        for row in conn.execute("SELECT * FROM votes ORDER BY seq").fetchall():
            yield {
                "record": "vote",
                "seq": row["seq"],
                "project_id": row["project_id"],
                "expert_id": row["expert_id"],
                "points": {
                    level.wire_name: row[level.wire_name] for level in LEVELS
                },
                "comment": row["comment"],
                "submitted_at": from_micros(row["submitted_at_us"]).isoformat(),
            }
        for row in conn.execute("SELECT * FROM decisions ORDER BY project_id").fetchall():
            record = _decision_from_row(row)
            yield {
                "record": "decision",
                "project_id": record.project_id,
                "kind": record.outcome.kind,
                "level": record.outcome.recommendation.wire_name
                if record.outcome.recommendation
                else None,
                "tie_applied": record.outcome.tie_applied,
                "vote_count": record.outcome.vote_count,
                "total_weight": record.outcome.total_weight,
                "scores": record.scores.wire_dict(),
                "shares": record.shares,
                "voters": [
                    {
                        "expert_id": v.expert_id,
                        "credibility": v.credibility,
                        "points": v.distribution.wire_dict(),
                    }
                    for v in record.voters
                ],
                "badge": record.badge,
                "decided_at": record.decided_at.isoformat(),
            }
        for row in conn.execute("SELECT * FROM notifications ORDER BY id").fetchall():
            yield {
                "record": "notification",
                "id": row["id"],
                "expert_id": row["expert_id"],
                "project_id": row["project_id"],
                "created_at": from_micros(row["created_at_us"]).isoformat(),
                "read": bool(row["read"]),
            }
        for row in conn.execute("SELECT * FROM principals ORDER BY token").fetchall():
            yield {
                "record": "principal",
                "token": row["token"],
                "user_id": row["user_id"],
                "role": row["role"],
            }


# -- row mapping ------------------------------------------------------------


def _tags_json(tags: frozenset[str]) -> str:
    return json.dumps(sorted(tags))


def _row_exists(conn: sqlite3.Connection, table: str, record_id: str) -> bool:
    assert table in ("projects", "experts")
    row = conn.execute(f"SELECT 1 FROM {table} WHERE id = ?", (record_id,)).fetchone()
    return row is not None


def _expert_from_row(row: sqlite3.Row, id_key: str = "id") -> ExpertProfile:
    return ExpertProfile(
        id=row[id_key],
        display_name=row["display_name"],
        credibility=row["credibility"],
        specializations=frozenset(json.loads(row["specializations"])),
        active=bool(row["active"]),
    )


def _project_from_row(row: sqlite3.Row) -> Project:
    window = None
    if row["opened_at_us"] is not None:
        window = EvaluationWindow(
            opened_at=from_micros(row["opened_at_us"]),
            closes_at=from_micros(row["closes_at_us"]),
        )
    return Project(
        id=row["id"],
        creator_id=row["creator_id"],
        title=row["title"],
        description=row["description"],
        categories=frozenset(json.loads(row["categories"])),
        funding_goal=row["funding_goal"],
        state=ProjectState(row["state"]),
        window=window,
    )


def _decision_from_row(row: sqlite3.Row) -> DecisionRecord:
    level = RecommendationLevel[row["level"].upper()] if row["level"] else None
    outcome = DecisionOutcome(
        recommendation=level,
        tie_applied=bool(row["tie_applied"]),
        vote_count=row["vote_count"],
        total_weight=row["total_weight"],
    )
    scores_wire = json.loads(row["scores"])
    scores = LevelScores(tuple(scores_wire[level.wire_name] for level in LEVELS))
    voters = tuple(
        VoterSnapshot(
            expert_id=item[0],
            credibility=item[1],
            distribution=VoteDistribution(tuple(item[2])),
        )
        for item in json.loads(row["voters"])
    )
    return DecisionRecord(
        project_id=row["project_id"],
        outcome=outcome,
        scores=scores,
        shares=json.loads(row["shares"]),
        voters=voters,
        badge=row["badge"],
        decided_at=from_micros(row["decided_at_us"]),
    )
