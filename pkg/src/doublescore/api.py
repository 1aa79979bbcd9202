"""REST service: role-gated workflow endpoints plus the periodic sweeper.

Every mutating endpoint is a thin adapter over the workflow engine; the
domain exceptions map 1:1 to HTTP statuses (see ERROR_STATUS, mirrored in
the README). No business rule lives only here.

Anonymity rule: responses to non-admin callers never place an expert
identifier next to a comment; decided-project payloads carry comments as a
bare list of strings, and the per-voter snapshot is an admin-only field.
"""

from __future__ import annotations

import logging
import secrets
import threading
from contextlib import asynccontextmanager
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path
from typing import Any, Callable

from fastapi import Body, Depends, FastAPI, HTTPException, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, RedirectResponse
from fastapi.staticfiles import StaticFiles

from doublescore.models import (
    CommentTooLong,
    ExpertProfile,
    Principal,
    Project,
    ProjectState,
    Role,
    new_id,
    utc_now,
)
from doublescore.store import AlreadyApproved, NotFound, Store, UnknownReference
from doublescore.voting import (
    BallotError,
    CredibilityOutOfRange,
    LEVELS,
    validate_credibility,
)
from doublescore.workflow import (
    EngineConfig,
    NotEligible,
    WindowClosed,
    WindowStillOpen,
    WorkflowEngine,
    outcome_badge,
)

logger = logging.getLogger(__name__)

Clock = Callable[[], datetime]


@dataclass
class ServiceConfig:
    """Runtime settings; env vars override defaults, CLI flags override both."""

    listen_addr: str = "127.0.0.1:8000"
    window_hours: int = 48
    quorum: int = 1
    sweep_interval_seconds: int = 30
    data_path: str = "doublescore.db"
    ui_dir: str | None = None

    def __post_init__(self):
        if self.window_hours < 1:
            raise ValueError("window hours must be >= 1")
        if self.quorum < 1:
            raise ValueError("quorum must be >= 1")
        if self.sweep_interval_seconds < 1:
            raise ValueError("sweep interval must be >= 1 second")

    @classmethod
    def from_env(cls, env) -> "ServiceConfig":
        cfg = cls()
        if "LISTEN_ADDR" in env:
            cfg.listen_addr = env["LISTEN_ADDR"]
        if "WINDOW_HOURS" in env:
            cfg.window_hours = int(env["WINDOW_HOURS"])
        if "QUORUM" in env:
            cfg.quorum = int(env["QUORUM"])
        if "SWEEP_INTERVAL_SECONDS" in env:
            cfg.sweep_interval_seconds = int(env["SWEEP_INTERVAL_SECONDS"])
        if "DATA_PATH" in env:
            cfg.data_path = env["DATA_PATH"]
        if "UI_DIR" in env:
            cfg.ui_dir = env["UI_DIR"]
        cfg.__post_init__()
        return cfg

    @property
    def host(self) -> str:
        return self.listen_addr.rsplit(":", 1)[0]

    @property
    def port(self) -> int:
        return int(self.listen_addr.rsplit(":", 1)[1])


ERROR_STATUS: list[tuple[type[Exception], int, str]] = [
    (NotFound, 404, "not_found"),
    (AlreadyApproved, 409, "already_approved"),
    (WindowClosed, 409, "window_closed"),
    (WindowStillOpen, 409, "window_still_open"),
    (NotEligible, 403, "not_eligible"),
    (BallotError, 400, "invalid_ballot"),
    (CommentTooLong, 400, "comment_too_long"),
    (CredibilityOutOfRange, 400, "credibility_out_of_range"),
    (UnknownReference, 400, "unknown_reference"),
]


def _unauthorized() -> HTTPException:
    return HTTPException(401, {"error": "unauthorized", "message": "a valid bearer token is required"})


def _forbidden(message: str) -> HTTPException:
    return HTTPException(403, {"error": "forbidden", "message": message})


def _bad_request(message: str) -> HTTPException:
    return HTTPException(400, {"error": "bad_request", "message": message})


def _store(request: Request) -> Store:
    return request.app.state.store


def _engine(request: Request) -> WorkflowEngine:
    return request.app.state.engine


def _now(request: Request) -> datetime:
    return request.app.state.clock()


def _token(request: Request) -> str | None:
    header = request.headers.get("authorization")
    if header is None:
        return None
    scheme, _, token = header.partition(" ")
    if scheme.lower() != "bearer" or not token.strip():
        return None
    return token.strip()


def current_principal(request: Request) -> Principal:
    token = _token(request)
    if token is None:
        raise _unauthorized()
    principal = _store(request).principal_for_token(token)
    if principal is None:
        raise _unauthorized()
    return principal


def optional_principal(request: Request) -> Principal | None:
    """Anonymous access is fine on public endpoints, but a token that is
    supplied must still be a real one."""
    if _token(request) is None:
        return None
    return current_principal(request)


def require_role(role: Role):
    def dependency(principal: Principal = Depends(current_principal)) -> Principal:
        if principal.role is not role:
            raise _forbidden(f"this endpoint requires the {role.value} role")
        return principal

    return dependency


def _is_admin(principal: Principal | None) -> bool:
    return principal is not None and principal.role is Role.ADMIN


# -- serializers --------------------------------------------------------------


def _project_payload(project: Project, badge: str | None = None) -> dict:
    payload: dict[str, Any] = {
        "project_id": project.id,
        "title": project.title,
        "description": project.description,
        "categories": sorted(project.categories),
        "funding_goal": project.funding_goal,
        "state": project.state.value,
    }
    if project.window is not None:
        payload["opened_at"] = project.window.opened_at.isoformat()
        payload["closes_at"] = project.window.closes_at.isoformat()
    if badge is not None:
        payload["badge"] = badge
    return payload


def _decision_payload(store: Store, project: Project, admin: bool) -> dict:
    record = store.get_decision(project.id)
    comments = [
        vote.comment
        for vote, _ in store.effective_votes(project.id)
        if vote.comment
    ]
    outcome = record.outcome
    payload = {
        "project_id": project.id,
        "status": "decided",
        "badge": record.badge,
        "outcome": {
            "kind": outcome.kind,
            "level": outcome.recommendation.wire_name if outcome.recommendation else None,
            "tie_applied": outcome.tie_applied,
            "vote_count": outcome.vote_count,
            "total_weight": outcome.total_weight,
        },
        "shares": record.shares,
        "vote_count": outcome.vote_count,
        "decided_at": record.decided_at.isoformat(),
        "comments": comments,
    }
    if admin:
        payload["voters"] = [
            {
                "expert_id": voter.expert_id,
                "credibility": voter.credibility,
                "points": voter.distribution.wire_dict(),
            }
            for voter in record.voters
        ]
    return payload


def _require_str(body: dict, key: str) -> str:
    value = body.get(key)
    if not isinstance(value, str) or not value.strip():
        raise _bad_request(f"{key!r} must be a non-empty string")
    return value


def _require_int(body: dict, key: str) -> int:
    value = body.get(key)
    if isinstance(value, bool) or not isinstance(value, int):
        raise _bad_request(f"{key!r} must be an integer")
    return value


def _require_tags(body: dict, key: str, allow_empty: bool) -> frozenset[str]:
    value = body.get(key)
    if not isinstance(value, list) or any(not isinstance(t, str) or not t for t in value):
        raise _bad_request(f"{key!r} must be a list of non-empty strings")
    if not value and not allow_empty:
        raise _bad_request(f"{key!r} must not be empty")
    return frozenset(value)


# -- sweeper -------------------------------------------------------------------


class Sweeper(threading.Thread):
    """Periodic finalization of due projects; one initial sweep at startup
    so a restarted service immediately picks up anything it missed."""

    def __init__(self, engine: WorkflowEngine, clock: Clock, interval_seconds: int):
        super().__init__(name="evaluation-sweeper", daemon=True)
        self._engine = engine
        self._clock = clock
        self._interval = interval_seconds
        self._halt = threading.Event()

    def run(self) -> None:
        while True:
            try:
                self._engine.sweep_due(self._clock())
            except Exception:
                logger.exception("sweep pass failed")
            if self._halt.wait(self._interval):
                return

    def stop(self) -> None:
        self._halt.set()


# -- app factory ----------------------------------------------------------------


def create_app(
    store: Store,
    config: ServiceConfig | None = None,
    clock: Clock = utc_now,
    run_sweeper: bool = True,
) -> FastAPI:
    config = config or ServiceConfig()
    engine = WorkflowEngine(
        store, EngineConfig(window_hours=config.window_hours, quorum=config.quorum)
    )

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        sweeper = None
        if run_sweeper:
            sweeper = Sweeper(engine, clock, config.sweep_interval_seconds)
            sweeper.start()
        yield
        if sweeper is not None:
            sweeper.stop()
            sweeper.join(timeout=10)

    app = FastAPI(title="doublescore", lifespan=lifespan)
    app.state.store = store
    app.state.engine = engine
    app.state.config = config
    app.state.clock = clock

    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    for exc_type, status, slug in ERROR_STATUS:
        def handler(request, exc, status=status, slug=slug):
            if isinstance(exc, BallotError):
                payload = exc.payload()
            else:
                payload = {"error": slug, "message": str(exc)}
            return JSONResponse(status_code=status, content=payload)

        app.add_exception_handler(exc_type, handler)

    def validation_handler(request, exc):
        return JSONResponse(
            status_code=400,
            content={"error": "bad_request", "message": "malformed request body"},
        )

    app.add_exception_handler(RequestValidationError, validation_handler)

    # -- projects ---------------------------------------------------------------

    @app.post("/api/projects", status_code=201)
    def create_project(
        request: Request,
        body: dict = Body(...),
        principal: Principal = Depends(require_role(Role.CREATOR)),
    ):
        title = _require_str(body, "title")
        description = body.get("description", "")
        if not isinstance(description, str):
            raise _bad_request("'description' must be a string")
        categories = _require_tags(body, "categories", allow_empty=False)
        funding_goal = _require_int(body, "funding_goal")
        if funding_goal < 0:
            raise _bad_request("'funding_goal' cannot be negative")
        project = Project(
            id=new_id("proj"),
            creator_id=principal.user_id,
            title=title,
            description=description,
            categories=categories,
            funding_goal=funding_goal,
        )
        _store(request).add_project(project)
        return {"project_id": project.id, "state": project.state.value}

    @app.get("/api/projects")
    def list_projects(
        request: Request,
        principal: Principal | None = Depends(optional_principal),
    ):
        store = _store(request)
        if _is_admin(principal):
            projects = store.list_projects()
        else:
            projects = store.list_projects(ProjectState.DECIDED)
        out = []
        for project in projects:
            badge = None
            if project.state is ProjectState.DECIDED:
                record = store.get_decision(project.id)
                badge = record.badge if record else None
            out.append(_project_payload(project, badge))
        return {"projects": out}

    @app.get("/api/projects/{project_id}")
    def get_project(
        request: Request,
        project_id: str,
        principal: Principal | None = Depends(optional_principal),
    ):
        store = _store(request)
        project = store.get_project(project_id)
        if project is None:
            raise NotFound(f"project {project_id!r} not found")
        if project.state is ProjectState.PENDING_APPROVAL and not _is_admin(principal):
            # approval does not make a project public
            raise NotFound(f"project {project_id!r} not found")
        if project.state is ProjectState.UNDER_EVALUATION:
            visible = _is_admin(principal) or (
                principal is not None and principal.role is Role.EXPERT
            )
            if not visible:
                raise NotFound(f"project {project_id!r} not found")
        badge = None
        if project.state is ProjectState.DECIDED:
            record = store.get_decision(project.id)
            badge = record.badge if record else None
        return _project_payload(project, badge)

    @app.post("/api/projects/{project_id}/approve")
    def approve_project(
        request: Request,
        project_id: str,
        principal: Principal = Depends(require_role(Role.ADMIN)),
    ):
        window = _engine(request).approve_project(project_id, _now(request))
        return {
            "project_id": project_id,
            "opened_at": window.opened_at.isoformat(),
            "closes_at": window.closes_at.isoformat(),
        }

    # -- voting -----------------------------------------------------------------

    @app.post("/api/projects/{project_id}/votes", status_code=201)
    def submit_vote(
        request: Request,
        project_id: str,
        body: dict = Body(...),
        principal: Principal = Depends(require_role(Role.EXPERT)),
    ):
        raw = {
            level: body[level.wire_name]
            for level in LEVELS
            if level.wire_name in body
        }
        comment = body.get("comment")
        if comment is not None and not isinstance(comment, str):
            raise _bad_request("'comment' must be a string")
        vote = _engine(request).submit_vote(
            project_id, principal.user_id, raw, comment, _now(request)
        )
        return {
            "project_id": project_id,
            "points": vote.distribution.wire_dict(),
            "comment": vote.comment,
            "submitted_at": vote.submitted_at.isoformat(),
        }

    @app.get("/api/projects/{project_id}/decision")
    def get_decision(
        request: Request,
        project_id: str,
        principal: Principal | None = Depends(optional_principal),
    ):
        store = _store(request)
        project = store.get_project(project_id)
        if project is None:
            raise NotFound(f"project {project_id!r} not found")
        if project.state is ProjectState.PENDING_APPROVAL:
            if _is_admin(principal):
                return {"project_id": project_id, "status": "pending_approval"}
            raise NotFound(f"project {project_id!r} not found")
        if project.state is ProjectState.UNDER_EVALUATION:
            return {
                "project_id": project_id,
                "status": "under_evaluation",
                "closes_at": project.window.closes_at.isoformat(),
            }
        return _decision_payload(store, project, _is_admin(principal))

    # -- experts ------------------------------------------------------------------

    @app.get("/api/expert/queue")
    def expert_queue(
        request: Request,
        principal: Principal = Depends(require_role(Role.EXPERT)),
    ):
        store = _store(request)
        now = _now(request)
        voted = store.voted_project_ids(principal.user_id)
        entries = []
        for note in store.notifications_for_expert(principal.user_id):
            if note.project_id in voted:
                continue
            project = store.get_project(note.project_id)
            if project is None or project.state is not ProjectState.UNDER_EVALUATION:
                continue
            if project.window is None or now >= project.window.closes_at:
                continue
            entries.append(
                {
                    "project_id": project.id,
                    "title": project.title,
                    "categories": sorted(project.categories),
                    "closes_at": project.window.closes_at.isoformat(),
                    "notified_at": note.created_at.isoformat(),
                }
            )
        return {"entries": entries}

    @app.post("/api/experts", status_code=201)
    def create_expert(
        request: Request,
        body: dict = Body(...),
        principal: Principal = Depends(require_role(Role.ADMIN)),
    ):
        profile = ExpertProfile(
            id=new_id("exp"),
            display_name=_require_str(body, "display_name"),
            credibility=validate_credibility(body.get("credibility")),
            specializations=_require_tags(body, "specializations", allow_empty=True),
            active=bool(body.get("active", True)),
        )
        store = _store(request)
        store.add_expert(profile)
        token = secrets.token_urlsafe(24)
        store.put_principal(Principal(profile.id, Role.EXPERT, token))
        return {
            "expert_id": profile.id,
            "token": token,
            "display_name": profile.display_name,
            "credibility": profile.credibility,
            "specializations": sorted(profile.specializations),
            "active": profile.active,
        }

    @app.patch("/api/experts/{expert_id}/credibility")
    def set_credibility(
        request: Request,
        expert_id: str,
        body: dict = Body(...),
        principal: Principal = Depends(require_role(Role.ADMIN)),
    ):
        credibility = validate_credibility(body.get("credibility"))
        _store(request).set_expert_credibility(expert_id, credibility)
        return {"expert_id": expert_id, "credibility": credibility}

    # -- admin ---------------------------------------------------------------------

    @app.post("/api/admin/sweep")
    def run_sweep(
        request: Request,
        principal: Principal = Depends(require_role(Role.ADMIN)),
    ):
        decided = _engine(request).sweep_due(_now(request))
        return {
            "decided": [
                {
                    "project_id": project_id,
                    "kind": outcome.kind,
                    "level": outcome.recommendation.wire_name
                    if outcome.recommendation
                    else None,
                    "badge": outcome_badge(outcome),
                }
                for project_id, outcome in decided
            ]
        }

    # -- optional static UI ----------------------------------------------------------

    if config.ui_dir and Path(config.ui_dir).is_dir():
        app.mount("/ui", StaticFiles(directory=config.ui_dir, html=True), name="ui")

        @app.get("/", include_in_schema=False)
        def index():
            return RedirectResponse("/ui/")

    return app
