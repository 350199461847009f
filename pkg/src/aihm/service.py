"""HTTP API over a root directory of projects.

JSON envelopes: ``{"data": ...}`` on success, ``{"error": {code, message,
details}}`` on failure, with the same stable error codes the engine raises.
Mutations carry the post-mutation status summary so a UI can refresh in one
round trip. Writes are serialized per project (in-process queue plus the
cross-process file lock; a busy file lock surfaces as 409 project-locked).

Actor identity comes from the ``X-Actor`` header. When the service is created
with a static token (or ``AIHM_API_TOKEN`` is set), every request must carry
``Authorization: Bearer <token>``.
"""

from __future__ import annotations

import os
import threading
from pathlib import Path
from typing import Any

from fastapi import Body, FastAPI, Header, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .catalog import Catalog, bundled_catalog
from .engine import ProjectEngine, project_status
from .errors import HazardManagementError
from .projectdir import EVENTS_FILENAME, ProjectDirectory
from .report import FORMATS, generate_project_report, generate_stage_report

_STATUS_BY_CODE = {
    "project-not-found": 404,
    "not-found": 404,
    "stage-never-opened": 404,
    "unknown-hazard": 404,
    "project-locked": 409,
    "project-exists": 409,
    "unauthorized": 401,
}


def _http_status(code: str) -> int:
    return _STATUS_BY_CODE.get(code, 400)


def _error_response(exc: HazardManagementError) -> JSONResponse:
    return JSONResponse(status_code=_http_status(exc.code), content={"error": exc.to_dict()})


API_DESCRIPTION: list[dict[str, Any]] = [
    {"method": "GET", "path": "/catalog", "params": ["stage", "mode", "level"], "returns": "catalog"},
    {"method": "GET", "path": "/catalog/{hazardId}", "returns": "hazard definition"},
    {"method": "GET", "path": "/projects", "returns": "project list"},
    {
        "method": "POST",
        "path": "/projects",
        "body": {"name": "str", "useCaseContext": "str", "participants": "[{name, role}]", "projectId": "str?"},
        "returns": "status summary",
    },
    {"method": "GET", "path": "/projects/{projectId}/status", "returns": "status summary"},
    {"method": "POST", "path": "/projects/{projectId}/stages/{stage}/open", "returns": "mutation + status"},
    {
        "method": "POST",
        "path": "/projects/{projectId}/stages/{stage}/close",
        "body": {"summary": "str"},
        "returns": "mutation + status",
    },
    {"method": "GET", "path": "/projects/{projectId}/stages/{stage}/hazards", "returns": "hazard register rows"},
    {
        "method": "POST",
        "path": "/projects/{projectId}/hazards/{hazardId}/triage",
        "body": {"decision": "include|exclude", "justification": "str", "decidedBy": "[str]"},
        "returns": "mutation + status",
    },
    {
        "method": "POST",
        "path": "/projects/{projectId}/hazards/{hazardId}/plan",
        "body": {
            "criterion": "{kind: threshold|relative-degradation|qualitative-review, ...}",
            "method": "str",
            "plannedBy": "[str]",
            "signoffs": "[{participant, statement}]",
            "assignedReviewer": "str?",
        },
        "returns": "mutation + status",
    },
    {
        "method": "POST",
        "path": "/projects/{projectId}/hazards/{hazardId}/result",
        "body": "{measuredValue} | {reviewOutcome, reviewNotes, reviewer}",
        "returns": "mutation + status",
    },
    {
        "method": "POST",
        "path": "/projects/{projectId}/hazards/{hazardId}/treat",
        "body": {"description": "str", "technique": "str", "appliedBy": "str"},
        "returns": "mutation + status",
    },
    {
        "method": "POST",
        "path": "/projects/{projectId}/hazards/{hazardId}/residual",
        "body": {"justification": "str", "alertRecipients": "[str]"},
        "returns": "mutation + status",
    },
    {
        "method": "POST",
        "path": "/projects/{projectId}/tradeoff-links",
        "body": {"fromDefinitionId": "str", "toDefinitionId": "str", "rationale": "str"},
        "returns": "mutation + status",
    },
    {
        "method": "GET",
        "path": "/projects/{projectId}/reports/stage/{stage}",
        "params": ["format"],
        "returns": "rendered report",
    },
    {
        "method": "GET",
        "path": "/projects/{projectId}/reports/project",
        "params": ["format"],
        "returns": "rendered report",
    },
    {
        "method": "GET",
        "path": "/projects/{projectId}/audit/events",
        "params": ["limit", "offset"],
        "returns": "paginated events",
    },
    {"method": "GET", "path": "/projects/{projectId}/audit/verify", "returns": "chain verification"},
    {"method": "GET", "path": "/api/description", "returns": "this route table"},
]


class ProjectRegistry:
    """Engines per project id, loaded from disk on demand.

    Cached engines are invalidated when the on-disk log grows behind the
    service's back (e.g. a CLI invocation on the same directory).
    """

    def __init__(self, root: Path, catalog: Catalog):
        self.root = root
        self.catalog = catalog
        self._engines: dict[str, tuple[ProjectEngine, int]] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()

    def directory(self, project_id: str) -> ProjectDirectory:
        return ProjectDirectory(self.root / project_id)

    def mutation_lock(self, project_id: str) -> threading.Lock:
        with self._registry_lock:
            return self._locks.setdefault(project_id, threading.Lock())

    def list_projects(self) -> list[dict[str, str]]:
        projects = []
        if self.root.exists():
            for entry in sorted(self.root.iterdir()):
                if (entry / EVENTS_FILENAME).exists():
                    engine = self.get(entry.name)
                    assert engine.project is not None
                    projects.append({"id": engine.project.id, "name": engine.project.name})
        return projects

    def get(self, project_id: str) -> ProjectEngine:
        directory = self.directory(project_id)
        if not directory.exists():
            with self._registry_lock:
                self._engines.pop(project_id, None)
            raise HazardManagementError("project-not-found", f"no project {project_id!r} under {self.root}")
        size = directory.events_path.stat().st_size
        with self._registry_lock:
            cached = self._engines.get(project_id)
        if cached is not None and cached[1] == size:
            return cached[0]
        engine = directory.load_engine(self.catalog)
        with self._registry_lock:
            self._engines[project_id] = (engine, size)
        return engine

    def refresh_stamp(self, project_id: str, engine: ProjectEngine) -> None:
        events_path = self.directory(project_id).events_path
        size = events_path.stat().st_size if events_path.exists() else 0
        with self._registry_lock:
            self._engines[project_id] = (engine, size)

    def create(self, project_id: str | None, name: str, context: str, participants: list, actor: str) -> ProjectEngine:
        import uuid

        project_id = project_id or uuid.uuid4().hex
        directory = self.directory(project_id)
        with directory.lock():
            log_path = directory.prepare_new()
            engine = ProjectEngine.create(
                name, context, participants, actor, project_id=project_id, catalog=self.catalog, log_path=log_path
            )
        self.refresh_stamp(project_id, engine)
        return engine


def create_app(root: str | Path, catalog: Catalog | None = None, token: str | None = None) -> FastAPI:
    root = Path(root)
    catalog = catalog or bundled_catalog()
    token = token if token is not None else os.environ.get("AIHM_API_TOKEN")
    registry = ProjectRegistry(root, catalog)

    app = FastAPI(title="aihm service", version="0.1.0", docs_url="/api/docs", openapi_url="/api/openapi.json")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    app.state.registry = registry

    @app.exception_handler(HazardManagementError)
    async def domain_error_handler(request: Request, exc: HazardManagementError) -> JSONResponse:
        return _error_response(exc)

    @app.exception_handler(RequestValidationError)
    async def validation_error_handler(request: Request, exc: RequestValidationError) -> JSONResponse:
        return _error_response(
            HazardManagementError("invalid-request", "request body failed validation", {"errors": exc.errors()})
        )

    @app.exception_handler(404)
    async def not_found_handler(request: Request, exc: Any) -> JSONResponse:
        return _error_response(HazardManagementError("not-found", f"no route {request.url.path}"))

    def check_token(authorization: str | None) -> None:
        if token is None:
            return
        if authorization != f"Bearer {token}":
            raise HazardManagementError("unauthorized", "missing or wrong bearer token")

    def require_actor(actor: str | None) -> str:
        if not actor or not actor.strip():
            raise HazardManagementError("actor-required", "mutations need an X-Actor header naming the principal")
        return actor.strip()

    def mutate(project_id: str, operation) -> dict[str, Any]:
        """Run one engine mutation under the per-project writer locks."""
        with registry.mutation_lock(project_id):
            engine = registry.get(project_id)
            with registry.directory(project_id).lock():
                result = operation(engine)
            registry.refresh_stamp(project_id, engine)
            assert engine.project is not None
            return {"data": {"result": result, "status": project_status(engine.project)}}

    # -- catalog ------------------------------------------------------------

    @app.get("/catalog")
    def get_catalog(
        stage: int | None = Query(default=None),
        mode: str | None = Query(default=None),
        level: str | None = Query(default=None),
        authorization: str | None = Header(default=None),
    ) -> dict[str, Any]:
        check_token(authorization)
        try:
            hits = catalog.query(stage=stage, mode=mode, level=level)
        except ValueError:
            raise HazardManagementError("invalid-request", f"unknown mode or level filter ({mode!r}, {level!r})")
        return {"data": {"version": catalog.version, "hazards": [h.to_dict() for h in hits]}}

    @app.get("/catalog/{hazard_id}")
    def get_hazard(hazard_id: str, authorization: str | None = Header(default=None)) -> dict[str, Any]:
        check_token(authorization)
        return {"data": catalog.get(hazard_id).to_dict()}

    @app.get("/api/description")
    def api_description() -> dict[str, Any]:
        return {"data": {"routes": API_DESCRIPTION, "errorStatusByCode": _STATUS_BY_CODE}}

    # -- projects -------------------------------------------------------------

    @app.get("/projects")
    def list_projects(authorization: str | None = Header(default=None)) -> dict[str, Any]:
        check_token(authorization)
        return {"data": {"projects": registry.list_projects()}}

    @app.post("/projects", status_code=201)
    def create_project(
        body: dict[str, Any] = Body(...),
        x_actor: str | None = Header(default=None),
        authorization: str | None = Header(default=None),
    ) -> dict[str, Any]:
        check_token(authorization)
        actor = require_actor(x_actor)
        engine = registry.create(
            body.get("projectId"),
            str(body.get("name", "")),
            str(body.get("useCaseContext", "")),
            body.get("participants") or [],
            actor,
        )
        assert engine.project is not None
        return {"data": {"result": {"projectId": engine.project.id}, "status": project_status(engine.project)}}

    @app.get("/projects/{project_id}/status")
    def get_status(project_id: str, authorization: str | None = Header(default=None)) -> dict[str, Any]:
        check_token(authorization)
        engine = registry.get(project_id)
        assert engine.project is not None
        return {"data": project_status(engine.project)}

    @app.get("/projects/{project_id}/stages/{stage}/hazards")
    def get_stage_hazards(
        project_id: str, stage: int, authorization: str | None = Header(default=None)
    ) -> dict[str, Any]:
        check_token(authorization)
        engine = registry.get(project_id)
        return {"data": {"stage": stage, "hazards": engine.stage_hazards(stage)}}

    @app.post("/projects/{project_id}/stages/{stage}/open")
    def open_stage(
        project_id: str,
        stage: int,
        x_actor: str | None = Header(default=None),
        authorization: str | None = Header(default=None),
    ) -> dict[str, Any]:
        check_token(authorization)
        actor = require_actor(x_actor)
        return mutate(
            project_id,
            lambda engine: {"opened": stage, "candidates": len(engine.open_stage(stage, actor).instances)},
        )

    @app.post("/projects/{project_id}/stages/{stage}/close")
    def close_stage(
        project_id: str,
        stage: int,
        body: dict[str, Any] = Body(...),
        x_actor: str | None = Header(default=None),
        authorization: str | None = Header(default=None),
    ) -> dict[str, Any]:
        check_token(authorization)
        actor = require_actor(x_actor)
        return mutate(
            project_id,
            lambda engine: engine.close_stage(str(body.get("summary", "")), actor, stage=stage).to_dict(),
        )

    @app.post("/projects/{project_id}/hazards/{hazard_id}/triage")
    def triage(
        project_id: str,
        hazard_id: str,
        body: dict[str, Any] = Body(...),
        x_actor: str | None = Header(default=None),
        authorization: str | None = Header(default=None),
    ) -> dict[str, Any]:
        check_token(authorization)
        actor = require_actor(x_actor)
        return mutate(
            project_id,
            lambda engine: engine.triage(
                hazard_id,
                str(body.get("decision", "")),
                str(body.get("justification", "")),
                body.get("decidedBy") or [],
                actor,
            ).to_dict(),
        )

    @app.post("/projects/{project_id}/hazards/{hazard_id}/plan")
    def plan(
        project_id: str,
        hazard_id: str,
        body: dict[str, Any] = Body(...),
        x_actor: str | None = Header(default=None),
        authorization: str | None = Header(default=None),
    ) -> dict[str, Any]:
        check_token(authorization)
        actor = require_actor(x_actor)
        return mutate(project_id, lambda engine: engine.plan_assessment(hazard_id, body, actor).to_dict())

    @app.post("/projects/{project_id}/hazards/{hazard_id}/result")
    def result(
        project_id: str,
        hazard_id: str,
        body: dict[str, Any] = Body(...),
        x_actor: str | None = Header(default=None),
        authorization: str | None = Header(default=None),
    ) -> dict[str, Any]:
        check_token(authorization)
        actor = require_actor(x_actor)
        return mutate(project_id, lambda engine: engine.record_result(hazard_id, body, actor).to_dict())

    @app.post("/projects/{project_id}/hazards/{hazard_id}/treat")
    def treat(
        project_id: str,
        hazard_id: str,
        body: dict[str, Any] = Body(...),
        x_actor: str | None = Header(default=None),
        authorization: str | None = Header(default=None),
    ) -> dict[str, Any]:
        check_token(authorization)
        actor = require_actor(x_actor)
        return mutate(
            project_id,
            lambda engine: engine.record_treatment(
                hazard_id,
                str(body.get("description", "")),
                str(body.get("technique", "")),
                str(body.get("appliedBy", "")),
                actor,
            ).to_dict(),
        )

    @app.post("/projects/{project_id}/hazards/{hazard_id}/residual")
    def residual(
        project_id: str,
        hazard_id: str,
        body: dict[str, Any] = Body(...),
        x_actor: str | None = Header(default=None),
        authorization: str | None = Header(default=None),
    ) -> dict[str, Any]:
        check_token(authorization)
        actor = require_actor(x_actor)
        return mutate(
            project_id,
            lambda engine: engine.mark_residual(
                hazard_id,
                str(body.get("justification", "")),
                body.get("alertRecipients") or [],
                actor,
            ).to_dict(),
        )

    @app.post("/projects/{project_id}/tradeoff-links")
    def tradeoff_link(
        project_id: str,
        body: dict[str, Any] = Body(...),
        x_actor: str | None = Header(default=None),
        authorization: str | None = Header(default=None),
    ) -> dict[str, Any]:
        check_token(authorization)
        actor = require_actor(x_actor)
        return mutate(
            project_id,
            lambda engine: engine.add_tradeoff_link(
                str(body.get("fromDefinitionId", "")),
                str(body.get("toDefinitionId", "")),
                str(body.get("rationale", "")),
                actor,
            ).to_dict(),
        )

    # -- reports & audit -------------------------------------------------------

    def _render(document, fmt: str) -> dict[str, Any]:
        if fmt not in FORMATS:
            raise HazardManagementError("invalid-request", f"format must be one of {FORMATS}")
        return {
            "data": {
                "format": fmt,
                "sourceLogHash": document.source_log_hash,
                "content": document.render(fmt),
            }
        }

    @app.get("/projects/{project_id}/reports/stage/{stage}")
    def stage_report(
        project_id: str,
        stage: int,
        format: str = Query(default="markdown"),
        authorization: str | None = Header(default=None),
    ) -> dict[str, Any]:
        check_token(authorization)
        engine = registry.get(project_id)
        return _render(generate_stage_report(engine.log, stage, catalog), format)

    @app.get("/projects/{project_id}/reports/project")
    def project_report(
        project_id: str,
        format: str = Query(default="markdown"),
        authorization: str | None = Header(default=None),
    ) -> dict[str, Any]:
        check_token(authorization)
        engine = registry.get(project_id)
        return _render(generate_project_report(engine.log, catalog), format)

    @app.get("/projects/{project_id}/audit/events")
    def audit_events(
        project_id: str,
        limit: int = Query(default=100, ge=1, le=1000),
        offset: int = Query(default=0, ge=0),
        authorization: str | None = Header(default=None),
    ) -> dict[str, Any]:
        check_token(authorization)
        engine = registry.get(project_id)
        events = engine.log.events[offset : offset + limit]
        return {
            "data": {
                "total": len(engine.log),
                "limit": limit,
                "offset": offset,
                "events": [e.to_dict() for e in events],
            }
        }

    @app.get("/projects/{project_id}/audit/verify")
    def audit_verify(project_id: str, authorization: str | None = Header(default=None)) -> dict[str, Any]:
        check_token(authorization)
        engine = registry.get(project_id)
        if engine.log.path is not None and engine.log.path.exists():
            from .auditlog import verify_file

            return {"data": verify_file(engine.log.path).to_dict()}
        return {"data": engine.log.verify().to_dict()}

    return app
