"""REST + server-sent-events surface consumed by the training UI."""

from __future__ import annotations

import asyncio
from typing import Any

from fastapi import FastAPI, HTTPException
from fastapi.responses import StreamingResponse
from pydantic import BaseModel

from . import scenarios as scenario_mod
from .llm import Provider, ProviderError
from .log import SessionClosed
from .prompts import PromptEngine
from .scenarios import NotFound, ScenarioStore, ValidationFailed
from .service import (
    ActionRejected,
    AlreadyEnded,
    EmptyMessage,
    Session,
    SessionManager,
    SessionNotEnded,
    UnknownSession,
)
from .sim import InvalidPosition, UnknownLimb
from .tutor import ScoringFailed, TutorUnavailable

EVENT_POLL_S = 0.05


class CreateSessionBody(BaseModel):
    scenario_id: str


class MessageBody(BaseModel):
    text: str


class ManipulateBody(BaseModel):
    limb: str
    position: str


def create_app(
    store: ScenarioStore,
    provider: Provider,
    prompts: PromptEngine,
    tick_interval_s: float | None = None,
) -> FastAPI:
    """Build the API app; set tick_interval_s to drive drift in real time."""
    app = FastAPI(title="osce-trainer")
    manager = SessionManager(store, provider, prompts)
    app.state.manager = manager

    def get_session(session_id: str) -> Session:
        try:
            return manager.get(session_id)
        except UnknownSession:
            raise HTTPException(status_code=404, detail="unknown session") from None

    async def tick_loop(session: Session) -> None:
        while session.active:
            await asyncio.sleep(tick_interval_s)
            if session.active:
                session.tick(1)

    @app.post("/api/scenarios")
    def create_scenario(document: dict[str, Any]) -> dict[str, str]:
        try:
            scenario = scenario_mod.validate(document)
        except ValidationFailed as exc:
            raise HTTPException(status_code=422, detail=exc.violations) from None
        return {"id": store.save(scenario)}

    @app.get("/api/scenarios")
    def list_scenarios() -> list[dict[str, str]]:
        return store.list()

    @app.get("/api/scenarios/{scenario_id}")
    def get_scenario(scenario_id: str) -> dict[str, Any]:
        try:
            return store.load(scenario_id).to_document()
        except NotFound:
            raise HTTPException(status_code=404, detail="unknown scenario") from None

    @app.post("/api/sessions")
    def create_session(body: CreateSessionBody) -> dict[str, str]:
        try:
            session = manager.create(body.scenario_id)
        except NotFound:
            raise HTTPException(status_code=404, detail="unknown scenario") from None
        if tick_interval_s:
            asyncio.get_event_loop().create_task(tick_loop(session))
        return {"session_id": session.id}

    @app.post("/api/sessions/{session_id}/messages")
    def post_message(session_id: str, body: MessageBody) -> dict[str, Any]:
        session = get_session(session_id)
        try:
            return session.route_message(body.text).to_payload()
        except EmptyMessage:
            raise HTTPException(status_code=400, detail="message is blank") from None
        except SessionClosed:
            raise HTTPException(status_code=409, detail="session has ended") from None
        except ActionRejected as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from None
        except (TutorUnavailable, ProviderError) as exc:
            raise HTTPException(status_code=502, detail=str(exc)) from None

    @app.post("/api/sessions/{session_id}/manipulate")
    def manipulate(session_id: str, body: ManipulateBody) -> dict[str, Any]:
        session = get_session(session_id)
        try:
            return session.manipulate(body.limb, body.position).to_dict()
        except (UnknownLimb, InvalidPosition) as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from None
        except SessionClosed:
            raise HTTPException(status_code=409, detail="session has ended") from None

    @app.get("/api/sessions/{session_id}/state")
    def get_state(session_id: str) -> dict[str, Any]:
        session = get_session(session_id)
        return {
            "session_state": session.state,
            "task_description": session.scenario.task_description,
            "observed": session.sim_state.to_dict(),
        }

    @app.get("/api/sessions/{session_id}/events")
    async def events(session_id: str) -> StreamingResponse:
        session = get_session(session_id)
        subscription = session.log.subscribe()

        async def stream():
            while True:
                for msg in subscription.pending():
                    yield f"id: {msg.seq}\ndata: {msg.render()}\n\n"
                if not session.active and not subscription.pending():
                    yield "event: end\ndata: session ended\n\n"
                    return
                await asyncio.sleep(EVENT_POLL_S)

        return StreamingResponse(stream(), media_type="text/event-stream")

    @app.post("/api/sessions/{session_id}/end")
    def end_session(session_id: str) -> dict[str, str]:
        session = get_session(session_id)
        try:
            return {"summary": session.end()}
        except AlreadyEnded:
            raise HTTPException(status_code=409, detail="session already ended") from None
        except TutorUnavailable as exc:
            raise HTTPException(status_code=502, detail=str(exc)) from None

    @app.post("/api/sessions/{session_id}/score")
    def score_session(session_id: str) -> dict[str, Any]:
        session = get_session(session_id)
        try:
            return session.score().to_payload()
        except SessionNotEnded:
            raise HTTPException(status_code=409, detail="session still active") from None
        except ScoringFailed as exc:
            raise HTTPException(status_code=502, detail=str(exc)) from None
        except TutorUnavailable as exc:
            raise HTTPException(status_code=502, detail=str(exc)) from None

    return app
