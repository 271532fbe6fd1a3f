"""Local JSON protocol for interactive trajectory steering.

The server owns one SessionState built from the Step-I session file. Every
mutation (seed, step, finish) is applied through the same operations the
terminal path uses and persisted before the response goes out, so a browser
session and a scripted terminal session are interchangeable. Static UI
assets, when present, are served from the same port.
"""
from __future__ import annotations

import os
from dataclasses import asdict
from typing import Optional, Union

from fastapi import FastAPI, HTTPException
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .datamodel import RunConfig
from .pipeline import (build_decompositions, build_state, finish_and_export,
                       load_session, persist_state, session_export)
from .trajectory import follow_auto, follow_manual, seed_trajectory


class SeedRequest(BaseModel):
    energy_index: int
    pole_index: int


class StepRequest(BaseModel):
    choice: Union[int, str]


def create_app(config: RunConfig, ui_dir: Optional[str] = None) -> FastAPI:
    session = load_session(config)
    state = build_state(config, session)
    app = FastAPI(title="regge-ics session")

    def snapshot():
        return (state.current_energy_index, state.active_trajectory,
                len(state.completed_trajectories))

    def restore(snap):
        state.current_energy_index = snap[0]
        state.active_trajectory = snap[1]
        del state.completed_trajectories[snap[2]:]

    def guarded(action):
        snap = snapshot()
        try:
            result = action()
        except (ValueError, RuntimeError) as exc:
            restore(snap)
            raise HTTPException(status_code=400, detail=str(exc))
        persist_state(config, session, state)
        return result

    @app.get("/api/session")
    def get_session():
        return session_export(config, session, state)

    @app.post("/api/trajectory/seed")
    def post_seed(req: SeedRequest):
        def action():
            if not (0 <= req.energy_index < len(state.energies)):
                raise ValueError(f"energy index {req.energy_index} out of range")
            state.current_energy_index = req.energy_index
            seed_trajectory(state, req.pole_index)
        guarded(action)
        return session_export(config, session, state)

    @app.post("/api/trajectory/step")
    def post_step(req: StepRequest):
        def action():
            if req.choice == "auto":
                follow_auto(state)
            elif req.choice == "skip":
                follow_manual(state, "skip")
            elif isinstance(req.choice, int):
                follow_manual(state, req.choice)
            else:
                raise ValueError(f"unrecognized choice {req.choice!r}")
        guarded(action)
        return session_export(config, session, state)

    @app.post("/api/trajectory/finish")
    def post_finish():
        def action():
            return finish_and_export(config, session, state)
        traj = guarded(action)
        return {"finished": traj.id,
                "session": session_export(config, session, state)}

    @app.get("/api/decomposition")
    def get_decomposition():
        rows = build_decompositions(config, load_session(config))
        return [asdict(d) for d in rows]

    if ui_dir and os.path.isdir(ui_dir):
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")
    return app


def serve_session(config: RunConfig, port: int,
                  ui_dir: Optional[str] = None) -> None:
    import uvicorn

    app = create_app(config, ui_dir=ui_dir)
    uvicorn.run(app, host="127.0.0.1", port=port)
