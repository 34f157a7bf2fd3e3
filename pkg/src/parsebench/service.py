"""HTTP training service: interactive supervised acquisition sessions.

The service proposes the next parse action from the current model, accepts
supervisor confirmation or override, and persists finished logs into the
project corpus.  Sessions live in memory; logs are the durable artifact.
"""
from __future__ import annotations

import os
import re
import threading
import uuid
from dataclasses import dataclass, field

from fastapi import FastAPI
from fastapi.responses import JSONResponse, RedirectResponse
from fastapi.staticfiles import StaticFiles

from .actions import (ActionLog, ApplyError, MalformedAction, apply_action,
                      canonicalize, initial_state, load_corpus, parse_action,
                      save_log)
from .features import eval_vector, extract_examples
from .frames import Frame, WordUnit
from .learner import classify, load_structure, save_structure, train, training_stats
from .project import Project
from .resources import isa

CONFIRM = "CONFIRM"

STANDARD_ROLES = ("SUBJ", "OBJ", "IOBJ", "PRED", "DET", "MOD", "TIME", "LOC",
                  "MANNER", "DUMMY", "CONJ", "COORD", "AUX", "POBJ")


def _forms_json(forms):
    return {"person": forms.person, "number": forms.number,
            "tense": forms.tense, "extra": sorted(forms.extra)}


def frame_json(frame: Frame) -> dict:
    return {
        "kind": "frame",
        "surface": frame.surface,
        "lex": frame.lex,
        "synt": frame.synt,
        "sem": frame.sem,
        "forms": _forms_json(frame.forms),
        "span": list(frame.span) if frame.span is not None else None,
        "extras": dict(frame.extras),
        "subs": [{"roles": list(sub.roles), "child": frame_json(sub.child)}
                 for sub in frame.subs],
    }


def element_json(el) -> dict:
    if isinstance(el, WordUnit):
        return {"kind": "unit", "surface": el.surface, "span": list(el.span),
                "alternatives": [frame_json(a) for a in el.alternatives]}
    return frame_json(el)


@dataclass
class Session:
    id: str
    sentence: str
    state: object
    history: list = field(default_factory=list)  # (state, action_text, kind)
    proposal: str | None = None
    proposal_trace: list = field(default_factory=list)
    confirms: int = 0
    overrides: int = 0
    lock: threading.Lock = field(default_factory=threading.Lock)


class TrainingService:
    """All mutable service state, with per-session serialization."""

    def __init__(self, project: Project):
        self.project = project
        self.bundle = project.bundle
        self.feature_set = project.feature_set
        self.group_config = project.group_config
        self.sessions = {}
        self.sessions_lock = threading.Lock()
        self.retrain_lock = threading.Lock()
        self.model_lock = threading.Lock()
        self.corpus_lock = threading.Lock()  # serializes log-name allocation
        self.corpus_stats = {}  # log id -> {"confirms": n, "overrides": n}
        self.model = None
        self.model_stats = None
        self.model_variant = None
        if project.model_path and os.path.exists(project.model_path):
            with open(project.model_path, encoding="utf-8") as f:
                structure, stats = load_structure(f.read())
            self.model = structure
            self.model_stats = stats

    # -- model ---------------------------------------------------------

    def current_model(self):
        with self.model_lock:
            return self.model

    def swap_model(self, structure, stats, variant):
        with self.model_lock:
            self.model = structure
            self.model_stats = stats
            self.model_variant = variant

    def propose(self, state):
        """(action text, trace, vector) from the current model, or blanks."""
        vector = eval_vector(state, self.feature_set, self.bundle)
        model = self.current_model()
        if model is None or state.done:
            return None, [], vector
        action, trace = classify(model, vector)
        return action, trace, vector

    # -- sessions ------------------------------------------------------

    def create_session(self, sentence: str) -> Session:
        state = initial_state(sentence, self.bundle)
        session = Session(id=uuid.uuid4().hex[:12], sentence=sentence, state=state)
        session.proposal, session.proposal_trace, _ = self.propose(state)
        with self.sessions_lock:
            self.sessions[session.id] = session
        return session

    def get(self, session_id: str) -> Session | None:
        with self.sessions_lock:
            return self.sessions.get(session_id)

    def drop(self, session_id: str):
        with self.sessions_lock:
            self.sessions.pop(session_id, None)

    def next_log_name(self) -> str:
        taken = set(os.listdir(self.project.corpus_dir))
        n = 1
        for name in taken:
            m = re.match(r"^w(\d+)\.log$", name)
            if m:
                n = max(n, int(m.group(1)) + 1)
        return "w%03d" % n


def session_view(service: TrainingService, session: Session) -> dict:
    vector = eval_vector(session.state, service.feature_set, service.bundle)
    return {
        "id": session.id,
        "sentence": session.sentence,
        "done": session.state.done,
        "tokens": list(session.state.tokens),
        "stack": [element_json(f) for f in session.state.stack],
        "input": [element_json(e) for e in session.state.input],
        "proposal": session.proposal,
        "trace": session.proposal_trace,
        "featureVector": [
            {"feature": text, "value": value}
            for text, value in zip(service.feature_set.texts, vector)],
        "confirms": session.confirms,
        "overrides": session.overrides,
        "history": [{"action": a, "kind": k} for _, a, k in session.history],
    }


def _error(status: int, code: str, message: str, **extra):
    body = {"code": code, "message": message}
    body.update(extra)
    return JSONResponse(status_code=status, content=body)


def create_app(project: Project, frontend_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="parsebench training service")
    service = TrainingService(project)
    app.state.service = service

    @app.post("/sessions")
    def create_session(body: dict):
        sentence = (body or {}).get("sentence", "")
        if not isinstance(sentence, str) or not sentence.strip():
            return _error(400, "EMPTY_SENTENCE", "sentence must be non-empty")
        session = service.create_session(sentence.strip())
        return session_view(service, session)

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        session = service.get(session_id)
        if session is None:
            return _error(404, "NO_SUCH_SESSION", "unknown session %s" % session_id)
        with session.lock:
            return session_view(service, session)

    @app.post("/sessions/{session_id}/actions")
    def post_action(session_id: str, body: dict):
        session = service.get(session_id)
        if session is None:
            return _error(404, "NO_SUCH_SESSION", "unknown session %s" % session_id)
        text = (body or {}).get("action", "")
        with session.lock:
            if text == CONFIRM:
                if session.proposal is None:
                    return _error(422, "NO_PROPOSAL",
                                  "nothing to confirm: no live proposal")
                action_text = session.proposal
                kind = "confirm"
            else:
                try:
                    action_text = canonicalize(parse_action(text))
                except MalformedAction as exc:
                    return _error(422, "MALFORMED_ACTION", str(exc))
                if session.proposal is None:
                    kind = "manual"
                elif action_text == session.proposal:
                    kind = "confirm"
                else:
                    kind = "override"
            try:
                new_state = apply_action(
                    session.state, parse_action(action_text), service.bundle)
            except ApplyError as exc:
                return _error(422, exc.code, str(exc),
                              step=len(session.history))
            session.history.append((session.state, action_text, kind))
            session.state = new_state
            if kind == "confirm":
                session.confirms += 1
            elif kind == "override":
                session.overrides += 1
            session.proposal, session.proposal_trace, _ = service.propose(new_state)
            return session_view(service, session)

    @app.post("/sessions/{session_id}/undo")
    def undo(session_id: str):
        session = service.get(session_id)
        if session is None:
            return _error(404, "NO_SUCH_SESSION", "unknown session %s" % session_id)
        with session.lock:
            if not session.history:
                return _error(409, "EMPTY_HISTORY", "nothing to undo")
            state, _, kind = session.history.pop()
            session.state = state
            if kind == "confirm":
                session.confirms -= 1
            elif kind == "override":
                session.overrides -= 1
            session.proposal, session.proposal_trace, _ = service.propose(state)
            return session_view(service, session)

    @app.post("/sessions/{session_id}/finish")
    def finish(session_id: str):
        session = service.get(session_id)
        if session is None:
            return _error(404, "NO_SUCH_SESSION", "unknown session %s" % session_id)
        with session.lock:
            if not session.state.done:
                return _error(409, "INCOMPLETE_PARSE",
                              "parse not finished: apply (DONE) first")
            with service.corpus_lock:
                log_id = service.next_log_name()
                log = ActionLog(
                    sentence=session.sentence,
                    actions=tuple(a for _, a, _ in session.history),
                    gold_tree=session.state.stack[0],
                    id=log_id)
                path = os.path.join(service.project.corpus_dir, log_id + ".log")
                save_log(log, path)
            service.corpus_stats[log_id] = {
                "confirms": session.confirms, "overrides": session.overrides}
        service.drop(session_id)
        return {"log": log_id, "path": path}

    @app.post("/retrain")
    def retrain(body: dict = None):
        variant = (body or {}).get("variant", "hybrid")
        if not service.retrain_lock.acquire(blocking=False):
            return _error(409, "RETRAIN_RUNNING", "a retrain is already running")
        try:
            logs = load_corpus(service.project.corpus_dir)
            if not logs:
                return _error(409, "EMPTY_CORPUS", "no logs in corpus")
            examples = extract_examples(logs, service.feature_set, service.bundle)
            structure = train(variant, examples,
                              service.group_config if variant == "hybrid" else None)
            stats = training_stats(structure, examples)
            if service.project.model_path:
                with open(service.project.model_path, "w", encoding="utf-8",
                          newline="\n") as f:
                    f.write(save_structure(structure, stats))
            service.swap_model(structure, stats, variant)
            return {"variant": variant, "exampleCount": stats.example_count,
                    "nodeCount": stats.node_count, "depth": stats.depth,
                    "trainingAccuracy": stats.training_accuracy}
        finally:
            service.retrain_lock.release()

    @app.get("/model/stats")
    def model_stats():
        with service.model_lock:
            if service.model is None:
                return _error(404, "NO_MODEL", "no model loaded")
            stats = service.model_stats
            return {"variant": service.model_variant,
                    "exampleCount": stats.example_count,
                    "nodeCount": stats.node_count, "depth": stats.depth,
                    "trainingAccuracy": stats.training_accuracy}

    @app.get("/corpus")
    def corpus():
        logs = load_corpus(service.project.corpus_dir)
        out = []
        for log in logs:
            entry = {"id": log.id, "sentence": log.sentence,
                     "actionCount": len(log.actions)}
            entry.update(service.corpus_stats.get(log.id, {}))
            out.append(entry)
        return {"logs": out}

    @app.post("/actions/validate")
    def validate_action(body: dict):
        text = (body or {}).get("action", "")
        try:
            canonical = canonicalize(parse_action(text))
        except MalformedAction as exc:
            return {"ok": False, "code": "MALFORMED_ACTION", "message": str(exc)}
        return {"ok": True, "canonical": canonical}

    @app.get("/resources/concepts")
    def concepts():
        kb = service.bundle.kb
        syntactic = sorted(
            c for c in kb.concepts
            if c != "S-SYNT-ELEM" and isa(kb, c, "S-SYNT-ELEM"))
        roles = set(STANDARD_ROLES)
        for entry in service.bundle.subcat.values():
            for pattern in entry.patterns:
                for slot in pattern:
                    roles.add(slot.synt_role)
                    roles.add(slot.sem_role)
        return {"syntactic": syntactic, "roles": sorted(roles)}

    if frontend_dir and os.path.isdir(frontend_dir):
        app.mount("/ui", StaticFiles(directory=frontend_dir, html=True), name="ui")

        @app.get("/")
        def index():
            return RedirectResponse("/ui/")

    return app
