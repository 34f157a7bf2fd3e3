"""Deterministic single-pass parser driven by a learned decision structure.

Every failure mode is an outcome, not an exception: action errors, step
budget exhaustion, and exact state repetition (the endless-loop detector)
all terminate the parse with a status.
"""
from __future__ import annotations

from dataclasses import dataclass

from .actions import (ApplyError, MalformedAction, apply_action,
                      initial_state, parse_action, replay)
from .features import eval_vector
from .learner import classify

COMPLETE = "COMPLETE"
ENDLESS_LOOP = "ENDLESS_LOOP"
ACTION_ERROR = "ACTION_ERROR"


@dataclass(frozen=True)
class Limits:
    max_steps: int
    detect_state_repeat: bool = True

    def __post_init__(self):
        if self.max_steps < 1:
            raise ValueError("max_steps must be >= 1")


def default_limits(token_count: int) -> Limits:
    # roughly 2.5 actions per word in practice; 20x is a generous ceiling
    return Limits(max_steps=max(200, 20 * token_count))


@dataclass(frozen=True)
class ParseOutcome:
    status: str
    tree: object  # Frame when COMPLETE, else None
    actions: tuple
    steps: int
    partial_stack: tuple = ()  # stack frames at the stopping point


def parse(sentence: str, structure, feature_set, bundle,
          limits: Limits | None = None) -> ParseOutcome:
    """Loop eval_vector -> classify -> apply_action until DONE or failure."""
    state = initial_state(sentence, bundle)
    if limits is None:
        limits = default_limits(len(state.tokens))
    seen = {state} if limits.detect_state_repeat else None
    actions = []
    steps = 0
    while True:
        if steps >= limits.max_steps:
            return ParseOutcome(ENDLESS_LOOP, None, tuple(actions), steps,
                                state.stack)
        vector = eval_vector(state, feature_set, bundle)
        action_text, _ = classify(structure, vector)
        actions.append(action_text)
        steps += 1
        try:
            state = apply_action(state, parse_action(action_text), bundle)
        except (MalformedAction, ApplyError):
            return ParseOutcome(ACTION_ERROR, None, tuple(actions), steps,
                                state.stack)
        if state.done:
            return ParseOutcome(COMPLETE, state.stack[0], tuple(actions), steps,
                                state.stack)
        if seen is not None:
            if state in seen:
                return ParseOutcome(ENDLESS_LOOP, None, tuple(actions), steps,
                                    state.stack)
            seen.add(state)


def assisted_parse(sentence: str, log, structure, feature_set, bundle):
    """Step-level predictions under continuous correction.

    At each logged step the classifier's prediction is recorded against the
    pre-action state, then the LOGGED action is applied.  The free parse is
    run as well for structure scoring.  Returns (predicted, logged, free
    outcome); the two lists have the log's length.
    """
    _, states = replay(sentence, log.actions, bundle)
    predicted = []
    for state in states:
        vector = eval_vector(state, feature_set, bundle)
        predicted.append(classify(structure, vector)[0])
    free = parse(sentence, structure, feature_set, bundle)
    return predicted, list(log.actions), free
