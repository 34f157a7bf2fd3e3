"""Parse actions: parsing, canonical text, application, and action logs.

Actions are the atomic steps of the deterministic parser.  The canonical
text form round-trips: parse_action(canonicalize(a)) == a.
"""
from __future__ import annotations

import os
import re
from dataclasses import dataclass, replace

from . import sexp
from .frames import (PRED, UNAVAILABLE, Frame, ParseState, Sub, TreePath,
                     WordUnit, parse_path_tokens, parse_tree_text, path_text,
                     render_tree, resolve_path, surface_for_span)
from .resources import ResourceBundle, analyze, segment

STACK_UNDERFLOW = "STACK_UNDERFLOW"
NO_SUCH_ALTERNATIVE = "NO_SUCH_ALTERNATIVE"
PATH_UNRESOLVED = "PATH_UNRESOLVED"
PREMATURE_DONE = "PREMATURE_DONE"
INCOMPLETE_PARSE = "INCOMPLETE_PARSE"

EMPTY_KINDS = ("PRO", "TRACE")


class MalformedAction(Exception):
    pass


class ApplyError(Exception):
    """An action that cannot be applied to the given state."""

    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


@dataclass(frozen=True)
class Shift:
    pos_choice: str | None = None


@dataclass(frozen=True)
class ShiftBack:
    pass


@dataclass(frozen=True)
class Reduce:
    count: int
    target_synt: str
    role_assignments: tuple  # one role tuple per consumed frame, bottom-to-top


@dataclass(frozen=True)
class AddInto:
    source: int
    dest: TreePath
    roles: tuple


@dataclass(frozen=True)
class Mark:
    path: TreePath
    slot: str
    value: str


@dataclass(frozen=True)
class IntroEmpty:
    kind: str  # PRO or TRACE
    coref: TreePath


@dataclass(frozen=True)
class Done:
    pass


_PREFIXED = re.compile(r"^(S|I|C|D)-")


def _as_category(token: str) -> str:
    """Category tokens without a prefix get the syntactic S- prefix."""
    up = token.upper()
    if _PREFIXED.match(up):
        return up
    return "S-" + up


def _category_token(concept: str) -> str:
    if concept.startswith("S-"):
        return concept[2:]
    return concept


def parse_action(text: str):
    """Parse one action s-expression; keywords are case-insensitive."""
    try:
        expr = sexp.parse_one(text)
    except sexp.SexpError as exc:
        raise MalformedAction(str(exc))
    if not isinstance(expr, list) or not expr or not isinstance(expr[0], str):
        raise MalformedAction("action must be a non-empty list: %r" % text)
    head = expr[0].upper()
    rest = expr[1:]
    if head == "S":
        if len(rest) == 0:
            return Shift(None)
        if len(rest) == 1 and isinstance(rest[0], str):
            return Shift(_as_category(rest[0]))
        raise MalformedAction("bad shift arity: %r" % text)
    if head == "S-BACK":
        if rest:
            raise MalformedAction("shift-back takes no arguments: %r" % text)
        return ShiftBack()
    if head == "R":
        return _parse_reduce(rest, text)
    if head == "A":
        return _parse_add_into(rest, text)
    if head == "M":
        return _parse_mark(rest, text)
    if head == "E":
        return _parse_intro_empty(rest, text)
    if head == "DONE":
        if rest:
            raise MalformedAction("done takes no arguments: %r" % text)
        return Done()
    raise MalformedAction("unknown action keyword %r" % expr[0])


def _parse_reduce(rest, text):
    if len(rest) < 5:
        raise MalformedAction("bad reduce arity: %r" % text)
    try:
        count = int(rest[0])
    except (TypeError, ValueError):
        raise MalformedAction("bad reduce count: %r" % text)
    if count < 1:
        raise MalformedAction("reduce count must be >= 1: %r" % text)
    if not (isinstance(rest[1], str) and rest[1].upper() == "TO"):
        raise MalformedAction("reduce missing TO: %r" % text)
    if not isinstance(rest[2], str):
        raise MalformedAction("bad reduce target: %r" % text)
    target = _as_category(rest[2])
    if not (isinstance(rest[3], str) and rest[3].upper() == "AS"):
        raise MalformedAction("reduce missing AS: %r" % text)
    assignments = []
    for item in rest[4:]:
        if isinstance(item, list):
            roles = tuple(r.upper() for r in item if isinstance(r, str))
            if len(roles) != len(item) or not roles:
                raise MalformedAction("bad role list in %r" % text)
        else:
            roles = (item.upper(),)
        assignments.append(roles)
    if len(assignments) != count:
        raise MalformedAction(
            "reduce count %d != %d role assignments: %r"
            % (count, len(assignments), text))
    with_pred = [a for a in assignments if PRED in a]
    if len(with_pred) != 1:
        raise MalformedAction("reduce needs exactly one PRED assignment: %r" % text)
    return Reduce(count, target, tuple(assignments))


def _flat_symbols(items, text):
    out = []
    for item in items:
        if not isinstance(item, str):
            raise MalformedAction("unexpected sublist in %r" % text)
        out.append(item)
    return out


def _parse_add_into(rest, text):
    toks = _flat_symbols(rest, text)
    ups = [t.upper() for t in toks]
    if "TO" not in ups or "AS" not in ups:
        raise MalformedAction("add-into needs TO and AS: %r" % text)
    to_i = ups.index("TO")
    as_i = ups.index("AS")
    if to_i != 1 or as_i <= to_i + 1 or as_i >= len(toks) - 1:
        raise MalformedAction("bad add-into arity: %r" % text)
    try:
        source = int(toks[0])
    except ValueError:
        raise MalformedAction("bad add-into source: %r" % text)
    if source == 0:
        raise MalformedAction("add-into source 0 is invalid: %r" % text)
    try:
        dest = parse_path_tokens(toks[to_i + 1:as_i])
    except ValueError as exc:
        raise MalformedAction(str(exc))
    roles = tuple(t.upper() for t in toks[as_i + 1:])
    return AddInto(source, dest, roles)


def _parse_mark(rest, text):
    toks = _flat_symbols(rest, text)
    if len(toks) < 3:
        raise MalformedAction("bad mark arity: %r" % text)
    try:
        path = parse_path_tokens(toks[:-2])
    except ValueError as exc:
        raise MalformedAction(str(exc))
    return Mark(path, toks[-2].upper(), toks[-1].upper())


def _parse_intro_empty(rest, text):
    toks = _flat_symbols(rest, text)
    if len(toks) < 2:
        raise MalformedAction("bad empty-category arity: %r" % text)
    kind = toks[0].upper()
    if kind not in EMPTY_KINDS:
        raise MalformedAction("empty-category kind must be PRO or TRACE: %r" % text)
    try:
        coref = parse_path_tokens(toks[1:])
    except ValueError as exc:
        raise MalformedAction(str(exc))
    return IntroEmpty(kind, coref)


def canonicalize(action) -> str:
    """Single-space, uppercase canonical text; inverse of parse_action."""
    if isinstance(action, Shift):
        if action.pos_choice is None:
            return "(S)"
        return "(S %s)" % _category_token(action.pos_choice)
    if isinstance(action, ShiftBack):
        return "(S-BACK)"
    if isinstance(action, Reduce):
        parts = []
        for roles in action.role_assignments:
            if len(roles) == 1:
                parts.append(roles[0])
            else:
                parts.append("(" + " ".join(roles) + ")")
        return "(R %d TO %s AS %s)" % (
            action.count, _category_token(action.target_synt), " ".join(parts))
    if isinstance(action, AddInto):
        return "(A %d TO %s AS %s)" % (
            action.source, path_text(action.dest), " ".join(action.roles))
    if isinstance(action, Mark):
        return "(M %s %s %s)" % (path_text(action.path), action.slot, action.value)
    if isinstance(action, IntroEmpty):
        return "(E %s %s)" % (action.kind, path_text(action.coref))
    if isinstance(action, Done):
        return "(DONE)"
    raise TypeError("not a parse action: %r" % (action,))


def action_class(text: str) -> str:
    """Leading action keyword of a canonical action text (S, S-BACK, R, ...)."""
    body = text.strip()
    if body.startswith("("):
        body = body[1:]
    return body.split(None, 1)[0].rstrip(")").upper()


# ---------------------------------------------------------------------------
# application

def apply_action(state: ParseState, action, bundle: ResourceBundle | None = None) -> ParseState:
    """Apply one action, returning the successor state; raises ApplyError."""
    if state.done:
        raise ApplyError(PREMATURE_DONE, "parse already finished")
    if isinstance(action, Shift):
        return _apply_shift(state, action)
    if isinstance(action, ShiftBack):
        if not state.stack:
            raise ApplyError(STACK_UNDERFLOW, "shift-back on empty stack")
        return replace(state, stack=state.stack[:-1],
                       input=(state.stack[-1],) + state.input)
    if isinstance(action, Reduce):
        return _apply_reduce(state, action)
    if isinstance(action, AddInto):
        return _apply_add_into(state, action)
    if isinstance(action, Mark):
        return _apply_mark(state, action)
    if isinstance(action, IntroEmpty):
        return _apply_intro_empty(state, action)
    if isinstance(action, Done):
        if state.input or len(state.stack) != 1:
            raise ApplyError(
                PREMATURE_DONE,
                "done requires an empty input list and a single stack frame")
        return replace(state, done=True)
    raise TypeError("not a parse action: %r" % (action,))


def _apply_shift(state, action):
    if not state.input:
        raise ApplyError(STACK_UNDERFLOW, "shift on empty input")
    front = state.input[0]
    if isinstance(front, WordUnit):
        if action.pos_choice is None:
            frame = front.alternatives[0]
        else:
            frame = None
            for alt in front.alternatives:
                if alt.synt == action.pos_choice:
                    frame = alt
                    break
            if frame is None:
                raise ApplyError(
                    NO_SUCH_ALTERNATIVE,
                    "%r has no %s reading" % (front.surface, action.pos_choice))
    else:
        frame = front
        if action.pos_choice is not None and front.synt != action.pos_choice:
            raise ApplyError(
                NO_SUCH_ALTERNATIVE,
                "committed frame %r is not %s" % (front.surface, action.pos_choice))
    return replace(state, stack=state.stack + (frame,), input=state.input[1:])


def _apply_reduce(state, action):
    n = action.count
    if n > len(state.stack):
        raise ApplyError(
            STACK_UNDERFLOW, "reduce %d on a %d-frame stack" % (n, len(state.stack)))
    children = state.stack[-n:]
    head = None
    for roles, child in zip(action.role_assignments, children):
        if PRED in roles:
            head = child
    spans = [c.span for c in children if c.span is not None]
    span = (spans[0][0], spans[-1][1]) if spans else None
    frame = Frame(
        surface=surface_for_span(state.tokens, span),
        lex=head.lex,
        synt=action.target_synt,
        sem=head.sem,
        forms=head.forms,
        subs=tuple(Sub(roles, child)
                   for roles, child in zip(action.role_assignments, children)),
        span=span,
    )
    return replace(state, stack=state.stack[:-n] + (frame,))


def _element_slot(state, pos):
    """(list name, index) for a signed position, or None if out of range."""
    if pos < 0 and -pos <= len(state.stack):
        return ("stack", len(state.stack) + pos)
    if pos > 0 and pos <= len(state.input):
        return ("input", pos - 1)
    return None


def _refresh(frame, subs, tokens):
    spans = [s.child.span for s in subs if s.child.span is not None]
    if spans:
        span = (min(s[0] for s in spans), max(s[1] for s in spans))
    else:
        span = None
    return replace(frame, subs=subs, span=span,
                   surface=surface_for_span(tokens, span))


def _attach(frame, steps, roles, child, tokens):
    if not steps:
        return _refresh(frame, frame.subs + (Sub(roles, child),), tokens)
    for i, sub in enumerate(frame.subs):
        if steps[0] in sub.roles:
            new_child = _attach(sub.child, steps[1:], roles, child, tokens)
            subs = frame.subs[:i] + (Sub(sub.roles, new_child),) + frame.subs[i + 1:]
            return _refresh(frame, subs, tokens)
    raise ApplyError(PATH_UNRESOLVED, "no subframe with role %s" % steps[0])


def _apply_add_into(state, action):
    src_slot = _element_slot(state, action.source)
    if src_slot is None:
        raise ApplyError(PATH_UNRESOLVED, "add-into source out of range")
    dest_slot = _element_slot(state, action.dest.anchor)
    if dest_slot is None:
        raise ApplyError(PATH_UNRESOLVED, "add-into destination out of range")
    if src_slot == dest_slot:
        raise ApplyError(PATH_UNRESOLVED, "add-into source equals destination")
    src = state.stack[src_slot[1]] if src_slot[0] == "stack" else state.input[src_slot[1]]
    if not isinstance(src, Frame):
        raise ApplyError(PATH_UNRESOLVED, "add-into source is an uncommitted word")
    if resolve_path(state, action.dest) is None:
        raise ApplyError(PATH_UNRESOLVED,
                         "add-into destination %s unresolved" % path_text(action.dest))

    stack, inp = list(state.stack), list(state.input)
    (src_list, src_i) = src_slot
    (dest_list, dest_i) = dest_slot
    (stack if src_list == "stack" else inp).pop(src_i)
    if src_list == dest_list and src_i < dest_i:
        dest_i -= 1
    target_seq = stack if dest_list == "stack" else inp
    dest_el = target_seq[dest_i]
    if not isinstance(dest_el, Frame):
        raise ApplyError(PATH_UNRESOLVED, "add-into destination is an uncommitted word")
    target_seq[dest_i] = _attach(dest_el, action.dest.steps, action.roles, src,
                                 state.tokens)
    return replace(state, stack=tuple(stack), input=tuple(inp))


def _rebuild(frame, steps, transform):
    if not steps:
        return transform(frame)
    for i, sub in enumerate(frame.subs):
        if steps[0] in sub.roles:
            new_child = _rebuild(sub.child, steps[1:], transform)
            subs = frame.subs[:i] + (Sub(sub.roles, new_child),) + frame.subs[i + 1:]
            return replace(frame, subs=subs)
    raise ApplyError(PATH_UNRESOLVED, "no subframe with role %s" % steps[0])


def _rebuild_at(state, path, transform):
    slot = _element_slot(state, path.anchor)
    if slot is None:
        raise ApplyError(PATH_UNRESOLVED, "path anchor %d out of range" % path.anchor)
    list_name, idx = slot
    seq = list(state.stack) if list_name == "stack" else list(state.input)
    el = seq[idx]
    if not isinstance(el, Frame):
        raise ApplyError(PATH_UNRESOLVED, "path lands on an uncommitted word")
    seq[idx] = _rebuild(el, path.steps, transform)
    if list_name == "stack":
        return replace(state, stack=tuple(seq))
    return replace(state, input=tuple(seq))


def _apply_mark(state, action):
    slot, value = action.slot, action.value

    def transform(frame):
        if slot == "PERSON":
            return replace(frame, forms=replace(frame.forms, person=value))
        if slot == "NUMBER":
            return replace(frame, forms=replace(frame.forms, number=value))
        if slot == "TENSE":
            return replace(frame, forms=replace(frame.forms, tense=value))
        extras = tuple((k, v) for k, v in frame.extras if k != slot)
        return replace(frame, extras=extras + ((slot, value),))

    return _rebuild_at(state, action.path, transform)


def _all_frames(state):
    todo = [el for el in state.stack]
    todo.extend(el for el in state.input if isinstance(el, Frame))
    while todo:
        frame = todo.pop()
        yield frame
        todo.extend(sub.child for sub in frame.subs)


def _apply_intro_empty(state, action):
    target = resolve_path(state, action.coref)
    if target is None:
        raise ApplyError(PATH_UNRESOLVED,
                         "coref target %s unresolved" % path_text(action.coref))
    slot = _element_slot(state, action.coref.anchor)
    el = state.stack[slot[1]] if slot[0] == "stack" else state.input[slot[1]]
    if not isinstance(el, Frame):
        raise ApplyError(PATH_UNRESOLVED, "coref target is an uncommitted word")
    index = target.extras_get("INDEX")
    if index is None:
        used = [int(f.extras_get("INDEX")) for f in _all_frames(state)
                if f.extras_get("INDEX") is not None]
        index = str(max(used, default=0) + 1)
        state = _rebuild_at(
            state, action.coref,
            lambda f: replace(f, extras=f.extras + (("INDEX", index),)))
    empty = Frame(surface="", lex=action.kind, synt="S-NP", sem=UNAVAILABLE,
                  span=None, extras=(("COINDEX", index),))
    return replace(state, stack=state.stack + (empty,))


# ---------------------------------------------------------------------------
# action logs and replay

@dataclass(frozen=True)
class ActionLog:
    """A sentence, its recorded action sequence, and the golden tree."""

    sentence: str
    actions: tuple  # canonical action texts
    gold_tree: Frame
    id: str = ""


def initial_state(sentence: str, bundle: ResourceBundle) -> ParseState:
    tokens = segment(sentence)
    units = tuple(analyze(tok, bundle.lexicon, i) for i, tok in enumerate(tokens))
    return ParseState(stack=(), input=units, tokens=tuple(tokens))


def replay(sentence: str, actions, bundle: ResourceBundle):
    """Apply a recorded action sequence from the initial state.

    Returns (final tree, list of pre-action states); the states list is what
    example extraction consumes.  Raises ApplyError on an inapplicable
    action or when the sequence does not end in a completed parse.
    """
    state = initial_state(sentence, bundle)
    states = []
    for action in actions:
        if isinstance(action, str):
            action = parse_action(action)
        states.append(state)
        state = apply_action(state, action, bundle)
    if not state.done:
        raise ApplyError(INCOMPLETE_PARSE, "action sequence leaves parse unfinished")
    return state.stack[0], states


_SENTENCE_PREFIX = "#SENTENCE "
_TREE_MARKER = "#TREE"


def format_log(log: ActionLog) -> str:
    lines = [_SENTENCE_PREFIX + log.sentence]
    lines.extend(log.actions)
    lines.append(_TREE_MARKER)
    return "\n".join(lines) + "\n" + render_tree(log.gold_tree)


def parse_log_text(text: str, id: str = "") -> ActionLog:
    lines = text.split("\n")
    if not lines or not lines[0].startswith(_SENTENCE_PREFIX):
        raise MalformedAction("log must start with %r" % _SENTENCE_PREFIX.strip())
    sentence = lines[0][len(_SENTENCE_PREFIX):].strip()
    actions = []
    tree_at = None
    for i, line in enumerate(lines[1:], start=1):
        if line.strip() == _TREE_MARKER:
            tree_at = i + 1
            break
        if line.strip():
            actions.append(canonicalize(parse_action(line)))
    if tree_at is None:
        raise MalformedAction("log missing %s section" % _TREE_MARKER)
    gold = parse_tree_text("\n".join(lines[tree_at:]))
    return ActionLog(sentence=sentence, actions=tuple(actions), gold_tree=gold, id=id)


def load_log(path) -> ActionLog:
    with open(path, encoding="utf-8") as f:
        text = f.read()
    return parse_log_text(text, id=os.path.splitext(os.path.basename(path))[0])


def save_log(log: ActionLog, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(format_log(log))


def load_corpus(directory):
    """All *.log files in a directory, sorted by filename."""
    logs = []
    for name in sorted(os.listdir(directory)):
        if name.endswith(".log"):
            logs.append(load_log(os.path.join(directory, name)))
    return logs
