"""Frames, word units, parse states and the indented parse-tree text format.

A frame is one parse-tree node: surface and lexical form, syntactic and
semantic category, role-labeled subframes, and form restrictions (person,
number, tense).  All types here are immutable values; parser operations
build new states instead of mutating old ones.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, replace

UNAVAILABLE = "UNAVAILABLE"

CONCEPT_RE = re.compile(r"^[A-Z0-9?*._-]+$")

PRED = "PRED"
DUMMY = "DUMMY"


def is_concept(name: str) -> bool:
    return bool(CONCEPT_RE.match(name))


@dataclass(frozen=True)
class Forms:
    """Form restrictions; every field defaults to UNAVAILABLE/empty."""

    person: str = UNAVAILABLE  # "1" | "2" | "3"
    number: str = UNAVAILABLE  # "SING" | "PLUR"
    tense: str = UNAVAILABLE   # e.g. "PAST_TENSE"
    extra: frozenset = frozenset()

    def is_default(self) -> bool:
        return (self.person == UNAVAILABLE and self.number == UNAVAILABLE
                and self.tense == UNAVAILABLE and not self.extra)


@dataclass(frozen=True)
class Sub:
    """One subframe: the role labels it carries under its parent."""

    roles: tuple
    child: "Frame"


@dataclass(frozen=True)
class Frame:
    """A parse-tree node.

    span is a [start, end) token interval, or None for empty categories
    (traces and PRO).  extras is a sorted tuple of (slot, value) pairs used
    for special information such as coindexing or unknown-word flags.
    """

    surface: str
    lex: str
    synt: str
    sem: str = UNAVAILABLE
    forms: Forms = Forms()
    subs: tuple = ()
    span: tuple | None = None
    extras: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "extras", tuple(sorted(self.extras)))

    @property
    def is_leaf(self) -> bool:
        return not self.subs

    def extras_get(self, key: str) -> str | None:
        for k, v in self.extras:
            if k == key:
                return v
        return None

    def sub_with_role(self, role: str) -> Frame | None:
        """First subframe whose role list contains `role`, else None."""
        for sub in self.subs:
            if role in sub.roles:
                return sub.child
        return None

    def pred_child(self) -> Frame | None:
        return self.sub_with_role(PRED)


@dataclass(frozen=True)
class WordUnit:
    """A not-yet-committed word: one alternative frame per part of speech."""

    surface: str
    span: tuple
    alternatives: tuple


@dataclass(frozen=True)
class ParseState:
    """Parse stack plus input list.

    The stack top is at the RIGHT end (index -1); the input front is at the
    LEFT end (index +1).  Index 0 is invalid.
    """

    stack: tuple = ()
    input: tuple = ()
    tokens: tuple = ()
    done: bool = False

    def element(self, pos: int):
        """Frame or WordUnit at a signed state position, or None."""
        if pos < 0:
            if -pos <= len(self.stack):
                return self.stack[pos]
        elif pos > 0:
            if pos <= len(self.input):
                return self.input[pos - 1]
        return None


@dataclass(frozen=True)
class TreePath:
    """A state position plus a chain of syntactic roles to descend through."""

    anchor: int
    steps: tuple = ()


def resolve_path(state: ParseState, path: TreePath) -> Frame | None:
    """Resolve a tree path against a parse state; None on any failure.

    A WordUnit at the anchor stands in for its first alternative.  Each step
    descends to the first subframe whose role list contains the step symbol.
    Total: never raises.
    """
    el = state.element(path.anchor)
    if el is None:
        return None
    frame = el.alternatives[0] if isinstance(el, WordUnit) else el
    for step in path.steps:
        frame = frame.sub_with_role(step)
        if frame is None:
            return None
    return frame


def path_text(path: TreePath) -> str:
    return " OF ".join(list(path.steps) + [str(path.anchor)])


def parse_path_tokens(tokens) -> TreePath:
    """Parse ["OBJ", "OF", "-1"]-style token runs into a TreePath."""
    if not tokens or len(tokens) % 2 == 0:
        raise ValueError("malformed path: %r" % (tokens,))
    steps = []
    for i, tok in enumerate(tokens[:-1]):
        if i % 2 == 1:
            if tok.upper() != "OF":
                raise ValueError("malformed path: expected OF, got %r" % tok)
        else:
            steps.append(tok.upper())
    try:
        anchor = int(tokens[-1])
    except ValueError:
        raise ValueError("malformed path: bad anchor %r" % tokens[-1])
    if anchor == 0:
        raise ValueError("malformed path: anchor 0 is invalid")
    return TreePath(anchor, tuple(steps))


# ---------------------------------------------------------------------------
# surface text helpers

_NO_SPACE_BEFORE = {".", ",", ";", ":", "!", "?", ")"}
_NO_SPACE_AFTER = {"("}


def detokenize(tokens) -> str:
    """Join tokens with spaces, gluing punctuation to its neighbor."""
    out = []
    for tok in tokens:
        if out and tok not in _NO_SPACE_BEFORE and out[-1] not in _NO_SPACE_AFTER:
            out.append(" ")
        out.append(tok)
    return "".join(out)


def surface_for_span(tokens, span) -> str:
    if span is None:
        return ""
    return detokenize(tokens[span[0]:span[1]])


def quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def unquote(s: str) -> str:
    if len(s) < 2 or s[0] != '"' or s[-1] != '"':
        raise ValueError("not a quoted string: %r" % s)
    body = s[1:-1]
    out = []
    i = 0
    while i < len(body):
        c = body[i]
        if c == "\\":
            if i + 1 >= len(body):
                raise ValueError("dangling escape in %r" % s)
            out.append(body[i + 1])
            i += 2
        else:
            out.append(c)
            i += 1
    return "".join(out)


# ---------------------------------------------------------------------------
# forms tokens (shared by the tree format and the lexicon)

_PERSON_OUT = {"1": "1st_person", "2": "2nd_person", "3": "3rd_person"}
_PERSON_IN = {"1": "1", "1ST_PERSON": "1", "2": "2", "2ND_PERSON": "2",
              "3": "3", "3RD_PERSON": "3"}


def forms_tokens(forms: Forms):
    """Render a Forms value as its token list, Fig.-2 style order."""
    toks = []
    if forms.person != UNAVAILABLE:
        toks.append(_PERSON_OUT[forms.person])
    if forms.number != UNAVAILABLE:
        toks.append(forms.number.lower())
    if forms.tense != UNAVAILABLE:
        toks.append(forms.tense.lower())
    toks.extend(sorted(t.lower() for t in forms.extra))
    return toks


def parse_forms_tokens(tokens) -> Forms:
    person = number = tense = UNAVAILABLE
    extra = set()
    for tok in tokens:
        u = tok.upper()
        if u in _PERSON_IN:
            person = _PERSON_IN[u]
        elif u in ("SING", "PLUR"):
            number = u
        elif u.endswith("_TENSE") and tense == UNAVAILABLE:
            tense = u
        else:
            extra.add(u)
    return Forms(person, number, tense, frozenset(extra))


# ---------------------------------------------------------------------------
# parse-tree text format

class MalformedTree(Exception):
    """Raised on bad indentation or headers; carries the 1-based line number."""

    def __init__(self, message: str, line_no: int):
        super().__init__("line %d: %s" % (line_no, message))
        self.line_no = line_no


def render_tree(frame: Frame) -> str:
    """Emit the indented tree text for a frame (two-space indent per level).

    Field order is fixed: synt/sem, forms, lex, extras, subs.  The forms
    line appears only when some field is set, the lex line only when lex
    differs from the surface.  Output is deterministic and ends with a
    newline.
    """
    lines = []
    _render_frame(frame, None, 0, lines)
    return "\n".join(lines) + "\n"


def _render_frame(frame, roles, depth, lines):
    pad = "  " * depth
    head = quote(frame.surface) + ":"
    if roles is not None:
        head = "(" + " ".join(roles) + ") " + head
    lines.append(pad + head)
    fp = "  " * (depth + 1)
    if frame.sem != UNAVAILABLE:
        lines.append("%ssynt/sem: %s/%s" % (fp, frame.synt, frame.sem))
    else:
        lines.append("%ssynt: %s" % (fp, frame.synt))
    toks = forms_tokens(frame.forms)
    if toks:
        lines.append("%sforms: (%s)" % (fp, " ".join(toks)))
    if frame.lex != frame.surface:
        lines.append("%slex: %s" % (fp, quote(frame.lex)))
    if frame.extras:
        body = " ".join("(%s %s)" % kv for kv in frame.extras)
        lines.append("%sextras: (%s)" % (fp, body))
    if frame.subs:
        lines.append("%ssubs:" % fp)
        for sub in frame.subs:
            _render_frame(sub.child, sub.roles, depth + 2, lines)


_HEADER_RE = re.compile(
    r'^(?:\((?P<roles>[A-Z0-9?*._ -]*)\) )?(?P<surf>"(?:[^"\\]|\\.)*"):$')


def parse_tree_text(text: str) -> Frame:
    """Parse the render_tree format back into a Frame.

    Token spans are reconstructed by numbering non-empty leaves from 0 in
    left-to-right order; leaves with an empty surface become span-less
    (empty-category) frames.  Raises MalformedTree with a line number.
    """
    lines = []
    for no, raw in enumerate(text.split("\n"), start=1):
        if not raw.strip():
            continue
        indent = len(raw) - len(raw.lstrip(" "))
        if indent % 2 != 0:
            raise MalformedTree("odd indentation", no)
        lines.append((no, indent // 2, raw.strip()))
    if not lines:
        raise MalformedTree("empty tree text", 1)
    frame, roles, pos = _parse_frame(lines, 0, 0)
    if roles is not None:
        raise MalformedTree("root frame must not carry roles", lines[0][0])
    if pos != len(lines):
        raise MalformedTree("trailing content", lines[pos][0])
    frame, _ = _assign_spans(frame, 0)
    return frame


def _parse_frame(lines, pos, depth):
    no, d, content = lines[pos]
    if d != depth:
        raise MalformedTree("expected depth %d, found %d" % (depth, d), no)
    m = _HEADER_RE.match(content)
    if not m:
        raise MalformedTree("bad frame header: %r" % content, no)
    roles = None
    if m.group("roles") is not None:
        roles = tuple(m.group("roles").split())
    surface = unquote(m.group("surf"))
    pos += 1

    synt = None
    sem = UNAVAILABLE
    forms = Forms()
    lex = surface
    extras = ()
    subs = []
    seen = set()
    order = ["synt", "forms", "lex", "extras", "subs"]
    while pos < len(lines):
        no, d, content = lines[pos]
        if d != depth + 1:
            break
        key, _, rest = content.partition(":")
        rest = rest.strip()
        field_name = "synt" if key in ("synt", "synt/sem") else key
        if field_name not in order or field_name in seen:
            raise MalformedTree("unexpected field %r" % key, no)
        if seen and order.index(field_name) < max(order.index(s) for s in seen):
            raise MalformedTree("field %r out of order" % key, no)
        seen.add(field_name)
        if key == "synt/sem":
            synt, _, sem = rest.partition("/")
            if not synt or not sem:
                raise MalformedTree("bad synt/sem value", no)
            pos += 1
        elif key == "synt":
            if not rest:
                raise MalformedTree("bad synt value", no)
            synt = rest
            pos += 1
        elif key == "forms":
            if not (rest.startswith("(") and rest.endswith(")")):
                raise MalformedTree("bad forms value", no)
            forms = parse_forms_tokens(rest[1:-1].split())
            pos += 1
        elif key == "lex":
            try:
                lex = unquote(rest)
            except ValueError:
                raise MalformedTree("bad lex value", no)
            pos += 1
        elif key == "extras":
            extras = _parse_extras(rest, no)
            pos += 1
        elif key == "subs":
            if rest:
                raise MalformedTree("subs takes no inline value", no)
            pos += 1
            while pos < len(lines) and lines[pos][1] == depth + 2:
                child, child_roles, pos = _parse_frame(lines, pos, depth + 2)
                if child_roles is None:
                    raise MalformedTree("subframe missing roles", lines[pos - 1][0])
                subs.append(Sub(child_roles, child))
            if not subs:
                raise MalformedTree("empty subs block", no)
            break
        else:
            raise MalformedTree("unknown field %r" % key, no)
    if synt is None:
        raise MalformedTree("frame missing synt line", lines[pos - 1][0])
    frame = Frame(surface=surface, lex=lex, synt=synt, sem=sem, forms=forms,
                  subs=tuple(subs), span=None, extras=extras)
    return frame, roles, pos


_EXTRA_RE = re.compile(r"\(([^() ]+) ([^()]*)\)")


def _parse_extras(rest, no):
    if not (rest.startswith("(") and rest.endswith(")")):
        raise MalformedTree("bad extras value", no)
    body = rest[1:-1].strip()
    pairs = _EXTRA_RE.findall(body)
    joined = " ".join("(%s %s)" % kv for kv in pairs)
    if joined != body:
        raise MalformedTree("bad extras value", no)
    return tuple(pairs)


def _assign_spans(frame, next_idx):
    if frame.is_leaf:
        if frame.surface == "":
            return frame, next_idx
        return replace(frame, span=(next_idx, next_idx + 1)), next_idx + 1
    new_subs = []
    lo = hi = None
    for sub in frame.subs:
        child, next_idx = _assign_spans(sub.child, next_idx)
        new_subs.append(Sub(sub.roles, child))
        if child.span is not None:
            if lo is None:
                lo = child.span[0]
            hi = child.span[1]
    span = None if lo is None else (lo, hi)
    return replace(frame, subs=tuple(new_subs), span=span), next_idx


# ---------------------------------------------------------------------------
# invariant checking (used by tests and the corpus builder)

def check_frame(frame: Frame) -> None:
    """Validate span invariants; raises ValueError on the first violation."""
    _check(frame)


def _check(frame):
    pred_count = 0
    prev_end = None
    lo = hi = None
    for sub in frame.subs:
        if PRED in sub.roles:
            pred_count += 1
        _check(sub.child)
        span = sub.child.span
        if span is None:
            continue
        if prev_end is not None and span[0] != prev_end:
            raise ValueError(
                "children of %r not contiguous at token %d" % (frame.surface, span[0]))
        prev_end = span[1]
        if lo is None:
            lo = span[0]
        hi = span[1]
    if pred_count > 1:
        raise ValueError("frame %r has %d PRED children" % (frame.surface, pred_count))
    if frame.subs:
        expected = None if lo is None else (lo, hi)
        if frame.span != expected:
            raise ValueError(
                "frame %r span %r != union of children %r"
                % (frame.surface, frame.span, expected))
    if frame.span is not None and frame.span[1] <= frame.span[0]:
        raise ValueError("frame %r has empty span %r" % (frame.surface, frame.span))
