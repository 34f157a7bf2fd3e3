"""Feature language: definitions, evaluation, and example extraction.

Features map a parse state to a categorical symbol.  Evaluation is total:
whenever a feature's referent does not exist in the state, its value is
UNAVAILABLE rather than an error.
"""
from __future__ import annotations

from dataclasses import dataclass

from . import sexp
from .actions import replay
from .frames import (UNAVAILABLE, ParseState, TreePath, WordUnit, path_text,
                     resolve_path)
from .resources import (ResourceBundle, UnknownConceptError, generalize, isa,
                        subcat_match)

TRUE = "TRUE"
FALSE = "FALSE"

SELECTORS = ("SYNT", "SEM", "LEX", "SURF", "TENSE", "NUMBER", "PERSON")


class MalformedFeature(Exception):
    pass


@dataclass(frozen=True)
class Select:
    """Read one field of the frame a path designates.

    alt_filter picks a word unit's alternative by generalized syntactic
    class before descending; level generalizes the resulting concept to a
    named abstraction level (SYNT/SEM selectors only).
    """

    selector: str
    path: TreePath
    alt_filter: str | None = None
    level: str | None = None


@dataclass(frozen=True)
class Exists:
    path: TreePath


@dataclass(frozen=True)
class Agreement:
    a: int
    b: int


@dataclass(frozen=True)
class SemRole:
    arg: int
    head: int


def parse_feature(text: str):
    """Parse one feature s-expression into its canonical FeatureDef."""
    try:
        expr = sexp.parse_one(text)
    except sexp.SexpError as exc:
        raise MalformedFeature(str(exc))
    if not isinstance(expr, list) or not expr or not isinstance(expr[0], str):
        raise MalformedFeature("feature must be a non-empty list: %r" % text)
    head = expr[0].upper()
    rest = expr[1:]
    if head in SELECTORS:
        if not rest or not (isinstance(rest[0], str) and rest[0].upper() == "OF"):
            raise MalformedFeature("selector %s missing OF: %r" % (head, text))
        items = rest[1:]
        level = None
        if len(items) >= 2 and isinstance(items[-2], str) and items[-2].upper() == "AT":
            if not isinstance(items[-1], str):
                raise MalformedFeature("bad AT level: %r" % text)
            level = items[-1].upper()
            items = items[:-2]
        if level is not None and head not in ("SYNT", "SEM"):
            raise MalformedFeature(
                "AT level is only valid with SYNT/SEM: %r" % text)
        path, alt = _parse_path_items(items, text, allow_alt=True)
        return Select(head, path, alt, level)
    if head == "EXISTS":
        path, _ = _parse_path_items(rest, text, allow_alt=False)
        return Exists(path)
    if head == "AGREEMENT":
        a, b = _two_positions(rest, text)
        return Agreement(a, b)
    if head == "SEMROLE":
        arg, hd = _two_positions(rest, text)
        return SemRole(arg, hd)
    raise MalformedFeature("unknown feature keyword %r" % expr[0])


def _two_positions(rest, text):
    if len(rest) != 2:
        raise MalformedFeature("expected two state positions: %r" % text)
    out = []
    for item in rest:
        try:
            pos = int(item)
        except (TypeError, ValueError):
            raise MalformedFeature("bad state position %r in %r" % (item, text))
        if pos == 0:
            raise MalformedFeature("state position 0 is invalid: %r" % text)
        out.append(pos)
    return out


def _parse_path_items(items, text, allow_alt):
    """Parse `elem OF elem OF ... anchor` items, extracting one (ALT X)."""
    if not items or len(items) % 2 == 0:
        raise MalformedFeature("malformed path in %r" % text)
    elems = []
    for i, item in enumerate(items):
        if i % 2 == 1:
            if not (isinstance(item, str) and item.upper() == "OF"):
                raise MalformedFeature("expected OF in path: %r" % text)
        else:
            elems.append(item)
    alt = None
    steps = []
    for j, elem in enumerate(elems[:-1]):
        if isinstance(elem, list):
            if not allow_alt:
                raise MalformedFeature("ALT not allowed here: %r" % text)
            if (len(elem) != 2 or not isinstance(elem[0], str)
                    or elem[0].upper() != "ALT" or not isinstance(elem[1], str)):
                raise MalformedFeature("bad ALT filter in %r" % text)
            if alt is not None or j != len(elems) - 2:
                raise MalformedFeature(
                    "ALT must appear once, directly before the anchor: %r" % text)
            alt = elem[1].upper()
        else:
            steps.append(elem.upper())
    anchor_tok = elems[-1]
    try:
        anchor = int(anchor_tok)
    except (TypeError, ValueError):
        raise MalformedFeature("bad path anchor %r in %r" % (anchor_tok, text))
    if anchor == 0:
        raise MalformedFeature("path anchor 0 is invalid: %r" % text)
    return TreePath(anchor, tuple(steps)), alt


def feature_text(fdef) -> str:
    """Canonical text; parse_feature inverse."""
    if isinstance(fdef, Select):
        elems = list(fdef.path.steps)
        if fdef.alt_filter is not None:
            elems.append("(ALT %s)" % fdef.alt_filter)
        elems.append(str(fdef.path.anchor))
        body = " OF ".join(elems)
        at = " AT %s" % fdef.level if fdef.level is not None else ""
        return "(%s OF %s%s)" % (fdef.selector, body, at)
    if isinstance(fdef, Exists):
        return "(EXISTS %s)" % path_text(fdef.path)
    if isinstance(fdef, Agreement):
        return "(AGREEMENT %d %d)" % (fdef.a, fdef.b)
    if isinstance(fdef, SemRole):
        return "(SEMROLE %d %d)" % (fdef.arg, fdef.head)
    raise TypeError("not a feature: %r" % (fdef,))


# ---------------------------------------------------------------------------
# evaluation

def _safe_isa(kb, c1, c2):
    try:
        return isa(kb, c1, c2)
    except UnknownConceptError:
        return False


def _frame_at(state, pos):
    return resolve_path(state, TreePath(pos))


def _compatible(x, y):
    return x == UNAVAILABLE or y == UNAVAILABLE or x == y


def eval_feature(state: ParseState, fdef, bundle: ResourceBundle) -> str:
    """Compute a feature value for a parse state; total, never raises."""
    if isinstance(fdef, Select):
        return _eval_select(state, fdef, bundle)
    if isinstance(fdef, Exists):
        return TRUE if resolve_path(state, fdef.path) is not None else FALSE
    if isinstance(fdef, Agreement):
        fa = _frame_at(state, fdef.a)
        fb = _frame_at(state, fdef.b)
        if fa is None or fb is None:
            return UNAVAILABLE
        ok = (_compatible(fa.forms.person, fb.forms.person)
              and _compatible(fa.forms.number, fb.forms.number))
        return TRUE if ok else FALSE
    if isinstance(fdef, SemRole):
        arg = _frame_at(state, fdef.arg)
        head = _frame_at(state, fdef.head)
        if arg is None or head is None:
            return UNAVAILABLE
        role = subcat_match(bundle, head, arg)
        return role if role is not None else UNAVAILABLE
    raise TypeError("not a feature: %r" % (fdef,))


def _eval_select(state, fdef, bundle):
    el = state.element(fdef.path.anchor)
    if el is None:
        return UNAVAILABLE
    if isinstance(el, WordUnit):
        if fdef.alt_filter is None:
            frame = el.alternatives[0]
        else:
            frame = None
            for alt in el.alternatives:
                if _safe_isa(bundle.kb, alt.synt, fdef.alt_filter):
                    frame = alt
                    break
            if frame is None:
                return UNAVAILABLE
    else:
        frame = el
        if fdef.alt_filter is not None and not _safe_isa(
                bundle.kb, frame.synt, fdef.alt_filter):
            return UNAVAILABLE
    for step in fdef.path.steps:
        frame = frame.sub_with_role(step)
        if frame is None:
            return UNAVAILABLE
    sel = fdef.selector
    if sel == "SYNT":
        value = frame.synt
    elif sel == "SEM":
        value = frame.sem
    elif sel == "LEX":
        value = frame.lex
    elif sel == "SURF":
        value = frame.surface
    elif sel == "TENSE":
        value = frame.forms.tense
    elif sel == "NUMBER":
        value = frame.forms.number
    else:
        value = frame.forms.person
    if value == UNAVAILABLE:
        return UNAVAILABLE
    if fdef.level is not None:
        try:
            general = generalize(bundle.kb, value, fdef.level)
        except UnknownConceptError:
            return UNAVAILABLE
        return general if general is not None else UNAVAILABLE
    return value


# ---------------------------------------------------------------------------
# feature sets and parse examples

@dataclass(frozen=True)
class FeatureSet:
    """An ordered, duplicate-free list of features; order fixes the vector."""

    features: tuple
    texts: tuple

    def __len__(self):
        return len(self.features)


def make_feature_set(defs) -> FeatureSet:
    defs = tuple(defs)
    texts = tuple(feature_text(d) for d in defs)
    seen = set()
    for t in texts:
        if t in seen:
            raise MalformedFeature("duplicate feature %s" % t)
        seen.add(t)
    return FeatureSet(defs, texts)


def load_feature_set(text: str) -> FeatureSet:
    """One feature s-expression per line; `;` comments."""
    defs = []
    for raw in text.split("\n"):
        line = raw.split(";", 1)[0].strip()
        if line:
            defs.append(parse_feature(line))
    return make_feature_set(defs)


def eval_vector(state: ParseState, feature_set: FeatureSet,
                bundle: ResourceBundle) -> tuple:
    return tuple(eval_feature(state, f, bundle) for f in feature_set.features)


@dataclass(frozen=True)
class ParseExample:
    """One (feature vector, parse action) pair from a logged parse step."""

    vector: tuple
    action: str
    provenance: tuple  # (sentence id, step index)


def extract_examples(logs, feature_set: FeatureSet, bundle: ResourceBundle):
    """One ParseExample per logged action, from the pre-action state."""
    examples = []
    for log in logs:
        _, states = replay(log.sentence, log.actions, bundle)
        for step, (state, action) in enumerate(zip(states, log.actions)):
            examples.append(ParseExample(
                vector=eval_vector(state, feature_set, bundle),
                action=action,
                provenance=(log.id, step)))
    return examples


def find_conflicts(examples):
    """Groups of examples with identical vectors but different actions.

    A non-empty result is the supervisor's cue to add a discriminating
    feature.  Returns a list of (vector, examples) pairs, deterministic.
    """
    by_vector = {}
    for ex in examples:
        by_vector.setdefault(ex.vector, []).append(ex)
    conflicts = []
    for vector, group in by_vector.items():
        if len({ex.action for ex in group}) > 1:
            conflicts.append((vector, group))
    conflicts.sort(key=lambda item: item[1][0].provenance)
    return conflicts


# ---------------------------------------------------------------------------
# example-set files (tab separated, header of canonical feature texts)

def format_examples(examples, feature_set: FeatureSet) -> str:
    lines = ["\t".join(feature_set.texts + ("ACTION",))]
    for ex in examples:
        lines.append("\t".join(ex.vector + (ex.action,)))
    return "\n".join(lines) + "\n"


def parse_examples_text(text: str):
    """Read an example-set file back; provenance is the line number."""
    lines = [l for l in text.split("\n") if l.strip()]
    if not lines:
        return []
    width = len(lines[0].split("\t")) - 1
    examples = []
    for no, line in enumerate(lines[1:], start=2):
        cells = line.split("\t")
        if len(cells) != width + 1:
            raise MalformedFeature("line %d: expected %d columns" % (no, width + 1))
        examples.append(ParseExample(tuple(cells[:-1]), cells[-1], ("file", no)))
    return examples
