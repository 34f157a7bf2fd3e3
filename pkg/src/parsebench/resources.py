"""Lexicon, is-a concept graph and verb subcategorization table.

All three load from s-expression files and are immutable after load; a
ResourceBundle is shared read-only across any number of parses.
"""
from __future__ import annotations

from dataclasses import dataclass

from . import sexp
from .frames import (UNAVAILABLE, Forms, Frame, WordUnit, is_concept,
                     parse_forms_tokens)

ANY = "*"

UNKNOWN_SYNT = "S-NOUN"
UNKNOWN_SEM = "C-UNKNOWN"


class ResourceError(Exception):
    pass


class CycleError(ResourceError):
    pass


class UnknownConceptError(ResourceError):
    pass


@dataclass(frozen=True)
class Reading:
    synt: str
    sem: str = UNAVAILABLE
    forms: Forms = Forms()
    lex_override: str | None = None


@dataclass(frozen=True)
class LexEntry:
    word: str
    readings: tuple


class ConceptGraph:
    """Directed acyclic graph of concepts connected by is-a links."""

    def __init__(self, concepts, links):
        self.concepts = frozenset(concepts)
        self.links = frozenset(links)
        self._parents = {c: [] for c in self.concepts}
        self._children = {c: [] for c in self.concepts}
        for child, parent in sorted(self.links):
            if child not in self.concepts or parent not in self.concepts:
                raise UnknownConceptError(
                    "is-a link (%s %s) references undeclared concept" % (child, parent))
            self._parents[child].append(parent)
            self._children[parent].append(child)
        self._check_acyclic()
        self._ancestors_cache = {}

    def _check_acyclic(self):
        WHITE, GRAY, BLACK = 0, 1, 2
        color = {c: WHITE for c in self.concepts}
        for start in sorted(self.concepts):
            if color[start] != WHITE:
                continue
            stack = [(start, iter(self._parents[start]))]
            color[start] = GRAY
            while stack:
                node, it = stack[-1]
                advanced = False
                for nxt in it:
                    if color[nxt] == GRAY:
                        raise CycleError("is-a cycle through %s" % nxt)
                    if color[nxt] == WHITE:
                        color[nxt] = GRAY
                        stack.append((nxt, iter(self._parents[nxt])))
                        advanced = True
                        break
                if not advanced:
                    color[node] = BLACK
                    stack.pop()

    def ancestors(self, c):
        """All concepts reachable from c via is-a links, including c."""
        if c not in self.concepts:
            raise UnknownConceptError("unknown concept %s" % c)
        cached = self._ancestors_cache.get(c)
        if cached is None:
            seen = {c}
            todo = [c]
            while todo:
                for p in self._parents[todo.pop()]:
                    if p not in seen:
                        seen.add(p)
                        todo.append(p)
            cached = frozenset(seen)
            self._ancestors_cache[c] = cached
        return cached

    def direct_children(self, c):
        if c not in self.concepts:
            raise UnknownConceptError("unknown concept %s" % c)
        return tuple(sorted(self._children[c]))


def isa(kb: ConceptGraph, c1: str, c2: str) -> bool:
    """True iff c2 is reachable from c1 via zero or more is-a links."""
    if c2 not in kb.concepts:
        raise UnknownConceptError("unknown concept %s" % c2)
    return c2 in kb.ancestors(c1)


def generalize(kb: ConceptGraph, c: str, level: str) -> str | None:
    """The ancestor of c sitting directly below `level`, or None.

    With several candidates (a DAG) the lexicographically smallest name
    wins, keeping learned structures reproducible.
    """
    candidates = kb.ancestors(c) & set(kb.direct_children(level))
    if not candidates:
        return None
    return min(candidates)


@dataclass(frozen=True)
class SubcatSlot:
    synt_role: str
    sem_role: str
    sem_class: str  # a concept name, or ANY


@dataclass(frozen=True)
class SubcatEntry:
    verb_sem: str
    patterns: tuple  # tuple of tuples of SubcatSlot


@dataclass(frozen=True)
class ResourceBundle:
    lexicon: dict
    kb: ConceptGraph
    subcat: dict


# ---------------------------------------------------------------------------
# segmentation and morphological analysis

_PUNCT = set(".,;:!?()\"'")


def segment(text: str):
    """Split text into word tokens, peeling punctuation off chunk edges.

    Internal hyphens and apostrophes stay inside their token.
    """
    tokens = []
    for chunk in text.split():
        lead = []
        while chunk and chunk[0] in _PUNCT:
            lead.append(chunk[0])
            chunk = chunk[1:]
        trail = []
        while chunk and chunk[-1] in _PUNCT:
            trail.append(chunk[-1])
            chunk = chunk[:-1]
        tokens.extend(lead)
        if chunk:
            tokens.append(chunk)
        tokens.extend(reversed(trail))
    return tokens


def analyze(token: str, lexicon: dict, index: int = 0) -> WordUnit:
    """Build the primitive-frame word unit for one token.

    One alternative per lexicon reading, in file order.  Unknown tokens get
    a single noun fallback alternative flagged UNKNOWN in extras.
    """
    span = (index, index + 1)
    entry = lexicon.get(token)
    if entry is None:
        entry = lexicon.get(token.lower())
    if entry is None:
        alt = Frame(surface=token, lex=token, synt=UNKNOWN_SYNT, sem=UNKNOWN_SEM,
                    span=span, extras=(("UNKNOWN", "T"),))
        return WordUnit(surface=token, span=span, alternatives=(alt,))
    alts = []
    for reading in entry.readings:
        alts.append(Frame(
            surface=token,
            lex=reading.lex_override if reading.lex_override is not None else entry.word,
            synt=reading.synt,
            sem=reading.sem,
            forms=reading.forms,
            span=span,
        ))
    return WordUnit(surface=token, span=span, alternatives=tuple(alts))


def subcat_match(bundle: ResourceBundle, verb_frame: Frame, arg_frame: Frame) -> str | None:
    """Semantic role for arg_frame against verb_frame's subcat entry.

    Patterns are scanned in order; within a pattern, slots whose syntactic
    role is already filled on the verb frame are skipped.  The first open
    slot whose class is ANY or subsumes the argument's sem wins.  None when
    there is no entry or no slot matches.
    """
    entry = bundle.subcat.get(verb_frame.sem)
    if entry is None:
        return None
    filled = set()
    for sub in verb_frame.subs:
        filled.update(sub.roles)
    for pattern in entry.patterns:
        for slot in pattern:
            if slot.synt_role in filled:
                continue
            if slot.sem_class == ANY:
                return slot.sem_role
            if arg_frame.sem == UNAVAILABLE:
                continue
            try:
                if isa(bundle.kb, arg_frame.sem, slot.sem_class):
                    return slot.sem_role
            except UnknownConceptError:
                continue
    return None


# ---------------------------------------------------------------------------
# file loading

def _require_concept(name: str, what: str) -> str:
    if not is_concept(name):
        raise ResourceError("bad %s concept name: %r" % (what, name))
    return name


def load_lexicon(text: str) -> dict:
    """Parse lexicon file text into a word -> LexEntry mapping."""
    lexicon = {}
    for expr in sexp.parse_many(text):
        if not (isinstance(expr, list) and expr and expr[0] == "word"):
            raise ResourceError("expected (word ...), got %r" % (expr,))
        if len(expr) < 3 or not isinstance(expr[1], sexp.Quoted):
            raise ResourceError("word entry needs a quoted word and readings")
        word = str(expr[1])
        readings = []
        for rd in expr[2:]:
            if not (isinstance(rd, list) and rd and rd[0] == "reading"):
                raise ResourceError("expected (reading ...) in entry for %r" % word)
            kw = _keywords(rd[1:], word)
            if ":synt" not in kw:
                raise ResourceError("reading for %r missing :synt" % word)
            synt = _require_concept(kw[":synt"], "synt")
            sem = UNAVAILABLE
            if ":sem" in kw:
                sem = _require_concept(kw[":sem"], "sem")
            forms = Forms()
            if ":forms" in kw:
                if not isinstance(kw[":forms"], list):
                    raise ResourceError("bad :forms for %r" % word)
                forms = parse_forms_tokens(kw[":forms"])
            lex_override = None
            if ":lex" in kw:
                lex_override = str(kw[":lex"])
            readings.append(Reading(synt, sem, forms, lex_override))
        if not readings:
            raise ResourceError("word %r has no readings" % word)
        if word in lexicon:
            raise ResourceError("duplicate lexicon entry %r" % word)
        lexicon[word] = LexEntry(word, tuple(readings))
    return lexicon


def _keywords(items, word):
    kw = {}
    i = 0
    while i < len(items):
        key = items[i]
        if not (isinstance(key, str) and key.startswith(":")):
            raise ResourceError("bad reading syntax for %r" % word)
        if i + 1 >= len(items):
            raise ResourceError("keyword %s for %r missing value" % (key, word))
        kw[key] = items[i + 1]
        i += 2
    return kw


def load_kb(text: str) -> ConceptGraph:
    """Parse kb file text: (concept X) declarations and (isa X Y) links."""
    concepts = set()
    links = set()
    for expr in sexp.parse_many(text):
        if not (isinstance(expr, list) and expr):
            raise ResourceError("bad kb entry %r" % (expr,))
        if expr[0] == "concept" and len(expr) == 2:
            concepts.add(_require_concept(expr[1], "declared"))
        elif expr[0] == "isa" and len(expr) == 3:
            links.add((_require_concept(expr[1], "child"),
                       _require_concept(expr[2], "parent")))
        else:
            raise ResourceError("bad kb entry %r" % (expr,))
    return ConceptGraph(concepts, links)


def load_subcat(text: str) -> dict:
    """Parse subcat file text into a verb-sem -> SubcatEntry mapping."""
    table = {}
    for expr in sexp.parse_many(text):
        if not (isinstance(expr, list) and len(expr) >= 3 and expr[0] == "verb"):
            raise ResourceError("expected (verb SEM (pattern ...)...), got %r" % (expr,))
        verb_sem = _require_concept(expr[1], "verb")
        patterns = []
        for pat in expr[2:]:
            if not (isinstance(pat, list) and pat and pat[0] == "pattern"):
                raise ResourceError("expected (pattern ...) for %s" % verb_sem)
            slots = []
            for slot in pat[1:]:
                if not (isinstance(slot, list) and len(slot) == 3):
                    raise ResourceError("bad slot %r for %s" % (slot, verb_sem))
                synt_role, sem_role, sem_class = slot
                if not synt_role or not sem_role:
                    raise ResourceError("empty role symbol for %s" % verb_sem)
                if sem_class != ANY:
                    _require_concept(sem_class, "slot class")
                slots.append(SubcatSlot(synt_role, sem_role, sem_class))
            if not slots:
                raise ResourceError("empty pattern for %s" % verb_sem)
            patterns.append(tuple(slots))
        if verb_sem in table:
            raise ResourceError("duplicate subcat entry %s" % verb_sem)
        table[verb_sem] = SubcatEntry(verb_sem, tuple(patterns))
    return table


def load_bundle(lexicon_path, kb_path, subcat_path) -> ResourceBundle:
    """Load and cross-validate the three resource files."""
    with open(lexicon_path, encoding="utf-8") as f:
        lexicon = load_lexicon(f.read())
    with open(kb_path, encoding="utf-8") as f:
        kb = load_kb(f.read())
    with open(subcat_path, encoding="utf-8") as f:
        subcat = load_subcat(f.read())
    for entry in lexicon.values():
        for reading in entry.readings:
            for concept in (reading.synt, reading.sem):
                if concept != UNAVAILABLE and concept not in kb.concepts:
                    raise UnknownConceptError(
                        "lexicon entry %r uses undeclared concept %s"
                        % (entry.word, concept))
    for entry in subcat.values():
        if entry.verb_sem not in kb.concepts:
            raise UnknownConceptError(
                "subcat entry %s not in concept graph" % entry.verb_sem)
        for pattern in entry.patterns:
            for slot in pattern:
                if slot.sem_class != ANY and slot.sem_class not in kb.concepts:
                    raise UnknownConceptError(
                        "subcat slot class %s not in concept graph" % slot.sem_class)
    return ResourceBundle(lexicon=lexicon, kb=kb, subcat=subcat)
