"""Tiny s-expression reader/writer used by all textual resource formats.

Expressions are nested lists of atoms.  Atoms are plain symbols (str) or
double-quoted strings (Quoted, a str subclass); numbers stay strings and
are converted by callers.  `;` starts a comment running to end of line.
"""
from __future__ import annotations


class Quoted(str):
    """A string atom that is written back with double quotes."""

    __slots__ = ()


class SexpError(Exception):
    pass


def tokenize(text: str):
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c == ";":
            while i < n and text[i] != "\n":
                i += 1
        elif c.isspace():
            i += 1
        elif c in "()":
            yield c
            i += 1
        elif c == '"':
            j = i + 1
            out = []
            while j < n and text[j] != '"':
                if text[j] == "\\":
                    if j + 1 >= n:
                        raise SexpError("dangling escape in string")
                    out.append(text[j + 1])
                    j += 2
                else:
                    out.append(text[j])
                    j += 1
            if j >= n:
                raise SexpError("unterminated string")
            yield Quoted("".join(out))
            i = j + 1
        else:
            j = i
            while j < n and not text[j].isspace() and text[j] not in '();"':
                j += 1
            yield text[i:j]
            i = j


def parse_many(text: str) -> list:
    """Parse every top-level expression in `text`."""
    stack = [[]]
    for tok in tokenize(text):
        if tok == "(":
            stack.append([])
        elif tok == ")":
            if len(stack) == 1:
                raise SexpError("unbalanced )")
            done = stack.pop()
            stack[-1].append(done)
        else:
            stack[-1].append(tok)
    if len(stack) != 1:
        raise SexpError("unbalanced (")
    return stack[0]


def parse_one(text: str):
    exprs = parse_many(text)
    if len(exprs) != 1:
        raise SexpError("expected exactly one expression, got %d" % len(exprs))
    return exprs[0]


def format_sexp(expr) -> str:
    if isinstance(expr, Quoted):
        return '"' + expr.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(expr, str):
        return expr
    return "(" + " ".join(format_sexp(e) for e in expr) + ")"
