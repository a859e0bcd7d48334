"""Pretty-printer emitting the rule-language concrete syntax.

Parentheses are minimal with respect to the operator precedence table;
parse_term(pretty(t)) is structurally equal to t.
"""

from __future__ import annotations

from .terms import AApp, ANum, App, ATerm, AVar, Num, Term, Var

_INFIX = {
    "\\/": 100,
    "/\\": 200,
    "=": 300,
    "!=": 300,
    "!==": 300,
    "<=": 300,
    "<": 300,
    ">=": 300,
    ">": 300,
    "+": 400,
    "*": 500,
}
_PREFIX_PREC = 600
_ATOM_PREC = 1000


def _prec(t) -> int:
    if isinstance(t, (App, AApp)) and t.args:
        if t.functor in _INFIX:
            return _INFIX[t.functor]
        if t.functor == "~" and len(t.args) == 1:
            return _PREFIX_PREC
    return _ATOM_PREC


def _render(t, ids: bool) -> str:
    suffix = f"#{t.id}" if ids else ""
    if isinstance(t, (Var, AVar)):
        return t.name + suffix
    if isinstance(t, (Num, ANum)):
        return str(t.value) + suffix
    if t.args and t.functor in _INFIX:
        prec = _INFIX[t.functor]
        parts = []
        for a in t.args:
            s = _render(a, ids)
            # non-associative comparisons also parenthesise equal precedence
            if _prec(a) < prec or (prec == 300 and _prec(a) == 300):
                s = f"({s})"
            parts.append(s)
        body = f" {t.functor} ".join(parts)
        return f"({body}){suffix}" if ids else body
    if t.functor == "~" and len(t.args) == 1:
        s = _render(t.args[0], ids)
        if _prec(t.args[0]) < _PREFIX_PREC:
            s = f"({s})"
        return f"(~{s}){suffix}" if ids else f"~{s}"
    if not t.args:
        return t.functor + suffix
    args = ",".join(_render(a, ids) for a in t.args)
    return f"{t.functor}({args}){suffix}"


def pretty(t: Term | ATerm, print_ids: bool = False) -> str:
    """Concrete syntax for a term; with print_ids, nodes carry `#id` suffixes."""
    return _render(t, print_ids)
