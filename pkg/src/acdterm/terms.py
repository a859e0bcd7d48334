"""Term representation: plain terms, annotated terms, positions, AC canonical
forms and conjunctive contexts.

Terms are immutable. Operators in AC_FUNCTORS are kept flattened: an AC node
never has a direct child with the same functor and always has at least two
children. Annotated terms mirror plain terms but carry one integer identifier
per node; identifiers within a goal are pairwise distinct.
"""

from __future__ import annotations

from dataclasses import dataclass


class PositionError(ValueError):
    """Raised when a position does not address a subterm."""


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Num:
    value: int


@dataclass(frozen=True)
class App:
    functor: str
    args: tuple["Term", ...] = ()


Term = Var | Num | App

AND = "/\\"
OR = "\\/"
AC_FUNCTORS = frozenset({AND, OR, "+", "*"})

TRUE = App("true")
FALSE = App("false")


def app(functor: str, args=()) -> Term:
    """Build a compound term, flattening AC operators.

    For an AC functor, children with the same functor are spliced in and a
    single-child node collapses to that child.
    """
    if not functor:
        raise ValueError("empty functor")
    args = tuple(args)
    if functor in AC_FUNCTORS:
        flat: list[Term] = []
        stack = list(reversed(args))
        while stack:
            a = stack.pop()
            if isinstance(a, App) and a.functor == functor:
                stack.extend(reversed(a.args))
            else:
                flat.append(a)
        if not flat:
            raise ValueError(f"AC operator {functor!r} needs at least one operand")
        if len(flat) == 1:
            return flat[0]
        return App(functor, tuple(flat))
    return App(functor, args)


def conj(args) -> Term:
    """Conjunction of terms; empty conjunction is true."""
    args = tuple(args)
    if not args:
        return TRUE
    return app(AND, args)


# --- annotated terms -------------------------------------------------------


@dataclass(frozen=True)
class AVar:
    name: str
    id: int


@dataclass(frozen=True)
class ANum:
    value: int
    id: int


@dataclass(frozen=True)
class AApp:
    functor: str
    args: tuple["ATerm", ...]
    id: int


ATerm = AVar | ANum | AApp


def aapp(functor: str, args, id: int) -> ATerm:
    """Annotated compound with AC flattening (the node id is kept)."""
    args = tuple(args)
    if functor in AC_FUNCTORS:
        flat: list[ATerm] = []
        stack = list(reversed(args))
        while stack:
            a = stack.pop()
            if isinstance(a, AApp) and a.functor == functor:
                stack.extend(reversed(a.args))
            else:
                flat.append(a)
        if not flat:
            raise ValueError(f"AC operator {functor!r} needs at least one operand")
        if len(flat) == 1:
            return flat[0]
        return AApp(functor, tuple(flat), id)
    return AApp(functor, args, id)


def strip(t: ATerm) -> Term:
    """Drop identifiers, returning the plain term."""
    if isinstance(t, AVar):
        return Var(t.name)
    if isinstance(t, ANum):
        return Num(t.value)
    return App(t.functor, tuple(strip(a) for a in t.args))


def ids_of(t: ATerm) -> frozenset[int]:
    """All identifiers occurring in an annotated term."""
    out: set[int] = set()
    stack = [t]
    while stack:
        node = stack.pop()
        out.add(node.id)
        if isinstance(node, AApp):
            stack.extend(node.args)
    return frozenset(out)


def annotate(used, t: Term) -> ATerm:
    """Annotate every node of t with a fresh identifier not in `used`.

    `used` may be a collection of identifiers or an integer high-water mark;
    fresh identifiers are allocated in ascending postorder.
    """
    if isinstance(used, int):
        start = used
    else:
        start = max(used, default=-1) + 1
    result, _ = annotate_from(t, start)
    return result


def annotate_from(t: Term, next_id: int) -> tuple[ATerm, int]:
    """Annotate t with identifiers next_id, next_id+1, ... in postorder."""
    if isinstance(t, Var):
        return AVar(t.name, next_id), next_id + 1
    if isinstance(t, Num):
        return ANum(t.value, next_id), next_id + 1
    args = []
    for a in t.args:
        aa, next_id = annotate_from(a, next_id)
        args.append(aa)
    return AApp(t.functor, tuple(args), next_id), next_id + 1


# --- positions -------------------------------------------------------------

Position = tuple[int, ...]


def _children(t):
    if isinstance(t, (App, AApp)):
        return t.args
    return ()


def subterm_at(t, p: Position):
    """Subterm at position p (1-based child indices; () is the whole term)."""
    cur = t
    for i in p:
        args = _children(cur)
        if not 1 <= i <= len(args):
            raise PositionError(f"invalid position index {i} (node has {len(args)} children)")
        cur = args[i - 1]
    return cur


def replace_at(t, s, p: Position):
    """Replace the subterm of t at position p with s.

    Ancestor nodes keep their identity (and identifiers, when annotated);
    AC nodes are re-flattened when the replacement shares their functor.
    """
    if not p:
        return s
    i = p[0]
    args = _children(t)
    if not 1 <= i <= len(args):
        raise PositionError(f"invalid position index {i} (node has {len(args)} children)")
    new_args = list(args)
    new_args[i - 1] = replace_at(args[i - 1], s, p[1:])
    if isinstance(t, AApp):
        return aapp(t.functor, new_args, t.id)
    return app(t.functor, new_args)


def positions(t) -> list[Position]:
    """All positions of t in preorder; () is always first."""
    out: list[Position] = []

    def walk(node, path: Position):
        out.append(path)
        for i, a in enumerate(_children(node), start=1):
            walk(a, path + (i,))

    walk(t, ())
    return out


def vars_of(t) -> frozenset[str]:
    """Names of all variables occurring in a term (plain or annotated)."""
    out: set[str] = set()
    stack = [t]
    while stack:
        node = stack.pop()
        if isinstance(node, (Var, AVar)):
            out.add(node.name)
        else:
            stack.extend(_children(node))
    return frozenset(out)


def size(t) -> int:
    """Number of symbols, counted on the unflattened binary AC form.

    An n-ary AC node contributes n-1 binary operator symbols.
    """
    if isinstance(t, (Var, AVar, Num, ANum)):
        return 1
    n = sum(size(a) for a in t.args)
    if t.functor in AC_FUNCTORS:
        return n + len(t.args) - 1
    return n + 1


# --- AC canonical form -----------------------------------------------------


def _order_key(t: Term):
    if isinstance(t, Var):
        return (0, t.name)
    if isinstance(t, Num):
        return (1, t.value)
    return (2, t.functor, len(t.args), tuple(_order_key(a) for a in t.args))


def canonical(t: Term) -> Term:
    """Canonical representative of t's AC congruence class.

    AC nodes are flattened (tolerating non-flattened input) and their
    children sorted by a total order on terms; two terms are AC-equal iff
    their canonical forms are structurally equal.
    """
    if isinstance(t, (Var, Num)):
        return t
    args = tuple(canonical(a) for a in t.args)
    if t.functor in AC_FUNCTORS:
        flat: list[Term] = []
        for a in args:
            if isinstance(a, App) and a.functor == t.functor:
                flat.extend(a.args)
            else:
                flat.append(a)
        return App(t.functor, tuple(sorted(flat, key=_order_key)))
    return App(t.functor, args)


def ac_equal(t1, t2) -> bool:
    """Equality modulo associativity and commutativity of the AC operators.

    Annotated arguments are compared on their stripped terms.
    """
    if isinstance(t1, (AVar, ANum, AApp)):
        t1 = strip(t1)
    if isinstance(t2, (AVar, ANum, AApp)):
        t2 = strip(t2)
    return canonical(t1) == canonical(t2)


# --- conjunctive context ---------------------------------------------------


def conjunctive_context(g, p: Position) -> tuple:
    """Conjuncts alongside position p, as a tuple (multiset) of subterms.

    Descending through a conjunction adds all sibling conjuncts; any other
    functor passes the context through unchanged. The empty context (at the
    root, or under non-conjunctive functors only) is the empty tuple.
    """
    out = []
    cur = g
    for i in p:
        args = _children(cur)
        if not 1 <= i <= len(args):
            raise PositionError(f"invalid position index {i} (node has {len(args)} children)")
        functor = cur.functor if isinstance(cur, (App, AApp)) else None
        if functor == AND:
            out.extend(a for j, a in enumerate(args, start=1) if j != i)
        cur = args[i - 1]
    return tuple(out)
