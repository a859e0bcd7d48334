"""Execution states, transitions, propagation histories and normalization.

A run starts from the freshly annotated goal with an empty history. Each
transition applies the textually first rule at the first redex in preorder
position order (selections and context matches enumerated deterministically),
so traces are reproducible. Simplification replaces the matched instance with
the freshly annotated body, propagation conjoins the body with the matched
instance and records a history entry, simpagation additionally requires its
context head to match within the conjunctive context of the focus.
"""

from __future__ import annotations

from dataclasses import dataclass, replace as _dc_replace
from typing import Iterator

from .matching import Redex, Subst, guard_holds, match_cc, redexes_at
from .pretty import pretty
from .rules import PROPAGATION, SIMPAGATION, Program, Rule
from .terms import (
    AC_FUNCTORS,
    AND,
    AApp,
    ATerm,
    App,
    Num,
    Position,
    Term,
    Var,
    aapp,
    annotate_from,
    app,
    conjunctive_context,
    positions,
    replace_at,
    strip,
    subterm_at,
    vars_of,
)

KIND_OF = {
    "simplification": "simplify",
    "propagation": "propagate",
    "simpagation": "simpagate",
}

NORMAL_FORM = "normal_form"
BUDGET_EXHAUSTED = "budget_exhausted"


class BudgetError(RuntimeError):
    """Raised by normalise when the step budget is exhausted."""


@dataclass(frozen=True)
class HistoryEntry:
    rule: str
    ids: tuple[int, ...]


@dataclass(frozen=True)
class EngineState:
    goal: ATerm
    history: frozenset[HistoryEntry]
    initial_vars: frozenset[str]
    next_id: int


@dataclass(frozen=True)
class TraceStep:
    index: int
    rule: str
    kind: str  # simplify | propagate | simpagate
    path: Position
    selected: tuple[int, ...] | None
    entry: tuple[int, ...] | None
    goal_after: Term


@dataclass(frozen=True)
class RunResult:
    final: EngineState
    trace: tuple[TraceStep, ...]
    status: str


# --- propagation history -----------------------------------------------------


def _entry_ids(t: ATerm) -> tuple[int, ...]:
    if isinstance(t, AApp):
        if t.functor in AC_FUNCTORS:
            return tuple(i for a in t.args for i in _entry_ids(a))
        return (t.id,) + tuple(i for a in t.args for i in _entry_ids(a))
    return (t.id,)


def entry_of(rule: str, t: ATerm) -> HistoryEntry:
    """History entry of a rule for a matched annotated instance.

    AC operator nodes contribute their children's entries in matched order
    and omit their own identifier; every other node contributes its
    identifier followed by its children's entries.
    """
    return HistoryEntry(rule, _entry_ids(t))


def _zip_ids(a: ATerm, b: ATerm, rho: dict[int, int]) -> None:
    rho[a.id] = b.id
    if (
        isinstance(a, AApp)
        and isinstance(b, AApp)
        and a.functor == b.functor
        and len(a.args) == len(b.args)
    ):
        for x, y in zip(a.args, b.args):
            _zip_ids(x, y, rho)


def update_history(
    head: Term,
    head_inst: ATerm,
    body: Term,
    body_inst: ATerm,
    h0: frozenset[HistoryEntry],
) -> frozenset[HistoryEntry]:
    """Minimal history extension for a rule application.

    For every variable occurring at position p in the head and position q in
    the body, the renaming mapping the identifiers of head_inst at p onto
    those of body_inst at q is applied to every entry mentioning a renamed
    identifier, and the renamed entry is added.
    """
    renamings: list[dict[int, int]] = []
    for p in positions(head):
        hsub = subterm_at(head, p)
        if not isinstance(hsub, Var):
            continue
        for q in positions(body):
            if subterm_at(body, q) != hsub:
                continue
            rho: dict[int, int] = {}
            _zip_ids(subterm_at(head_inst, p), subterm_at(body_inst, q), rho)
            if rho:
                renamings.append(rho)
    out = set(h0)
    for rho in renamings:
        for e in h0:
            if any(i in rho for i in e.ids):
                out.add(HistoryEntry(e.rule, tuple(rho.get(i, i) for i in e.ids)))
    return frozenset(out)


# --- rule application --------------------------------------------------------


def _instantiate(body: Term, theta: Subst, taken: set[str], freshen: bool, raw: bool = False) -> Term:
    """theta applied to a rule body as a plain term.

    Body-only variables become fresh goal variables (when freshen is set),
    with names chosen deterministically and disjoint from `taken`. With
    `raw`, AC nodes are not re-flattened, so the body's positions stay valid
    on the instance (required for aligning the history renaming).
    """
    fresh: dict[str, Term] = {}

    def walk(t: Term) -> Term:
        if isinstance(t, Var):
            bound = theta.get(t.name)
            if bound is not None:
                return strip(bound)
            if not freshen:
                return t
            if t.name not in fresh:
                k = 1
                while f"_{t.name}{k}" in taken:
                    k += 1
                name = f"_{t.name}{k}"
                taken.add(name)
                fresh[t.name] = Var(name)
            return fresh[t.name]
        if isinstance(t, Num):
            return t
        args = tuple(walk(a) for a in t.args)
        return App(t.functor, args) if raw else app(t.functor, args)

    return walk(body)


def _flatten_annotated(t: ATerm) -> ATerm:
    """Restore the flattened-AC invariant, keeping surviving identifiers."""
    if isinstance(t, AApp):
        return aapp(t.functor, tuple(_flatten_annotated(a) for a in t.args), t.id)
    return t


@dataclass(frozen=True)
class _Fired:
    replacement: ATerm
    history: frozenset[HistoryEntry]
    next_id: int
    selected: tuple[int, ...] | None
    entry: tuple[int, ...] | None


def _splice(node: ATerm, redex: Redex, replacement: ATerm) -> ATerm:
    """Swap a selection redex's children for the replacement subtree.

    The replacement takes the place of the first selected child; the
    residual children stay in place.
    """
    first = redex.selected[0]
    selected = set(redex.selected)
    new_children: list[ATerm] = []
    for i, child in enumerate(node.args, start=1):
        if i == first:
            new_children.append(replacement)
        elif i in selected:
            continue
        else:
            new_children.append(child)
    return aapp(node.functor, new_children, node.id)


def _try_rule_at(
    rule: Rule,
    node: ATerm,
    cc_thunk,
    history: frozenset[HistoryEntry],
    next_id: int,
    taken: set[str],
) -> _Fired | None:
    """First applicable redex of one rule anchored at one node, applied."""
    conjunction_node = isinstance(node, AApp) and node.functor == AND
    for redex in redexes_at(node, rule.head):
        if rule.kind == SIMPAGATION:
            # residual children sit in the focus's context only under /\
            extra = redex.residual if conjunction_node else ()
            cc_full = tuple(cc_thunk()) + tuple(extra)
            thetas: Iterator[Subst] = match_cc(rule.cc_head, cc_full, redex.theta)
        else:
            thetas = iter((redex.theta,))
        for theta in thetas:
            if not guard_holds(rule.guard, theta):
                continue
            entry = None
            if rule.kind == PROPAGATION:
                entry = entry_of(rule.name, redex.matched)
                if entry in history:
                    continue
            body_plain = _instantiate(rule.body, theta, taken, freshen=True, raw=True)
            body_raw, new_next = annotate_from(body_plain, next_id)
            new_history = update_history(rule.head, redex.matched, rule.body, body_raw, history)
            body_a = _flatten_annotated(body_raw)
            if rule.kind == PROPAGATION:
                new_history = new_history | {entry}
                replacement = aapp(AND, (redex.matched, body_a), new_next)
                new_next += 1
            else:
                replacement = body_a
            if redex.selected is None:
                repl = replacement
            else:
                repl = _splice(node, redex, replacement)
            return _Fired(
                replacement=repl,
                history=new_history,
                next_id=new_next,
                selected=redex.selected,
                entry=entry.ids if entry else None,
            )
    return None


def initial_state(goal: Term) -> EngineState:
    goal_a, next_id = annotate_from(goal, 1)
    return EngineState(goal_a, frozenset(), vars_of(goal), next_id)


def step(state: EngineState, program: Program) -> tuple[EngineState, TraceStep] | None:
    """One transition: textually first rule at its first redex, or None."""
    goal = state.goal
    taken = set(vars_of(goal))
    all_positions = positions(goal)
    for rule in program.rules:
        for path in all_positions:
            node = subterm_at(goal, path)
            fired = _try_rule_at(
                rule,
                node,
                lambda p=path: conjunctive_context(goal, p),
                state.history,
                state.next_id,
                set(taken),
            )
            if fired is None:
                continue
            new_goal = replace_at(goal, fired.replacement, path)
            new_state = EngineState(new_goal, fired.history, state.initial_vars, fired.next_id)
            ts = TraceStep(
                index=1,
                rule=rule.name,
                kind=KIND_OF[rule.kind],
                path=path,
                selected=fired.selected,
                entry=fired.entry,
                goal_after=strip(new_goal),
            )
            return new_state, ts
    return None


def run(program: Program, goal: Term, max_steps: int = 10_000) -> RunResult:
    """Rewrite a goal to a normal form, or stop after max_steps transitions."""
    state = initial_state(goal)
    trace: list[TraceStep] = []
    for k in range(max_steps):
        nxt = step(state, program)
        if nxt is None:
            return RunResult(state, tuple(trace), NORMAL_FORM)
        state, ts = nxt
        trace.append(_dc_replace(ts, index=k + 1))
    status = NORMAL_FORM if step(state, program) is None else BUDGET_EXHAUSTED
    return RunResult(state, tuple(trace), status)


# --- bottom-up normalization -------------------------------------------------


class _NormCtx:
    def __init__(self, program: Program, history, next_id: int, taken: set[str], budget: int):
        self.program = program
        self.history = frozenset(history)
        self.next_id = next_id
        self.taken = taken
        self.remaining = budget

    def fire_at(self, node: ATerm, cc: tuple[ATerm, ...]) -> ATerm | None:
        for rule in self.program.rules:
            fired = _try_rule_at(rule, node, lambda: cc, self.history, self.next_id, self.taken)
            if fired is not None:
                if self.remaining <= 0:
                    raise BudgetError("step budget exhausted during normalization")
                self.remaining -= 1
                self.history = fired.history
                self.next_id = fired.next_id
                return fired.replacement
        return None


def _norm_goal(ctx: _NormCtx, node: ATerm, cc: tuple[ATerm, ...]) -> ATerm:
    if isinstance(node, AApp) and node.functor == AND:
        children = list(node.args)
        while True:
            progressed = False
            for i in range(len(children)):
                others = tuple(c for j, c in enumerate(children) if j != i)
                new = _norm_goal(ctx, children[i], others + cc)
                if new != children[i]:
                    children[i] = new
                    progressed = True
            spliced: list[ATerm] = []
            for c in children:
                if isinstance(c, AApp) and c.functor == AND:
                    spliced.extend(c.args)
                else:
                    spliced.append(c)
            children = spliced
            if not progressed:
                break
        rebuilt = aapp(AND, children, node.id)
    elif isinstance(node, AApp):
        args = tuple(_norm_goal(ctx, a, cc) for a in node.args)
        rebuilt = aapp(node.functor, args, node.id)
    else:
        rebuilt = node
    fired = ctx.fire_at(rebuilt, cc)
    if fired is not None:
        return _norm_goal(ctx, fired, cc)
    return rebuilt


def normalise(
    program: Program,
    term: Term,
    theta: Subst | None = None,
    cc=(),
    changed: bool = False,
    state: EngineState | None = None,
    max_steps: int = 10_000,
) -> tuple[ATerm, EngineState]:
    """Normalize a term bottom-up with respect to a conjunctive context.

    A variable bound in theta is assumed to map to an already normalized
    term: it is returned as is unless `changed` signals that the context has
    changed since it was normalized, in which case it is renormalized. A
    conjunction repeatedly normalizes each conjunct with the others added to
    the context until a fixpoint, which renormalizes conjuncts whose context
    was changed by a sibling; other compounds normalize their arguments with
    the context passed through. After the children, rules are tried at the
    node (textual order, first redex) and a fired body is normalized in turn.

    `state` supplies the propagation history and identifier high-water mark;
    the returned state carries the updated history, identifier counter and
    the normalized term as its goal. Raises BudgetError after max_steps rule
    applications.
    """
    theta = theta or {}
    cc_terms: list[ATerm] = []
    next_id = state.next_id if state is not None else 1
    for c in cc:
        if isinstance(c, (Var, Num, App)):
            ca, next_id = annotate_from(c, next_id)
            cc_terms.append(ca)
        else:
            cc_terms.append(c)
    history = state.history if state is not None else frozenset()
    initial_vars = state.initial_vars if state is not None else vars_of(term)
    taken = set(vars_of(term)) | {v for c in cc_terms for v in vars_of(c)} | set(theta)
    ctx = _NormCtx(program, history, next_id, taken, max_steps)

    if isinstance(term, Var) and term.name in theta:
        binding = theta[term.name]
        result = _norm_goal(ctx, binding, tuple(cc_terms)) if changed else binding
    else:
        plain = _instantiate(term, theta, taken, freshen=False)
        ga, ctx.next_id = annotate_from(plain, ctx.next_id)
        result = _norm_goal(ctx, ga, tuple(cc_terms))
    return result, EngineState(result, ctx.history, initial_vars, ctx.next_id)


# --- trace rendering ---------------------------------------------------------


def format_step(ts: TraceStep) -> str:
    path = "[" + ",".join(str(i) for i in ts.path) + "]"
    return f"#{ts.index} {ts.kind} {ts.rule} @ {path} : {pretty(ts.goal_after)}"


def step_record(ts: TraceStep) -> dict:
    """Machine-readable trace record (fields: n, kind, rule, path, ids, goal)."""
    return {
        "n": ts.index,
        "kind": ts.kind,
        "rule": ts.rule,
        "path": list(ts.path),
        "ids": list(ts.entry) if ts.entry else [],
        "goal": pretty(ts.goal_after),
    }
