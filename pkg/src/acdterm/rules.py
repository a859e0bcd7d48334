"""Rule and program types."""

from __future__ import annotations

from dataclasses import dataclass, field

from .terms import TRUE, Term, vars_of

SIMPLIFICATION = "simplification"
PROPAGATION = "propagation"
SIMPAGATION = "simpagation"


@dataclass(frozen=True)
class Rule:
    name: str
    kind: str  # simplification | propagation | simpagation
    head: Term
    body: Term
    guard: Term = TRUE
    cc_head: Term | None = None

    def __post_init__(self):
        if (self.cc_head is not None) != (self.kind == SIMPAGATION):
            raise ValueError("cc_head is present exactly for simpagation rules")
        scope = vars_of(self.head)
        if self.cc_head is not None:
            scope |= vars_of(self.cc_head)
        loose = vars_of(self.guard) - scope
        if loose:
            name = sorted(loose)[0]
            raise ValueError(f"guard variable {name} does not occur in the rule head")


@dataclass(frozen=True)
class Program:
    rules: tuple[Rule, ...] = field(default=())

    def __post_init__(self):
        seen: set[str] = set()
        for r in self.rules:
            if r.name in seen:
                raise ValueError(f"duplicate rule name {r.name}")
            seen.add(r.name)

    def __iter__(self):
        return iter(self.rules)

    def __len__(self):
        return len(self.rules)
