"""
Module comprising the symbols of the typed first-order language.

@date: Oct 2026
"""

__all__ = [
    "Predicate",
    "Constant",
    "Language",
    "Term",
    "Atom",
    "Rule",
    "RuleSet",
    "KINDS",
    "STATE_VARIABLE",
    "BLEND_PREDICATES",
    "BLEND_ALIASES",
]

import dataclasses
from typing import Tuple

KINDS = ("action", "state", "blend")
STATE_VARIABLE = "X"
BLEND_PREDICATES = ("neural", "logic")
BLEND_ALIASES = {
    "neural_agent": "neural",
    "logic_agent": "logic",
}


@dataclasses.dataclass(frozen=True)
class Predicate:
    name: str
    arity: int
    arg_types: Tuple[str, ...]
    kind: str

    def __str__(self):
        return f"{self.name}/{self.arity}"


@dataclasses.dataclass(frozen=True)
class Constant:
    name: str
    type: str


@dataclasses.dataclass(frozen=True)
class Language:
    """Types, constants and predicates, all in declaration order."""

    types: Tuple[str, ...] = ()
    constants: Tuple[Constant, ...] = ()
    predicates: Tuple[Predicate, ...] = ()

    def predicate(self, name):
        for pred in self.predicates:
            if pred.name == name:
                return pred
        raise KeyError(name)

    def has_predicate(self, name):
        return any(p.name == name for p in self.predicates)

    def constant(self, name):
        for const in self.constants:
            if const.name == name:
                return const
        raise KeyError(name)

    def has_constant(self, name):
        return any(c.name == name for c in self.constants)

    def constants_of(self, type_name):
        """Names of the constants of a type, in declaration order."""
        return tuple(c.name for c in self.constants if c.type == type_name)

    def predicates_of(self, kind):
        return tuple(p for p in self.predicates if p.kind == kind)

    @property
    def action_predicates(self):
        return self.predicates_of("action")

    @property
    def state_predicates(self):
        return self.predicates_of("state")

    @property
    def blend_predicates(self):
        return self.predicates_of("blend")


@dataclasses.dataclass(frozen=True)
class Term:
    name: str

    @property
    def is_var(self):
        return self.name[0].isupper() or self.name[0] == "_"

    def __str__(self):
        return self.name


@dataclasses.dataclass(frozen=True)
class Atom:
    predicate: Predicate
    args: Tuple[Term, ...]

    @property
    def variables(self):
        return tuple(t.name for t in self.args if t.is_var)

    def __str__(self):
        return f"{self.predicate.name}({','.join(str(t) for t in self.args)})"


@dataclasses.dataclass(frozen=True)
class Rule:
    """Weighted definite clause ``weight head :- body``."""

    weight: float
    head: Atom
    body: Tuple[Atom, ...]

    @property
    def kind(self):
        return self.head.predicate.kind

    def variables(self):
        """Variables by first appearance, head first."""
        seen = []
        for atom in (self.head, ) + self.body:
            for name in atom.variables:
                if name not in seen:
                    seen.append(name)
        return tuple(seen)

    def variable_types(self):
        """Map each variable to the type given by its argument positions."""
        types = {}
        for atom in (self.head, ) + self.body:
            for term, type_name in zip(atom.args, atom.predicate.arg_types):
                if term.is_var:
                    types.setdefault(term.name, type_name)
        return types


@dataclasses.dataclass(frozen=True)
class RuleSet:
    """Language plus an ordered tuple of rules; index order is the weight order."""

    language: Language
    rules: Tuple[Rule, ...] = ()

    def __len__(self):
        return len(self.rules)

    def indices_of(self, kind):
        return tuple(i for i, r in enumerate(self.rules) if r.kind == kind)

    @property
    def action_rule_indices(self):
        return self.indices_of("action")

    @property
    def blend_rule_indices(self):
        return self.indices_of("blend")

    def with_weights(self, weights):
        """Copy with new rule weights (one float per rule)."""
        weights = [float(w) for w in weights]
        if len(weights) != len(self.rules):
            raise ValueError(f"expected {len(self.rules)} weights, got {len(weights)}")
        return RuleSet(
            self.language,
            tuple(dataclasses.replace(r, weight=w) for r, w in zip(self.rules, weights)),
        )

    def extend(self, other):
        """Concatenate the rules of another rule set over the same language."""
        if other.language != self.language:
            raise ValueError("rule sets are declared over different languages")
        return RuleSet(self.language, self.rules + other.rules)
