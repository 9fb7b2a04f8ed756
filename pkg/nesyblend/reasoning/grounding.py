"""
Module comprising the grounding of rule sets over typed constants.

@date: Oct 2026
"""

__all__ = [
    "GroundRule",
    "GroundProgram",
    "ground_program",
    "ground_atoms",
]

import dataclasses
import itertools
from typing import Dict
from typing import Tuple

from ..common.errors import GroundingError
from ..logic.language import RuleSet


@dataclasses.dataclass(frozen=True)
class GroundRule:
    rule: int  # index of the source rule
    head: int
    body: Tuple[int, ...]


@dataclasses.dataclass(frozen=True)
class GroundProgram:
    """Indexed ground atoms plus the ground rules referring into them."""

    rules: RuleSet
    atoms: Tuple[Tuple[str, Tuple[str, ...]], ...]
    ground_rules: Tuple[GroundRule, ...]
    index: Dict[Tuple[str, Tuple[str, ...]], int] = dataclasses.field(compare=False, repr=False)

    @property
    def num_atoms(self):
        return len(self.atoms)

    @property
    def language(self):
        return self.rules.language

    def atom_index(self, predicate, args):
        return self.index[(predicate, tuple(args))]

    def atoms_of(self, predicate):
        """Indices of the ground atoms of a predicate, in atom order."""
        return [i for i, (name, _) in enumerate(self.atoms) if name == predicate]

    def kind_of(self, idx):
        return self.language.predicate(self.atoms[idx][0]).kind

    def atom_text(self, idx):
        name, args = self.atoms[idx]
        return f"{name}({','.join(args)})"

    def rule_text(self, ground_rule, weight=None):
        body = ",".join(self.atom_text(i) for i in ground_rule.body)
        weight = self.rules.rules[ground_rule.rule].weight if weight is None else weight
        return f"{weight:.4f} {self.atom_text(ground_rule.head)}:-{body}."


def ground_atoms(lang):
    """All type-valid ground atoms, by predicate declaration then constant order."""
    atoms = []
    for pred in lang.predicates:
        domains = [lang.constants_of(t) for t in pred.arg_types]
        for args in itertools.product(*domains):
            atoms.append((pred.name, tuple(args)))
    return atoms


def ground_program(rules):
    """
    Ground every rule with all type-valid substitutions.

    Ground rules are ordered by source rule index, then by the substitution
    enumerated over variables in first-appearance order with constants in
    declaration order. Repeated body atoms of one ground rule are merged.
    """
    lang = rules.language
    atoms = ground_atoms(lang)
    index = {atom: i for i, atom in enumerate(atoms)}

    ground_rules = []
    for ri, rule in enumerate(rules.rules):
        variables = rule.variables()
        var_types = rule.variable_types()
        domains = []
        for var in variables:
            domain = lang.constants_of(var_types[var])
            if not domain:
                raise GroundingError(
                    f"variable {var!r} of rule {ri} has type {var_types[var]!r} with no constants"
                )
            domains.append(domain)

        for combo in itertools.product(*domains):
            theta = dict(zip(variables, combo))

            def subst(atom):
                args = tuple(theta[t.name] if t.is_var else t.name for t in atom.args)
                return index[(atom.predicate.name, args)]

            body = []
            for atom in rule.body:
                idx = subst(atom)
                if idx not in body:
                    body.append(idx)
            ground_rules.append(GroundRule(ri, subst(rule.head), tuple(body)))

    return GroundProgram(rules, tuple(atoms), tuple(ground_rules), index)
