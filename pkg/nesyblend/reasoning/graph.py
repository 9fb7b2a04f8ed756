"""
Module comprising the bipartite forward-reasoning graph.

Atom nodes carry ground-atom values, conjunction nodes carry ground-rule
bodies. Edges are kept as index lists, so memory grows with the number of
ground atoms plus the number of body and head links.

@date: Oct 2026
"""

__all__ = [
    "ReasoningGraph",
    "build_graph",
    "dump_graph",
]

import dataclasses

import torch


@dataclasses.dataclass(frozen=True, eq=False)
class ReasoningGraph:
    num_atoms: int
    num_rules: int
    atom_to_conj: torch.Tensor  # (2, E) rows: atom index, conj index
    conj_to_atom: torch.Tensor  # (2, C) rows: conj index, head atom index
    conj_rule: torch.Tensor  # (C,) source rule of each conj -> atom edge
    body_index: torch.Tensor  # (C, max body) padded with num_atoms

    @property
    def num_conj(self):
        return self.conj_to_atom.shape[1]

    @property
    def num_nodes(self):
        return self.num_atoms + self.num_conj

    @property
    def num_edges(self):
        return self.atom_to_conj.shape[1] + self.conj_to_atom.shape[1]

    @property
    def heads(self):
        return self.conj_to_atom[1]


def build_graph(gp):
    """Build the reasoning graph of a ground program."""
    a2c_atoms, a2c_conj = [], []
    heads, rule_of = [], []
    for j, gr in enumerate(gp.ground_rules):
        for i in gr.body:
            a2c_atoms.append(i)
            a2c_conj.append(j)
        heads.append(gr.head)
        rule_of.append(gr.rule)

    num_conj = len(gp.ground_rules)
    width = max((len(gr.body) for gr in gp.ground_rules), default=1)
    body_index = torch.full((num_conj, width), gp.num_atoms, dtype=torch.long)
    for j, gr in enumerate(gp.ground_rules):
        body_index[j, :len(gr.body)] = torch.tensor(gr.body, dtype=torch.long)

    return ReasoningGraph(
        num_atoms=gp.num_atoms,
        num_rules=len(gp.rules.rules),
        atom_to_conj=torch.tensor([a2c_atoms, a2c_conj], dtype=torch.long).reshape(2, -1),
        conj_to_atom=torch.tensor([list(range(num_conj)), heads], dtype=torch.long).reshape(2, -1),
        conj_rule=torch.tensor(rule_of, dtype=torch.long),
        body_index=body_index,
    )


def dump_graph(graph, gp=None):
    """Line-oriented text dump, one node or edge per line."""
    lines = []
    for i in range(graph.num_atoms):
        label = gp.atom_text(i) if gp is not None else ""
        lines.append(f"atom {i} {label}".rstrip())
    for j in range(graph.num_conj):
        lines.append(f"conj {j} rule={int(graph.conj_rule[j])}")
    for i, j in graph.atom_to_conj.t().tolist():
        lines.append(f"edge atom->conj {i} {j}")
    for (j, i), k in zip(graph.conj_to_atom.t().tolist(), graph.conj_rule.tolist()):
        lines.append(f"edge conj->atom {j} {i} rule={k}")
    return "\n".join(lines) + "\n"
