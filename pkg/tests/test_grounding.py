import pytest

from nesyblend.common.errors import GroundingError
from nesyblend.logic.language import RuleSet
from nesyblend.logic.parser import parse_language
from nesyblend.logic.parser import parse_rules
from nesyblend.reasoning.graph import build_graph
from nesyblend.reasoning.graph import dump_graph
from nesyblend.reasoning.grounding import ground_atoms
from nesyblend.reasoning.grounding import ground_program

from .conftest import LADDER_LANGUAGE
from .conftest import LADDER_RULES


def _language_with_ladders(count):
    consts = "".join(f"const ladder{i}:ladder.\n" for i in range(2, count + 1))
    return parse_language(LADDER_LANGUAGE + consts)


class TestGrounding:
    def test_ladder_program(self, ladder_program):
        heads = [ladder_program.atom_text(gr.head) for gr in ladder_program.ground_rules]
        assert heads == ["up(img)", "right(img)", "left(img)"]
        assert ladder_program.num_atoms == 7

    def test_two_ladders(self):
        lang = _language_with_ladders(2)
        gp = ground_program(parse_rules(LADDER_RULES, lang))
        assert len(gp.ground_rules) == 6
        # substitutions follow constant declaration order
        assert [gp.rule_text(gr) for gr in gp.ground_rules[:2]] == [
            "0.7300 up(img):-on_ladder(player,ladder1),same_floor(player,ladder1).",
            "0.7300 up(img):-on_ladder(player,ladder2),same_floor(player,ladder2).",
        ]

    def test_type_without_constants(self):
        lang = parse_language("type image. type player. type ladder. const img:image. const player:player.\n"
                              "pred up/1 action (image). pred on_ladder/2 state (player,ladder).")
        rules = parse_rules("up(X):-on_ladder(P,Ladder).", lang)
        with pytest.raises(GroundingError, match="'Ladder'"):
            ground_program(rules)

    def test_atoms_are_type_valid(self, ladder_lang):
        atoms = ground_atoms(ladder_lang)
        assert ("on_ladder", ("player", "ladder1")) in atoms
        assert all(args != ("ladder1", "player") for _, args in atoms)

    def test_determinism(self, ladder_rules):
        assert ground_program(ladder_rules) == ground_program(ladder_rules)


class TestGraph:
    def test_ladder_graph(self, ladder_graph):
        assert ladder_graph.num_conj == 3
        assert ladder_graph.num_atoms == 7
        assert ladder_graph.atom_to_conj.shape[1] == 6
        assert ladder_graph.conj_to_atom.shape[1] == 3

    def test_bipartite(self, ladder_graph, ladder_program):
        atoms, conj = ladder_graph.atom_to_conj
        assert int(atoms.max()) < ladder_graph.num_atoms
        assert int(conj.max()) < ladder_graph.num_conj
        for j, i in ladder_graph.conj_to_atom.t().tolist():
            assert ladder_program.kind_of(i) == "action"
            assert j < ladder_graph.num_conj

    def test_empty_rule_set(self, ladder_lang):
        graph = build_graph(ground_program(RuleSet(ladder_lang)))
        assert graph.num_nodes == 7
        assert graph.num_edges == 0

    def test_duplicated_rule(self, ladder_lang, ladder_rules):
        doubled = ladder_rules.extend(parse_rules(LADDER_RULES.strip().splitlines()[0], ladder_lang))
        graph = build_graph(ground_program(doubled))
        assert graph.num_atoms == 7
        assert graph.num_edges == 9 + 3

    @pytest.mark.parametrize("sizes", [(2, 4, 8)])
    def test_linear_scaling(self, sizes):
        footprint = []
        for count in sizes:
            lang = _language_with_ladders(count)
            graph = build_graph(ground_program(parse_rules(LADDER_RULES, lang)))
            footprint.append(graph.num_nodes + graph.num_edges)
        for small, large in zip(footprint, footprint[1:]):
            assert large / small <= 2.2

    def test_dump(self, ladder_graph, ladder_program):
        lines = dump_graph(ladder_graph, ladder_program).splitlines()
        assert lines[0] == "atom 0 up(img)"
        assert sum(line.startswith("edge") for line in lines) == ladder_graph.num_edges
