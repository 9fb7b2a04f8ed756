import math

import numpy as np
import pytest
import torch

from nesyblend.common.errors import DimensionError
from nesyblend.common.errors import ParameterError
from nesyblend.logic.language import Atom
from nesyblend.logic.language import Constant
from nesyblend.logic.language import Language
from nesyblend.logic.language import Predicate
from nesyblend.logic.language import Rule
from nesyblend.logic.language import RuleSet
from nesyblend.logic.language import Term
from nesyblend.reasoning.graph import build_graph
from nesyblend.reasoning.grounding import ground_program
from nesyblend.reasoning.inference import default_steps
from nesyblend.reasoning.inference import forward_chain
from nesyblend.reasoning.inference import forward_reason
from nesyblend.reasoning.inference import reason_gradients
from nesyblend.reasoning.inference import softor


def random_program(rng):
    """Function-free program with at most 6 predicates, 8 constants and 10 rules."""
    constants = [Constant("img", "image")]
    constants += [Constant(f"a{i}", "a") for i in range(rng.integers(1, 5))]
    constants += [Constant(f"b{i}", "b") for i in range(rng.integers(1, 4))]
    predicates = [Predicate(f"act{i}", 1, ("image", ), "action") for i in range(2)]
    for k in range(rng.integers(1, 5)):
        arity = int(rng.integers(1, 3))
        arg_types = tuple(str(t) for t in rng.choice(["a", "b"], size=arity))
        predicates.append(Predicate(f"s{k}", arity, arg_types, "state"))
    lang = Language(("image", "a", "b"), tuple(constants), tuple(predicates))

    state = predicates[2:]
    rules = []
    for _ in range(rng.integers(1, 11)):
        head = Atom(predicates[int(rng.integers(2))], (Term("X"), ))
        body = []
        for _ in range(rng.integers(1, 4)):
            pred = state[int(rng.integers(len(state)))]
            args = tuple(Term(f"{t.upper()}{rng.integers(2)}") for t in pred.arg_types)
            body.append(Atom(pred, args))
        rules.append(Rule(1.0, head, tuple(body)))
    return RuleSet(lang, tuple(rules))


class TestSoftor:
    def test_single_input(self):
        assert float(softor([0.7])) == pytest.approx(0.7, abs=1e-12)

    def test_two_zeros(self):
        assert float(softor([0.0, 0.0])) == pytest.approx(0.01 * math.log(2), abs=1e-12)

    def test_dominant_input(self):
        assert float(softor([0.27, 0.0])) == pytest.approx(0.27, abs=1e-9)

    @pytest.mark.parametrize("gamma", [0.0, -0.1])
    def test_gamma_domain(self, gamma):
        with pytest.raises(ParameterError):
            softor([0.1, 0.2], gamma=gamma)


class TestForwardReason:
    def test_ladder_example(self, ladder_graph, ladder_program, ladder_state):
        out = forward_reason(ladder_graph, ladder_state, torch.ones(3, dtype=torch.float64), steps=1)
        gp = ladder_program
        assert float(out[gp.atom_index("up", ("img", ))]) == pytest.approx(0.27, abs=1e-2)
        assert float(out[gp.atom_index("right", ("img", ))]) == pytest.approx(0.72, abs=1e-2)

    def test_mirrored_ladder_example(self, ladder_graph, ladder_program, ladder_state):
        gp = ladder_program
        x0 = ladder_state.clone()
        x0[gp.atom_index("right_of", ("player", "ladder1"))] = 0.8
        x0[gp.atom_index("left_of", ("player", "ladder1"))] = 0.0
        out = forward_reason(ladder_graph, x0, torch.ones(3, dtype=torch.float64), steps=1)
        assert float(out[gp.atom_index("left", ("img", ))]) == pytest.approx(0.72, abs=1e-2)
        assert float(out[gp.atom_index("right", ("img", ))]) < 0.01

    def test_state_atoms_pass_through(self, ladder_graph, ladder_program, ladder_state):
        out = forward_reason(ladder_graph, ladder_state, torch.ones(3, dtype=torch.float64), steps=3)
        idx = ladder_program.atom_index("same_floor", ("player", "ladder1"))
        assert float(out[idx]) == pytest.approx(0.9, abs=1e-12)

    def test_all_zero_input(self, ladder_graph, ladder_program):
        x0 = torch.zeros(ladder_program.num_atoms, dtype=torch.float64)
        out = forward_reason(ladder_graph, x0, torch.ones(3, dtype=torch.float64), steps=1)
        assert float(out.max()) <= 0.01 * math.log(3) + 1e-12

    def test_batched(self, ladder_graph, ladder_state):
        weights = torch.tensor([0.9, 0.5, 0.2], dtype=torch.float64)
        batch = torch.stack([ladder_state, ladder_state.flip(0)])
        out = forward_reason(ladder_graph, batch, weights, steps=2)
        for b in range(2):
            assert torch.allclose(out[b], forward_reason(ladder_graph, batch[b], weights, steps=2))

    def test_deterministic(self, ladder_graph, ladder_state):
        weights = torch.tensor([0.9, 0.5, 0.2], dtype=torch.float64)
        first = forward_reason(ladder_graph, ladder_state, weights, steps=4)
        assert torch.equal(first, forward_reason(ladder_graph, ladder_state, weights, steps=4))

    def test_monotone_in_inputs(self):
        rng = np.random.default_rng(2)
        for _ in range(50):
            rules = random_program(rng)
            gp = ground_program(rules)
            graph = build_graph(gp)
            weights = torch.tensor(rng.uniform(0.0, 1.0, len(rules)))
            x0 = torch.tensor(rng.uniform(0.0, 1.0, gp.num_atoms))
            raised = x0.clone()
            i = int(rng.integers(gp.num_atoms))
            raised[i] = min(1.0, float(raised[i]) + float(rng.uniform(0.05, 0.5)))
            steps = default_steps(rules)
            before = forward_reason(graph, x0, weights, steps=steps)
            after = forward_reason(graph, raised, weights, steps=steps)
            assert torch.all(after >= before - 1e-12)

    def test_atom_count_mismatch(self, ladder_graph):
        with pytest.raises(DimensionError):
            forward_reason(ladder_graph, torch.zeros(5), torch.ones(3))

    def test_weight_count_mismatch(self, ladder_graph):
        with pytest.raises(DimensionError):
            forward_reason(ladder_graph, torch.zeros(7), torch.ones(2))

    def test_return_conjunctions(self, ladder_graph, ladder_state):
        _, conj = forward_reason(ladder_graph, ladder_state, torch.ones(3, dtype=torch.float64), return_conj=True)
        assert conj.shape == (3, )
        assert float(conj[0]) == pytest.approx(0.27, abs=1e-6)

    def test_default_steps(self, ladder_rules):
        # up, right, left, on_ladder, same_floor, left_of, right_of
        assert default_steps(ladder_rules) == 8


class TestHardLogic:
    def test_matches_forward_chaining(self):
        rng = np.random.default_rng(0)
        for _ in range(100):
            rules = random_program(rng)
            gp = ground_program(rules)
            graph = build_graph(gp)
            state_atoms = [i for i in range(gp.num_atoms) if gp.kind_of(i) == "state"]
            facts = {i for i in state_atoms if rng.random() < 0.5}

            x0 = torch.zeros(gp.num_atoms, dtype=torch.float64)
            x0[sorted(facts)] = 1.0
            weights = torch.ones(len(rules), dtype=torch.float64)
            out = forward_reason(graph, x0, weights, steps=default_steps(rules), gamma=1e-3)

            soft = {i for i in range(gp.num_atoms) if float(out[i]) > 0.5}
            assert soft == forward_chain(gp, facts)


class TestGradients:
    def test_ladder_partial(self, ladder_graph, ladder_program, ladder_state):
        _, jac_x = reason_gradients(ladder_graph, ladder_state, torch.ones(3, dtype=torch.float64))
        gp = ladder_program
        up = gp.atom_index("up", ("img", ))
        on_ladder = gp.atom_index("on_ladder", ("player", "ladder1"))
        assert float(jac_x[up, on_ladder]) == pytest.approx(0.9, abs=1e-3)

    def test_zero_weight_blocks_body(self, ladder_graph, ladder_program, ladder_state):
        weights = torch.tensor([0.0, 1.0, 1.0], dtype=torch.float64)
        _, jac_x = reason_gradients(ladder_graph, ladder_state, weights)
        gp = ladder_program
        up = gp.atom_index("up", ("img", ))
        for name in ("on_ladder", "same_floor"):
            assert float(jac_x[up, gp.atom_index(name, ("player", "ladder1"))]) == 0.0

    def test_finite_differences(self):
        rng = np.random.default_rng(1)
        for _ in range(50):
            rules = random_program(rng)
            gp = ground_program(rules)
            graph = build_graph(gp)
            x0 = torch.tensor(rng.uniform(0.1, 0.9, gp.num_atoms), requires_grad=True)
            weights = torch.tensor(rng.uniform(0.1, 0.9, len(rules)), requires_grad=True)
            assert torch.autograd.gradcheck(
                lambda x, w: forward_reason(graph, x, w, steps=2),
                (x0, weights),
                eps=1e-6,
                atol=1e-6,
                rtol=1e-3,
            )
