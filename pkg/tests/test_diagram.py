"""Diagram construction, composition, variants, validation, file format."""

import cmath
import json
import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zxexact.cyclotomic import CycloScalar
from zxexact.diagram import (
    Diagram, DiagramError, PiRational, X, Z,
    diagram_from_json, diagram_to_json, hbox, make_generator, make_spider,
    scale_angles, sequential_compose, tensor_product, transform_variant,
    validate_diagram, xspider, zspider,
)
from zxexact.interpret import interpret, matrix_compare

from helpers import random_diagram


# -- angles ------------------------------------------------------------------

@given(st.integers(-40, 40), st.integers(1, 24))
@settings(max_examples=80, deadline=None)
def test_pi_rational_normalization(num, den):
    p = PiRational(num, den)
    assert 1 <= p.den
    assert 0 <= p.num / p.den < 2
    assert math.gcd(p.num, p.den) == 1
    assert abs(cmath.exp(1j * p.radians) - cmath.exp(1j * math.pi * num / den)) < 1e-9


def test_pi_rational_parse_and_arith():
    assert PiRational.parse("1/4") == PiRational(1, 4)
    assert PiRational.parse("3") == PiRational(3, 1) == PiRational(1)
    assert PiRational(1, 4) + PiRational(7, 4) == PiRational(0)
    assert -PiRational(1, 4) == PiRational(7, 4)
    with pytest.raises(DiagramError):
        PiRational(1, 0)


# -- generators ---------------------------------------------------------------

def test_make_spider_closed_node():
    d = make_spider(Z, PiRational(1, 4), 0, 0)
    assert len(d.nodes) == 1 and not d.edges and not d.inputs and not d.outputs


def test_make_spider_wire_counts():
    d = make_spider(Z, PiRational(0), 1, 1)
    assert d.n_inputs == d.n_outputs == 1 and len(d.edges) == 2
    d = make_spider(X, PiRational(1), 2, 1)
    assert d.n_inputs == 2 and d.n_outputs == 1 and len(d.edges) == 3
    with pytest.raises(DiagramError):
        make_spider(Z, PiRational(0), -1, 0)
    with pytest.raises(DiagramError):
        make_spider("H", PiRational(0), 1, 1)


def test_make_generator_shapes():
    iden = make_generator("identity")
    assert iden.edges == [("i0", "o0")]
    cup = make_generator("cup")
    assert cup.n_inputs == 2 and cup.n_outputs == 0 and len(cup.edges) == 1
    hb = make_generator("hbox")
    assert hb.nodes["h0"].kind == "H" and hb.degree("h0") == 2
    assert make_generator("empty").all_ids() == set()
    with pytest.raises(DiagramError):
        make_generator("nope")


# -- composition ---------------------------------------------------------------

def test_tensor_unit():
    d = make_spider(Z, PiRational(1, 4), 1, 2)
    t = tensor_product(make_generator("empty"), d)
    assert matrix_compare(interpret(t), interpret(d)).equal


def test_tensor_parallel_wires():
    t = tensor_product(make_generator("identity"), make_generator("identity"))
    assert t.n_inputs == t.n_outputs == 2 and len(t.edges) == 2


def test_tensor_closed_scalars_multiply():
    alpha, beta = PiRational(1, 4), PiRational(5, 4)
    t = tensor_product(make_spider(Z, alpha, 0, 0), make_spider(X, beta, 0, 0))
    got = interpret(t, backend="float").scalar()
    want = (1 + cmath.exp(1j * alpha.radians)) * (1 + cmath.exp(1j * beta.radians))
    assert abs(got - want) < 1e-9


def test_sequential_identity_unit():
    d = make_spider(X, PiRational(3, 4), 2, 1)
    c = sequential_compose(make_generator("identity"), d)
    assert matrix_compare(interpret(c), interpret(d)).equal


def test_sequential_circle_is_two():
    circ = sequential_compose(make_generator("cup"), make_generator("cap"))
    assert interpret(circ).scalar() == CycloScalar.from_rational(2, 8)


def test_sequential_hadamard_squared():
    hh = sequential_compose(make_generator("hbox"), make_generator("hbox"))
    m = interpret(hh)
    iden = interpret(make_generator("identity"))
    assert matrix_compare(m, iden).equal


def test_sequential_arity_mismatch():
    with pytest.raises(DiagramError):
        sequential_compose(make_generator("cup"), make_generator("cup"))


def test_composition_functoriality_random():
    rng = random.Random(3)
    for _ in range(40):
        d1 = random_diagram(rng, max_nodes=5)
        d2 = random_diagram(rng, max_nodes=5, n_inputs=d1.n_outputs)
        m1, m2 = interpret(d1), interpret(d2)
        assert matrix_compare(interpret(sequential_compose(d2, d1)), m2.matmul(m1)).equal
        assert matrix_compare(interpret(tensor_product(d1, d2)), m1.kron(m2)).equal


# -- structural functors --------------------------------------------------------

def test_transform_variant_examples():
    d = make_spider(Z, PiRational(1, 4), 1, 2)
    sw = transform_variant(d, color_swap=True)
    assert all(k.kind == X for k in sw.nodes.values())
    assert sw.nodes["s0"].phase == PiRational(1, 4)
    cup, cap = make_generator("cup"), make_generator("cap")
    flipped = transform_variant(cup, vertical_flip=True)
    assert (flipped.n_inputs, flipped.n_outputs) == (0, 2)
    assert matrix_compare(interpret(flipped), interpret(cap)).equal


def test_transform_variant_involution_and_commutation():
    rng = random.Random(5)
    for _ in range(20):
        d = random_diagram(rng, max_nodes=4)
        for swap, flip in ((True, False), (False, True)):
            twice = transform_variant(transform_variant(d, swap, flip), swap, flip)
            assert twice.nodes == d.nodes and sorted(twice.edges) == sorted(d.edges)
            assert twice.inputs == d.inputs and twice.outputs == d.outputs
        ab = transform_variant(transform_variant(d, True, False), False, True)
        ba = transform_variant(transform_variant(d, False, True), True, False)
        assert ab == ba


def test_scale_angles_examples():
    d = make_spider(Z, PiRational(1, 4), 0, 0)
    assert scale_angles(d, 9).nodes["s0"].phase == PiRational(1, 4)
    d = make_spider(Z, PiRational(1, 3), 0, 0)
    assert scale_angles(d, 9).nodes["s0"].phase == PiRational(1)
    d = make_spider(Z, PiRational(1, 2), 0, 0)
    assert scale_angles(d, 9).nodes["s0"].phase == PiRational(1, 2)
    with pytest.raises(DiagramError):
        scale_angles(d, 0)


def test_scale_angles_composes():
    rng = random.Random(9)
    for _ in range(20):
        d = random_diagram(rng, max_nodes=4, with_h=False)
        a, b = rng.randint(1, 6), rng.randint(1, 6)
        lhs = scale_angles(scale_angles(d, a), b)
        rhs = scale_angles(d, a * b)
        assert lhs.nodes == rhs.nodes


def test_scale_angles_float_phase():
    d = Diagram()
    d.nodes["n"] = zspider(0.9)
    out = scale_angles(d, 8)
    assert abs(out.nodes["n"].phase - (7.2 % (2 * math.pi))) < 1e-12


# -- validation -----------------------------------------------------------------

def test_validate_ok():
    from zxexact.rules import instantiate
    assert validate_diagram(instantiate("B2", {}).lhs) == []


def test_validate_hbox_degree():
    d = Diagram()
    d.nodes["h"] = hbox()
    d.outputs = ("o0", "o1", "o2")
    for p in d.outputs:
        d.add_edge("h", p)
    codes = [v.code for v in validate_diagram(d)]
    assert "HBox degree" in codes


def test_validate_orphan_and_dangling():
    d = Diagram()
    d.nodes["z"] = zspider(PiRational(0))
    d.add_edge("z", "ghost")
    d.inputs = ("i0",)
    codes = [v.code for v in validate_diagram(d)]
    assert "orphan endpoint" in codes and "dangling port" in codes


def test_validate_hbox_self_loop():
    d = Diagram()
    d.nodes["h"] = hbox()
    d.add_edge("h", "h")
    codes = [v.code for v in validate_diagram(d)]
    assert "HBox self-loop" in codes


# -- wire bending (yanking) -------------------------------------------------------

def _yank_left():
    iden = make_generator("identity")
    cup, cap = make_generator("cup"), make_generator("cap")
    return sequential_compose(tensor_product(cup, iden), tensor_product(iden, cap))


def _yank_right():
    iden = make_generator("identity")
    cup, cap = make_generator("cup"), make_generator("cap")
    return sequential_compose(tensor_product(iden, cup), tensor_product(cap, iden))


def test_yanking_instances():
    iden_m = interpret(make_generator("identity"))
    assert matrix_compare(interpret(_yank_left()), iden_m).equal
    assert matrix_compare(interpret(_yank_right()), iden_m).equal
    cup, cap, swap = (make_generator(n) for n in ("cup", "cap", "swap"))
    assert matrix_compare(interpret(sequential_compose(cup, swap)), interpret(cup)).equal
    assert matrix_compare(interpret(sequential_compose(swap, cap)), interpret(cap)).equal
    # bending one leg of a spider turns an input into an output
    spider21 = make_spider(Z, PiRational(1, 4), 2, 1)
    iden = make_generator("identity")
    bent = sequential_compose(tensor_product(spider21, iden),
                              tensor_product(iden, make_generator("cap")))
    target = make_spider(Z, PiRational(1, 4), 1, 2)
    assert matrix_compare(interpret(bent), interpret(target)).equal


# -- file format ------------------------------------------------------------------

def test_json_round_trip():
    d = Diagram()
    d.nodes["n1"] = zspider(PiRational(1, 4))
    d.nodes["n2"] = xspider(0.9553166)
    d.nodes["n3"] = hbox()
    d.inputs, d.outputs = ("i0",), ("o0",)
    d.add_edge("i0", "n1")
    d.add_edge("n1", "n2")
    d.add_edge("n1", "n2")   # parallel wire
    d.add_edge("n1", "n1")   # self-loop
    d.add_edge("n2", "n3")
    d.add_edge("n3", "o0")
    obj = diagram_to_json(d)
    back = diagram_from_json(json.loads(json.dumps(obj)))
    assert back.nodes == d.nodes
    assert sorted(back.edges) == sorted(d.edges)
    assert back.inputs == d.inputs and back.outputs == d.outputs


def test_json_accepts_spec_shapes():
    obj = {
        "inputs": ["i0"], "outputs": ["o0"],
        "nodes": [{"id": "n1", "kind": "Z", "phase": "1/4"},
                  {"id": "n2", "kind": "X", "phase": {"float": 0.9553166}},
                  {"id": "n3", "kind": "H"}],
        "edges": [["n1", "n2"], ["i0", "n1"], ["n1", "n1"], ["n2", "n3"], ["n3", "o0"]],
    }
    d = diagram_from_json(obj)
    assert d.nodes["n1"].phase == PiRational(1, 4)
    assert d.nodes["n3"].kind == "H"
    assert d.edge_multiplicity("n1", "n1") == 1


def test_json_malformed():
    with pytest.raises(DiagramError):
        diagram_from_json({"nodes": [{"kind": "Z"}]})
    with pytest.raises(DiagramError):
        diagram_from_json({"edges": [["a", "b", "c"]]})
