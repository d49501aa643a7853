"""Rule catalogue, instantiation, soundness sweeps, invariant preservation."""

import pytest

from zxexact.diagram import PiRational, X
from zxexact.interpret import invariant_r
from zxexact.rules import (
    DERIVED_IMPORTED, RULESETS, RuleError, RuleInstance, catalogue,
    check_soundness, get_schema, instantiate, invariant_preservation_check,
    ruleset_schemas, soundness_suite,
)


def test_catalogue_contents():
    names = {s.name for s in catalogue()}
    assert {"S1", "S2", "S3", "IV", "B1", "B2", "K1", "K2", "EU", "H", "ZO",
            "SUP", "E", "SUPn", "HL", "L51", "L52", "GB"} == names
    assert get_schema("K1").origin == "axiom-fig1"
    assert "K1" not in RULESETS["ZX_cyclo"]
    assert get_schema("SUPn").origin == "schema"
    for name in DERIVED_IMPORTED:
        assert get_schema(name).origin == "derived-imported"


def test_rulesets():
    assert "E" in RULESETS["ZX_E"] and "IV" not in RULESETS["ZX_E"]
    assert "ZO" not in RULESETS["ZX_E"]
    assert set(RULESETS["ZX"]) >= {"IV", "ZO", "SUP"}
    with pytest.raises(RuleError):
        ruleset_schemas("nope")
    with pytest.raises(RuleError):
        get_schema("nope")


def test_sup_is_supn_at_two():
    a = instantiate("SUP", {"alpha": PiRational(1, 4)})
    b = instantiate("SUPn", {"n": 2, "alpha": PiRational(1, 4)})
    assert a.lhs.nodes == b.lhs.nodes and sorted(a.lhs.edges) == sorted(b.lhs.edges)
    assert a.rhs.nodes == b.rhs.nodes and sorted(a.rhs.edges) == sorted(b.rhs.edges)


def test_e_shape():
    inst = instantiate("E", {})
    assert (inst.lhs.n_inputs, inst.lhs.n_outputs) == (0, 0)
    assert len(inst.lhs.nodes) == 2 and len(inst.lhs.edges) == 1
    assert not inst.rhs.nodes


def test_supn_instantiation_example():
    inst = instantiate("SUPn", {"n": 3, "alpha": PiRational(0)})
    phases = sorted(str(inst.lhs.nodes[f"t{k}"].phase) for k in range(3))
    assert phases == ["0/1", "2/3", "4/3"]
    assert inst.rhs.nodes["tm"].phase == PiRational(0)  # 3*0 + 2pi
    assert inst.rhs.edge_multiplicity("tm", "x") == 3


def test_s1_merged_phase():
    inst = instantiate("S1", {"alpha": PiRational(1, 4), "beta": PiRational(1, 4),
                              "wires": 2, "a_in": 1, "a_out": 0,
                              "b_in": 0, "b_out": 1})
    assert inst.rhs.nodes["m"].phase == PiRational(1, 2)
    assert check_soundness(inst).sound


def test_eu_color_swap_variant():
    inst = instantiate("EU", {}, color_swap=True)
    assert inst.lhs.nodes["h"].kind == "H"
    assert inst.rhs.nodes["zt"].kind == X
    assert check_soundness(inst).sound


def test_binding_errors():
    with pytest.raises(RuleError):
        instantiate("SUPn", {"n": 0, "alpha": PiRational(0)})
    with pytest.raises(RuleError):
        instantiate("K2", {})
    with pytest.raises(RuleError):
        instantiate("S2", {"bogus": 1})


def test_corrupted_rule_detected():
    good = instantiate("S1", {"alpha": PiRational(1, 4), "beta": PiRational(1, 2),
                              "wires": 1})
    bad_rhs = good.rhs.copy()
    from zxexact.diagram import zspider
    bad_rhs.nodes["m"] = zspider(PiRational(7, 4))  # alpha + beta + pi
    corrupted = RuleInstance("S1", good.bindings, False, False, good.lhs, bad_rhs)
    res = check_soundness(corrupted)
    assert not res.sound and res.witness is not None


def test_soundness_suite_small():
    rep = soundness_suite("ZX", max_arity=2, grid_den=2, n_random=4, seed=1)
    assert rep.all_pass and rep.entries
    keys = [(e.key, e.backend) for e in rep.entries]
    assert keys == sorted(keys)
    js = rep.to_json()
    assert js["schema"] == "1" and js["all_pass"] is True


def test_soundness_suite_deterministic():
    a = soundness_suite("ZX_E", max_arity=1, grid_den=2, n_random=6, seed=9).to_json()
    b = soundness_suite("ZX_E", max_arity=1, grid_den=2, n_random=6, seed=9).to_json()
    assert a == b


def test_derived_rules_sound_on_grids():
    for name in DERIVED_IMPORTED:
        schema = get_schema(name)
        for arities in schema.arity_grid(3):
            bindings = dict(arities)
            for p in schema.angle_params:
                bindings[p] = PiRational(5, 4)
            for swap in (False, True):
                for flip in (False, True):
                    inst = instantiate(schema, bindings, swap, flip)
                    assert check_soundness(inst).sound, inst.key()


def test_invariant_preservation_zx():
    report = {e.rule: e.preserving for e in invariant_preservation_check(
        "ZX", max_arity=2, grid_den=2)}
    assert report["ZO"] is False
    assert all(v for rule, v in report.items() if rule != "ZO")


def test_invariant_preservation_zxe_flags_e():
    report = {e.rule: e.preserving for e in invariant_preservation_check(
        "ZX_E", max_arity=1, grid_den=2)}
    assert report["E"] is False
    assert all(v for rule, v in report.items() if rule != "E")


def test_supn_preserves_invariant():
    for n in range(1, 6):
        inst = instantiate("SUPn", {"n": n, "alpha": PiRational(1, 4)})
        assert invariant_r(inst.lhs) == invariant_r(inst.rhs)


def test_derived_rules_preserve_invariant():
    for name in DERIVED_IMPORTED:
        schema = get_schema(name)
        for arities in schema.arity_grid(3):
            bindings = dict(arities)
            for p in schema.angle_params:
                bindings[p] = PiRational(1, 4)
            inst = instantiate(schema, bindings)
            assert invariant_r(inst.lhs) == invariant_r(inst.rhs), name


def test_props56_semantic_instances():
    # endpoint equalities of the divisibility propositions at small (p, q),
    # with angles chosen so alpha/p stays in the fragment
    for p, q in ((3, 2), (5, 2), (3, 4)):
        beta = PiRational(1, 4)
        alpha = beta * p
        for n in (q, p * q):
            inst = instantiate("SUPn", {"n": n, "alpha": alpha})
            assert check_soundness(inst).sound
        inst = instantiate("SUPn", {"n": p, "alpha": beta})
        assert check_soundness(inst).sound


def test_variant_instance_keys():
    inst = instantiate("SUP", {"alpha": PiRational(1, 2)}, True, True)
    assert inst.key().endswith("SF")
