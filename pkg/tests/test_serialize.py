import pytest

from bbinterp.conformal import unit_box, decompose_conforming
from bbinterp.instances import gen_cc_instance
from bbinterp.serialize import (
    FormatError,
    instance_from_json,
    instance_to_json,
    quasi_tree_from_json,
    quasi_tree_to_json,
    system_from_json,
    system_to_json,
    tree_from_json,
    tree_to_json,
    witness_from_json,
    witness_to_json,
)


def test_system_roundtrip(cross_factor):
    data = system_to_json(cross_factor)
    assert data["n"] == 2 and data["m"] == 8
    back = system_from_json(data)
    assert back == cross_factor


def test_system_label_roundtrip(cross_fixture):
    prod, tree = cross_fixture
    from bbinterp.bbtree import node_problem

    problem = node_problem(tree, "RL", prod.combined)
    back = system_from_json(system_to_json(problem))
    assert back == problem
    assert back.labels[-1].node == "R"


def test_system_schema_errors():
    with pytest.raises(FormatError) as info:
        system_from_json({"n": 2, "A": [[1, 2]]}, "f.json")
    assert "b" in str(info.value)
    with pytest.raises(FormatError):
        system_from_json({"n": 2, "m": 5, "A": [[1, 2]], "b": [0]}, "f.json")
    with pytest.raises(FormatError):
        system_from_json({"n": 2, "A": [[1]], "b": [0]}, "f.json")


def test_tree_roundtrip(cross_fixture):
    _, tree = cross_fixture
    back = tree_from_json(tree_to_json(tree))
    assert back.same_shape(tree)
    for path, node in tree.walk():
        other = back.node(path)
        if node.is_leaf:
            assert other.cert == node.cert
        else:
            assert other.disjunction == node.disjunction


def test_tree_schema_error_names_path():
    data = {"n": 1, "node": {"alpha": [1], "delta": 0, "left": {"leaf": True}, "right": {"alpha": [1]}}}
    with pytest.raises(FormatError) as info:
        tree_from_json(data, "t.json")
    assert "node[R]" in str(info.value)


def test_quasi_tree_roundtrip(cross_fixture):
    prod, tree = cross_fixture
    side, qtree = decompose_conforming(tree, prod, unit_box(2), unit_box(2))
    data = quasi_tree_to_json(qtree)
    assert data["box"] == [["0/1", "1/1"], ["0/1", "1/1"]]
    back = quasi_tree_from_json(data)
    assert back.tree.same_shape(qtree.tree)
    assert back.box == qtree.box
    assert back.quasi_cases == qtree.quasi_cases


def test_instance_roundtrip():
    inst = gen_cc_instance(4, 3)
    back = instance_from_json(instance_to_json(inst))
    assert back.full_system() == inst.full_system()
    assert back.meta["r"] == 4


def test_instance_sign_violation_reported():
    data = instance_to_json(gen_cc_instance(3, 2))
    data["C"][0][0] = -1
    with pytest.raises(FormatError):
        instance_from_json(data, "inst.json")


def test_witness_roundtrip():
    data = witness_to_json("Z1", (0, 1, 0), (1, 0, 1), 99)
    side, z, witness, seed = witness_from_json(data)
    assert (side, z, witness, seed) == ("Z1", (0, 1, 0), (1, 0, 1), 99)
