import json
import random
from decimal import Decimal

import pytest
from hypothesis import given, settings, strategies as st

from conftest import TREES
from treegen import random_tree, random_vector
from fairgauge.errors import (
    CycleDetected,
    DanglingChild,
    InvalidTree,
    MissingFeature,
    MixedNodeKind,
    UnknownTerm,
    UnreachableNode,
)
from fairgauge.linkeddata import (
    LinkedDataDoc,
    Literal,
    Node,
    Ref,
    parse_linked_data,
    serialize_linked_data,
)
from fairgauge.treemodel import (
    HPC_NS,
    TreeNode,
    annotate_tree,
    evaluate,
    load_any,
    parse_annotated,
    parse_features,
    parse_tree,
    tree_from_dict,
    tree_to_dict,
)

UM = TREES / "um-advice.json"


def _tree(nodes, root="a", name="t"):
    return tree_from_dict({"name": name, "root": root, "nodes": nodes})


def _split(node_id, level, t, f, feature="x", threshold="1"):
    return {"id": node_id, "level": level, "feature": feature, "threshold": threshold, "true": t, "false": f}


def _leaf(node_id, level, label="0"):
    return {"id": node_id, "level": level, "label": label}


# -- structure -------------------------------------------------------------------

def test_single_leaf_is_depth_zero():
    tree = _tree([_leaf("a", 0)])
    assert tree.depth() == 0
    assert evaluate(tree, {}) == "0"


def test_self_child_is_a_cycle():
    with pytest.raises(CycleDetected):
        _tree([_split("a", 0, "a", "b"), _leaf("b", 1)])


def test_longer_cycle():
    with pytest.raises(CycleDetected):
        _tree([_split("a", 0, "b", "c"), _split("b", 1, "a", "d"), _leaf("c", 1), _leaf("d", 2)])


def test_missing_false_child():
    with pytest.raises(DanglingChild):
        _tree([{"id": "a", "level": 0, "feature": "x", "threshold": "1", "true": "b"}, _leaf("b", 1)])


def test_child_pointing_nowhere():
    with pytest.raises(DanglingChild):
        _tree([_split("a", 0, "b", "zz"), _leaf("b", 1)])


def test_label_and_split_on_one_node():
    node = _split("a", 0, "b", "c") | {"label": "1"}
    with pytest.raises(MixedNodeKind):
        _tree([node, _leaf("b", 1), _leaf("c", 1)])


def test_node_with_nothing():
    with pytest.raises(MixedNodeKind):
        _tree([{"id": "a", "level": 0}])


def test_unreachable_node():
    with pytest.raises(UnreachableNode):
        _tree([_split("a", 0, "b", "c"), _leaf("b", 1), _leaf("c", 1), _leaf("orphan", 1)])


def test_shared_child_rejected():
    with pytest.raises(InvalidTree, match="more than one parent"):
        _tree([_split("a", 0, "b", "b"), _leaf("b", 1)])


def test_level_must_follow_parent():
    with pytest.raises(InvalidTree, match="level"):
        _tree([_split("a", 0, "b", "c"), _leaf("b", 2), _leaf("c", 1)])


def test_root_level_zero():
    with pytest.raises(InvalidTree):
        _tree([_leaf("a", 1)])


def test_empty_tree():
    with pytest.raises(DanglingChild):
        tree_from_dict({"name": "t", "nodes": []})


def test_duplicate_ids():
    with pytest.raises(InvalidTree, match="duplicate"):
        _tree([_split("a", 0, "b", "c"), _leaf("b", 1), _leaf("b", 1), _leaf("c", 1)])


def test_fixture_tree():
    tree = parse_tree(UM)
    assert tree.depth() == 2
    assert len(tree.nodes) == 5
    assert tree.nodes["n0"].threshold == Decimal("12.5")
    assert tree.derived_from.endswith("labelledData.csv")


def test_bad_json(tmp_path):
    p = tmp_path / "t.json"
    p.write_text("{nope")
    with pytest.raises(InvalidTree):
        parse_tree(p)


# -- evaluation ------------------------------------------------------------------

@pytest.mark.parametrize(
    "features, label",
    [
        ({"GPUPageFault": "12.5", "HtoD": "4096.0"}, "Default"),  # both on the boundary: true branch
        ({"GPUPageFault": "12.5", "HtoD": "4096.01"}, "PreferredLocation"),
        ({"GPUPageFault": "12.51"}, "ReadMostly"),
        ({"GPUPageFault": "0", "HtoD": "-1"}, "Default"),
    ],
)
def test_evaluate_fixture(features, label):
    assert evaluate(parse_tree(UM), parse_features(",".join(f"{k}={v}" for k, v in features.items()))) == label


def test_missing_feature_names_feature_and_node():
    with pytest.raises(MissingFeature) as info:
        evaluate(parse_tree(UM), {"GPUPageFault": Decimal(1)})
    assert "HtoD" in str(info.value)
    assert "n1" in str(info.value)


def test_unused_feature_not_required():
    assert evaluate(parse_tree(UM), {"GPUPageFault": Decimal(99)}) == "ReadMostly"


def test_strict_operator():
    tree = _tree([_split("a", 0, "b", "c") | {"op": "<"}, _leaf("b", 1, "lt"), _leaf("c", 1, "ge")])
    assert evaluate(tree, {"x": Decimal(1)}) == "ge"
    assert evaluate(tree, {"x": Decimal("0.999")}) == "lt"


def test_parse_features():
    assert parse_features("a=1, b = 2.50") == {"a": Decimal(1), "b": Decimal("2.50")}
    with pytest.raises(ValueError):
        parse_features("a")


def test_evaluate_visits_at_most_depth_plus_one_nodes():
    rng = random.Random(7)
    for _ in range(50):
        tree = random_tree(rng, max_depth=8, max_nodes=120)
        visits = []

        class Spy(dict):
            def __getitem__(self, key):
                visits.append(key)
                return dict.__getitem__(self, key)

        spied = type(tree)(tree.name, tree.root, Spy(tree.nodes), tree.derived_from)
        evaluate(spied, random_vector(rng, tree))
        assert len(visits) <= tree.depth() + 1


# -- annotation -----------------------------------------------------------------

def test_three_node_tree_annotates_to_four_nodes():
    tree = _tree([_split("a", 0, "b", "c", threshold="0.5"), _leaf("b", 1), _leaf("c", 1, "1")])
    doc = annotate_tree(tree)
    assert len(doc.nodes) == 4
    head = doc.nodes[0]
    assert head.types == ("hpc:DecisionTree",)
    assert len(head.values("hpc:decisionTreeNode")) == 3
    inner = doc.nodes[1]
    assert inner.first("hpc:relationValue") == Literal(Decimal("0.5"), "decimal")
    assert inner.first("hpc:relationOp") == Literal("<=")
    for leaf in doc.nodes[2:]:
        assert leaf.first("hpc:trueNode") is None
        assert leaf.first("hpc:falseNode") is None
        assert leaf.first("hpc:hasChildNode") == Literal(False, "boolean")
    data = json.loads(serialize_linked_data(doc))
    assert data["@context"]["hpc"] == HPC_NS
    inner_json = data["@graph"][1]
    assert inner_json["hpc:relationValue"] == {"@type": "xsd:decimal", "@value": "0.5"}
    assert inner_json["hpc:treeNodeLevel"] == 0


def test_fixture_round_trip_through_bytes():
    tree = parse_tree(UM)
    back = parse_annotated(parse_linked_data(serialize_linked_data(annotate_tree(tree))))
    assert back == tree


def test_custom_base():
    doc = annotate_tree(parse_tree(UM), "https://hpc.example/trees/")
    assert doc.nodes[0].id == "https://hpc.example/trees/um-advice"
    assert doc.nodes[1].id == "https://hpc.example/trees/um-advice/node/n0"


def _head(*members, extra=()):
    return Node(
        "http://t/x",
        ("hpc:DecisionTree",),
        (("hpc:name", Literal("x")),) + tuple(("hpc:decisionTreeNode", Ref(m)) for m in members) + tuple(extra),
    )


def test_childless_node_without_label():
    doc = LinkedDataDoc({"hpc": HPC_NS}, (
        _head("http://t/x/node/a"),
        Node("http://t/x/node/a", ("hpc:DecisionTreeNode",), (
            ("hpc:treeNodeLevel", Literal(0, "integer")),
            ("hpc:hasChildNode", Literal(False, "boolean")),
        )),
    ))
    with pytest.raises(MixedNodeKind):
        parse_annotated(doc)


def test_empty_document():
    with pytest.raises(DanglingChild):
        parse_annotated(LinkedDataDoc({"hpc": HPC_NS}, ()))


def test_tree_without_members():
    with pytest.raises(DanglingChild):
        parse_annotated(LinkedDataDoc({"hpc": HPC_NS}, (_head(),)))


def test_member_missing_from_document():
    with pytest.raises(DanglingChild):
        parse_annotated(LinkedDataDoc({"hpc": HPC_NS}, (_head("http://t/x/node/a"),)))


def test_unknown_property():
    doc = LinkedDataDoc({"hpc": HPC_NS}, (
        _head("http://t/x/node/a"),
        Node("http://t/x/node/a", ("hpc:DecisionTreeNode",), (
            ("hpc:treeNodeLevel", Literal(0, "integer")),
            ("hpc:decisionLabel", Literal("0")),
            ("hpc:colour", Literal("red")),
        )),
    ))
    with pytest.raises(UnknownTerm):
        parse_annotated(doc)


def test_full_iri_keys_accepted():
    doc = LinkedDataDoc({}, (
        Node("http://t/x", (HPC_NS + "DecisionTree",), (
            (HPC_NS + "name", Literal("x")),
            (HPC_NS + "decisionTreeNode", Ref("http://t/x/node/a")),
        )),
        Node("http://t/x/node/a", (HPC_NS + "DecisionTreeNode",), (
            (HPC_NS + "treeNodeLevel", Literal(0, "integer")),
            (HPC_NS + "decisionLabel", Literal("only")),
        )),
    ))
    assert evaluate(parse_annotated(doc), {}) == "only"


@pytest.mark.parametrize("op", [">", ">="])
def test_greater_than_is_normalised(op):
    base = "http://t/x/node/"
    doc = LinkedDataDoc({"hpc": HPC_NS}, (
        _head(base + "a", base + "b", base + "c"),
        Node(base + "a", ("hpc:DecisionTreeNode",), (
            ("hpc:treeNodeLevel", Literal(0, "integer")),
            ("hpc:decisionFeature", Literal("x")),
            ("hpc:relationOp", Literal(op)),
            ("hpc:relationValue", Literal(Decimal(5), "decimal")),
            ("hpc:trueNode", Ref(base + "b")),
            ("hpc:falseNode", Ref(base + "c")),
        )),
        Node(base + "b", ("hpc:DecisionTreeNode",), (
            ("hpc:treeNodeLevel", Literal(1, "integer")), ("hpc:decisionLabel", Literal("big")))),
        Node(base + "c", ("hpc:DecisionTreeNode",), (
            ("hpc:treeNodeLevel", Literal(1, "integer")), ("hpc:decisionLabel", Literal("small")))),
    ))
    tree = parse_annotated(doc)
    assert evaluate(tree, {"x": Decimal(6)}) == "big"
    assert evaluate(tree, {"x": Decimal(4)}) == "small"
    assert evaluate(tree, {"x": Decimal(5)}) == ("big" if op == ">=" else "small")


def test_load_any_reads_both_formats(tmp_path):
    tree = parse_tree(UM)
    p = tmp_path / "tree.jsonld"
    p.write_bytes(serialize_linked_data(annotate_tree(tree)))
    assert load_any(p) == tree
    assert load_any(UM) == tree


def test_native_round_trip():
    tree = parse_tree(UM)
    assert tree_from_dict(tree_to_dict(tree)) == tree


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), depth=st.integers(0, 12))
def test_annotation_round_trip_property(seed, depth):
    rng = random.Random(seed)
    tree = random_tree(rng, max_depth=depth, max_nodes=200)
    back = parse_annotated(parse_linked_data(serialize_linked_data(annotate_tree(tree))))
    assert back == tree
    for _ in range(20):
        vec = random_vector(rng, tree)
        assert evaluate(back, vec) == evaluate(tree, vec)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_generated_trees_respect_bounds(seed):
    tree = random_tree(random.Random(seed))
    assert tree.depth() <= 12
    assert len(tree.nodes) <= 512
    assert all(isinstance(n, TreeNode) for n in tree.nodes.values())
