"""Decision-tree models: native format, evaluation, and linked-data annotation.

Traversal convention: at an internal node, ``value <= threshold`` selects the
true (left) child, anything else the false (right) child.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from decimal import Decimal
from pathlib import Path
from typing import Mapping
from urllib.parse import quote, unquote

from .annotate import HPC_NS
from .errors import (
    CycleDetected,
    DanglingChild,
    InvalidTree,
    MissingFeature,
    MixedNodeKind,
    UnknownTerm,
    UnreachableNode,
)
from .linkeddata import Literal, LinkedDataDoc, Node, Ref, parse_linked_data

DEFAULT_BASE = "http://example.org/decisiontree/"

# operators a tree node may carry after normalisation
_OPS = ("<=", "<")


@dataclass(frozen=True)
class TreeNode:
    id: str
    level: int
    feature: str | None = None
    threshold: Decimal | None = None
    true_child: str | None = None
    false_child: str | None = None
    label: str | None = None
    op: str = "<="

    @property
    def is_leaf(self) -> bool:
        return self.label is not None


@dataclass(frozen=True)
class DecisionTree:
    name: str
    root: str
    nodes: Mapping[str, TreeNode]
    derived_from: str | None = None

    def depth(self) -> int:
        return max(n.level for n in self.nodes.values())


def _check_node(raw: TreeNode) -> None:
    has_children = raw.true_child is not None or raw.false_child is not None
    has_split = raw.feature is not None or raw.threshold is not None
    if raw.label is not None and (has_children or has_split):
        raise MixedNodeKind(f"node {raw.id!r} has a label and decision fields")
    if raw.label is None:
        if not (has_children or has_split):
            raise MixedNodeKind(f"node {raw.id!r} has neither a label nor children")
        if raw.true_child is None or raw.false_child is None:
            raise DanglingChild(f"internal node {raw.id!r} lacks a true or false child")
        if raw.feature is None or raw.threshold is None:
            raise MixedNodeKind(f"internal node {raw.id!r} lacks feature or threshold")
        if raw.op not in _OPS:
            raise InvalidTree(f"node {raw.id!r}: unsupported operator {raw.op!r}")
    if raw.level < 0:
        raise InvalidTree(f"node {raw.id!r}: negative level")


def validate_tree(name: str, root: str | None, nodes: list[TreeNode], derived_from=None) -> DecisionTree:
    """Structural checks shared by the native and linked-data parsers."""
    if not nodes or root is None:
        raise DanglingChild("tree has no nodes")
    by_id: dict[str, TreeNode] = {}
    for n in nodes:
        if n.id in by_id:
            raise InvalidTree(f"duplicate node id {n.id!r}")
        by_id[n.id] = n
    if root not in by_id:
        raise DanglingChild(f"root {root!r} is not a node")
    for n in nodes:
        _check_node(n)
        for child in (n.true_child, n.false_child):
            if child is not None and child not in by_id:
                raise DanglingChild(f"node {n.id!r} points to missing child {child!r}")

    # iterative DFS: grey = on stack, black = finished
    state: dict[str, int] = {}
    stack: list[tuple[str, int]] = [(root, 0)]
    while stack:
        node_id, phase = stack.pop()
        if phase == 1:
            state[node_id] = 2
            continue
        if node_id in state:
            raise InvalidTree(f"node {node_id!r} has more than one parent")
        state[node_id] = 1
        stack.append((node_id, 1))
        n = by_id[node_id]
        for child in (n.false_child, n.true_child):
            if child is None:
                continue
            seen = state.get(child)
            if seen == 1 or child == node_id:
                raise CycleDetected(f"cycle through node {child!r}")
            if seen == 2:
                raise InvalidTree(f"node {child!r} has more than one parent")
            if by_id[child].level != n.level + 1:
                raise InvalidTree(
                    f"node {child!r} has level {by_id[child].level}, expected {n.level + 1}"
                )
            stack.append((child, 0))
    unreachable = [n.id for n in nodes if n.id not in state]
    if unreachable:
        raise UnreachableNode(f"node(s) not reachable from root: {', '.join(unreachable)}")
    if by_id[root].level != 0:
        raise InvalidTree(f"root {root!r} must have level 0")
    return DecisionTree(name=name, root=root, nodes=by_id, derived_from=derived_from)


# -- native format -----------------------------------------------------------

def tree_from_dict(doc: dict) -> DecisionTree:
    nodes = []
    for raw in doc.get("nodes") or []:
        threshold = raw.get("threshold")
        if threshold is not None:
            threshold = Decimal(str(threshold))
        nodes.append(
            TreeNode(
                id=str(raw["id"]),
                level=int(raw.get("level", 0)),
                feature=raw.get("feature"),
                threshold=threshold,
                true_child=None if raw.get("true") is None else str(raw["true"]),
                false_child=None if raw.get("false") is None else str(raw["false"]),
                label=None if raw.get("label") is None else str(raw["label"]),
                op=raw.get("op", "<="),
            )
        )
    root = doc.get("root")
    return validate_tree(doc.get("name", "tree"), None if root is None else str(root), nodes, doc.get("derived_from"))


def tree_to_dict(tree: DecisionTree) -> dict:
    out_nodes = []
    for n in _walk(tree):
        entry: dict = {"id": n.id, "level": n.level}
        if n.is_leaf:
            entry["label"] = n.label
        else:
            entry.update(feature=n.feature, threshold=str(n.threshold), true=n.true_child, false=n.false_child)
            if n.op != "<=":
                entry["op"] = n.op
        out_nodes.append(entry)
    doc = {"name": tree.name, "derived_from": tree.derived_from, "root": tree.root, "nodes": out_nodes}
    return doc


def parse_tree(path) -> DecisionTree:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"), parse_float=Decimal)
    except json.JSONDecodeError as exc:
        raise InvalidTree(f"{path}: not valid JSON: {exc}") from exc
    return tree_from_dict(doc)


def load_any(path) -> DecisionTree:
    """Load either a native tree file or an annotated JSON-LD tree."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        doc = json.loads(text, parse_float=Decimal)
    except json.JSONDecodeError as exc:
        raise InvalidTree(f"{path}: not valid JSON: {exc}") from exc
    if isinstance(doc, dict) and ("@graph" in doc or "@context" in doc):
        return parse_annotated(parse_linked_data(text))
    return tree_from_dict(doc)


# -- evaluation --------------------------------------------------------------

def evaluate(tree: DecisionTree, features: Mapping[str, object]) -> str:
    node = tree.nodes[tree.root]
    while not node.is_leaf:
        if node.feature not in features:
            raise MissingFeature(node.feature, node.id)
        value = features[node.feature]
        if not isinstance(value, Decimal):
            value = Decimal(str(value))
        holds = value <= node.threshold if node.op == "<=" else value < node.threshold
        node = tree.nodes[node.true_child if holds else node.false_child]
    return node.label


def parse_features(text: str) -> dict[str, Decimal]:
    """Parse ``k=v,k2=v2`` into a feature vector."""
    out: dict[str, Decimal] = {}
    for part in filter(None, (p.strip() for p in text.split(","))):
        key, sep, value = part.partition("=")
        if not sep:
            raise ValueError(f"feature {part!r} is not key=value")
        out[key.strip()] = Decimal(value.strip())
    return out


def _walk(tree: DecisionTree):
    """Pre-order traversal, true child first."""
    stack = [tree.root]
    while stack:
        n = tree.nodes[stack.pop()]
        yield n
        if not n.is_leaf:
            stack.append(n.false_child)
            stack.append(n.true_child)


# -- linked data ---------------------------------------------------------------

TREE_TERMS = {
    "hpc:name", "hpc:wasDerivedFrom", "hpc:decisionTreeNode",
}
NODE_TERMS = {
    "hpc:treeNodeLevel", "hpc:decisionFeature", "hpc:relationOp", "hpc:relationValue",
    "hpc:trueNode", "hpc:falseNode", "hpc:hasChildNode", "hpc:decisionLabel",
}


def _tree_iri(tree: DecisionTree, base: str) -> str:
    return base + quote(tree.name, safe="")


def annotate_tree(tree: DecisionTree, base_iri: str = DEFAULT_BASE) -> LinkedDataDoc:
    tree_iri = _tree_iri(tree, base_iri)

    def node_iri(node_id: str) -> str:
        return f"{tree_iri}/node/{quote(node_id, safe='')}"

    ordered = list(_walk(tree))
    head_props: list = [("hpc:name", Literal(tree.name))]
    if tree.derived_from:
        head_props.append(("hpc:wasDerivedFrom", Literal(str(tree.derived_from))))
    head_props.extend(("hpc:decisionTreeNode", Ref(node_iri(n.id))) for n in ordered)
    nodes = [Node(tree_iri, ("hpc:DecisionTree",), tuple(head_props))]

    for n in ordered:
        props: list = [("hpc:treeNodeLevel", Literal(n.level, "integer"))]
        if n.is_leaf:
            props.append(("hpc:decisionLabel", Literal(n.label)))
            props.append(("hpc:hasChildNode", Literal(False, "boolean")))
        else:
            props += [
                ("hpc:decisionFeature", Literal(n.feature)),
                ("hpc:relationOp", Literal(n.op)),
                ("hpc:relationValue", Literal(n.threshold, "decimal")),
                ("hpc:trueNode", Ref(node_iri(n.true_child))),
                ("hpc:falseNode", Ref(node_iri(n.false_child))),
                ("hpc:hasChildNode", Literal(True, "boolean")),
            ]
        nodes.append(Node(node_iri(n.id), ("hpc:DecisionTreeNode",), tuple(props)))
    return LinkedDataDoc({"hpc": HPC_NS}, tuple(nodes))


def _compact(name: str, context: dict[str, str]) -> str:
    full = LinkedDataDoc(context).expand(name)
    if full.startswith(HPC_NS):
        return "hpc:" + full[len(HPC_NS):]
    return full


def _single(node: Node, key: str, context) -> object | None:
    values = [v for k, v in node.properties if _compact(k, context) == key]
    if len(values) > 1:
        raise InvalidTree(f"node {node.id!r} has {len(values)} values for {key}")
    return values[0] if values else None


def _literal(value, key: str, node_id: str):
    if value is None:
        return None
    if not isinstance(value, Literal):
        raise InvalidTree(f"node {node_id!r}: {key} must be a literal")
    return value.value


def _ref(value, key: str, node_id: str) -> str | None:
    if value is None:
        return None
    if not isinstance(value, Ref):
        raise InvalidTree(f"node {node_id!r}: {key} must be a node reference")
    return value.id


def parse_annotated(doc: LinkedDataDoc) -> DecisionTree:
    """Rebuild a tree from its linked-data annotation."""
    ctx = doc.context
    heads = [n for n in doc.nodes if any(_compact(t, ctx) == "hpc:DecisionTree" for t in n.types)]
    if not heads:
        raise DanglingChild("document contains no hpc:DecisionTree node")
    if len(heads) > 1:
        raise InvalidTree("document contains more than one hpc:DecisionTree node")
    head = heads[0]
    for key, _ in head.properties:
        if _compact(key, ctx) not in TREE_TERMS:
            raise UnknownTerm(f"unexpected property {key!r} on the tree node")
    name = _literal(_single(head, "hpc:name", ctx), "hpc:name", head.id)
    if name is None:
        raise InvalidTree("tree node lacks hpc:name")
    derived = _literal(_single(head, "hpc:wasDerivedFrom", ctx), "hpc:wasDerivedFrom", head.id)
    members = [v.id for k, v in head.properties if _compact(k, ctx) == "hpc:decisionTreeNode" and isinstance(v, Ref)]

    prefix = f"{head.id}/node/"

    def local(iri: str) -> str:
        return unquote(iri[len(prefix):]) if iri.startswith(prefix) else iri

    by_iri = {n.id: n for n in doc.nodes}
    tree_nodes: list[TreeNode] = []
    child_ids: set[str] = set()
    for iri in members:
        if iri not in by_iri:
            raise DanglingChild(f"tree lists missing node {iri!r}")
        n = by_iri[iri]
        if not any(_compact(t, ctx) == "hpc:DecisionTreeNode" for t in n.types):
            raise InvalidTree(f"{iri!r} is not typed hpc:DecisionTreeNode")
        for key, _ in n.properties:
            if _compact(key, ctx) not in NODE_TERMS:
                raise UnknownTerm(f"node {iri!r}: unexpected property {key!r}")
        level = _literal(_single(n, "hpc:treeNodeLevel", ctx), "hpc:treeNodeLevel", iri)
        if level is None:
            raise InvalidTree(f"node {iri!r} lacks hpc:treeNodeLevel")
        has_child = _literal(_single(n, "hpc:hasChildNode", ctx), "hpc:hasChildNode", iri)
        label = _literal(_single(n, "hpc:decisionLabel", ctx), "hpc:decisionLabel", iri)
        feature = _literal(_single(n, "hpc:decisionFeature", ctx), "hpc:decisionFeature", iri)
        op = _literal(_single(n, "hpc:relationOp", ctx), "hpc:relationOp", iri)
        threshold = _literal(_single(n, "hpc:relationValue", ctx), "hpc:relationValue", iri)
        t_child = _ref(_single(n, "hpc:trueNode", ctx), "hpc:trueNode", iri)
        f_child = _ref(_single(n, "hpc:falseNode", ctx), "hpc:falseNode", iri)

        children = t_child is not None or f_child is not None
        if has_child is False and (children or label is None):
            raise MixedNodeKind(f"childless node {iri!r} must carry only a decision label")
        if has_child is True and label is not None:
            raise MixedNodeKind(f"node {iri!r} has children and a decision label")

        if threshold is not None and not isinstance(threshold, Decimal):
            threshold = Decimal(str(threshold))
        op = "<=" if op is None else str(op)
        if op in (">", ">="):
            # a > t  <=>  not (a <= t); a >= t  <=>  not (a < t)
            t_child, f_child = f_child, t_child
            op = "<=" if op == ">" else "<"
        elif op not in _OPS:
            raise InvalidTree(f"node {iri!r}: unsupported relation operator {op!r}")

        for child in (t_child, f_child):
            if child is not None:
                child_ids.add(local(child))
        tree_nodes.append(
            TreeNode(
                id=local(iri),
                level=int(level),
                feature=None if feature is None else str(feature),
                threshold=threshold,
                true_child=None if t_child is None else local(t_child),
                false_child=None if f_child is None else local(f_child),
                label=None if label is None else str(label),
                op=op,
            )
        )
    roots = [n.id for n in tree_nodes if n.id not in child_ids]
    if not tree_nodes:
        raise DanglingChild("tree has no nodes")
    if len(roots) != 1:
        if not roots:
            raise CycleDetected("every node is some node's child")
        raise UnreachableNode(f"multiple root candidates: {', '.join(roots)}")
    return validate_tree(str(name), roots[0], tree_nodes, derived)
