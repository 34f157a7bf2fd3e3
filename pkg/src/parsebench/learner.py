"""Decision-structure learning over parse examples.

Four trainable variants: plain ID3 tree, plain decision list, hierarchical
tree (class first, specific action second), and the hybrid decision list
of hierarchical trees.  Feature values are purely categorical; UNAVAILABLE
is an ordinary value, not missing data.  No pruning anywhere: supervisor
corrections are ground truth, so perfect training-set recall is required.

All tie-breaking is lexicographic / lowest-index, which makes training a
pure function of the example multiset.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from . import sexp
from .actions import action_class
from .features import FALSE, TRUE, ParseExample


class LearnError(Exception):
    pass


class EmptyCounts(LearnError):
    pass


class MalformedStructure(Exception):
    pass


# ---------------------------------------------------------------------------
# information measures

def entropy(counts) -> float:
    """Shannon entropy in bits of a count distribution."""
    total = sum(counts)
    if total <= 0:
        raise EmptyCounts("entropy of an empty distribution")
    h = 0.0
    for c in counts:
        if c:
            p = c / total
            h -= p * math.log2(p)
    return h


def _label_counts(examples):
    counts = {}
    for ex in examples:
        counts[ex.action] = counts.get(ex.action, 0) + 1
    return counts


def _sorted_counts(counts):
    return [counts[k] for k in sorted(counts)]


def label_entropy(examples) -> float:
    return entropy(_sorted_counts(_label_counts(examples)))


def info_gain(examples, feature_index: int) -> float:
    """Entropy reduction from splitting on one feature (multiway)."""
    base = label_entropy(examples)
    groups = {}
    for ex in examples:
        groups.setdefault(ex.vector[feature_index], []).append(ex)
    remainder = 0.0
    n = len(examples)
    for value in sorted(groups):
        subset = groups[value]
        remainder += (len(subset) / n) * label_entropy(subset)
    return base - remainder


def _majority_action(examples) -> str:
    counts = _label_counts(examples)
    best = max(counts.values())
    return min(a for a, c in counts.items() if c == best)


# ---------------------------------------------------------------------------
# plain decision tree

@dataclass
class Leaf:
    action: str
    support: int
    distribution: tuple  # sorted (action, count) pairs


@dataclass
class Node:
    feature_index: int
    branches: dict  # value -> Leaf | Node, insertion-sorted by value
    default_branch: str  # branch value to take on unseen feature values


def _make_leaf(examples):
    counts = _label_counts(examples)
    return Leaf(action=_majority_action(examples), support=len(examples),
                distribution=tuple(sorted(counts.items())))


def train_id3(examples) -> Leaf | Node:
    """Recursive max-gain splitting; stops at purity or zero gain.

    Conflicting examples (identical vectors, different actions) end in a
    majority leaf, lexicographically smallest action on ties.
    """
    examples = list(examples)
    if not examples:
        raise LearnError("no training examples")
    width = len(examples[0].vector)
    for ex in examples:
        if len(ex.vector) != width:
            raise LearnError("inconsistent vector lengths")
    return _grow(examples, width)


def _grow(examples, width):
    counts = _label_counts(examples)
    if len(counts) == 1:
        return _make_leaf(examples)
    best_gain = 0.0
    best_feature = None
    for f in range(width):
        if len({ex.vector[f] for ex in examples}) < 2:
            continue
        gain = info_gain(examples, f)
        if gain > best_gain:
            best_gain = gain
            best_feature = f
    if best_feature is None:
        return _make_leaf(examples)
    groups = {}
    for ex in examples:
        groups.setdefault(ex.vector[best_feature], []).append(ex)
    branches = {v: _grow(groups[v], width) for v in sorted(groups)}
    most = max(len(g) for g in groups.values())
    default = min(v for v, g in groups.items() if len(g) == most)
    return Node(best_feature, branches, default)


def _classify_tree(tree, vector, trace):
    node = tree
    while isinstance(node, Node):
        value = vector[node.feature_index]
        unseen = value not in node.branches
        taken = node.default_branch if unseen else value
        trace.append({"type": "split", "feature": node.feature_index,
                      "value": value, "taken": taken, "default": unseen})
        node = node.branches[taken]
    trace.append({"type": "leaf", "action": node.action, "support": node.support})
    return node.action


# ---------------------------------------------------------------------------
# plain decision list (separate and conquer)

@dataclass
class Rule:
    tests: tuple  # ((feature_index, value), ...) conjunction
    action: str
    coverage: int


@dataclass
class DecisionList:
    rules: tuple
    default_action: str


def train_dlist(examples) -> DecisionList:
    """Greedy rule growth by (purity, coverage, lowest index, value).

    Rules are grown until pure, emitted for their majority action, and
    their covered examples removed.  Examples already carrying the global
    default action are left to the default rule.
    """
    examples = list(examples)
    if not examples:
        raise LearnError("no training examples")
    width = len(examples[0].vector)
    default = _majority_action(examples)
    remaining = examples
    rules = []
    while remaining and any(ex.action != default for ex in remaining):
        tests, covered = _grow_rule(remaining, width)
        if not tests:
            break  # conflicting residue indistinguishable by any feature
        rules.append(Rule(tuple(tests), _majority_action(covered), len(covered)))
        covered_ids = {id(ex) for ex in covered}
        remaining = [ex for ex in remaining if id(ex) not in covered_ids]
    return DecisionList(tuple(rules), default)


def _grow_rule(examples, width):
    current = examples
    tests = []
    while True:
        pure = len(_label_counts(current)) == 1
        if pure and tests:
            return tests, current
        best_key = None
        best = None
        for f in range(width):
            groups = {}
            for ex in current:
                groups.setdefault(ex.vector[f], []).append(ex)
            if len(groups) < 2 and not pure:
                continue  # non-restricting test makes no progress on impure sets
            for v in sorted(groups):
                subset = groups[v]
                counts = _label_counts(subset)
                purity = max(counts.values()) / len(subset)
                key = (purity, len(subset))
                if best_key is None or key > best_key:
                    best_key = key
                    best = (f, v, subset)
        if best is None:
            return tests, current  # stalled: every feature constant
        f, v, subset = best
        tests.append((f, v))
        current = subset
        if pure:
            return tests, current


def _classify_dlist(dlist, vector, trace):
    for i, rule in enumerate(dlist.rules):
        if all(vector[f] == v for f, v in rule.tests):
            trace.append({"type": "rule", "index": i, "action": rule.action})
            return rule.action
    trace.append({"type": "rule", "index": None, "action": dlist.default_action})
    return dlist.default_action


# ---------------------------------------------------------------------------
# hierarchical tree: decide the action class first, then the full action

@dataclass
class HierarchicalTree:
    class_tree: Leaf | Node
    per_class: dict  # class label -> Leaf | Node


def train_hier(examples) -> HierarchicalTree:
    examples = list(examples)
    if not examples:
        raise LearnError("no training examples")
    class_examples = [ParseExample(ex.vector, action_class(ex.action), ex.provenance)
                      for ex in examples]
    class_tree = train_id3(class_examples)
    by_class = {}
    for ex in examples:
        by_class.setdefault(action_class(ex.action), []).append(ex)
    per_class = {cls: train_id3(by_class[cls]) for cls in sorted(by_class)}
    return HierarchicalTree(class_tree, per_class)


def _classify_hier(hier, vector, trace):
    cls = _classify_tree(hier.class_tree, vector, trace)
    trace.append({"type": "class", "label": cls})
    return _classify_tree(hier.per_class[cls], vector, trace)


# ---------------------------------------------------------------------------
# hybrid: a decision list of hierarchical decision trees

@dataclass(frozen=True)
class GroupConfig:
    """Ordered groups of action patterns; `*` is a wildcard token."""

    groups: tuple  # ((name, (pattern, ...)), ...); pattern = token tuple


def load_group_config(text: str) -> GroupConfig:
    groups = []
    saw_default = False
    for expr in sexp.parse_many(text):
        if not (isinstance(expr, list) and expr):
            raise LearnError("bad group config entry %r" % (expr,))
        if expr[0] == "group":
            if len(expr) < 3 or not isinstance(expr[1], str):
                raise LearnError("bad group entry %r" % (expr,))
            patterns = []
            for pat in expr[2:]:
                if not isinstance(pat, list) or not pat:
                    raise LearnError("bad pattern in group %s" % expr[1])
                patterns.append(tuple(str(t).upper() for t in pat))
            groups.append((expr[1].upper(), tuple(patterns)))
        elif expr[0] == "default" and len(expr) == 1:
            saw_default = True
        else:
            raise LearnError("bad group config entry %r" % (expr,))
    if not saw_default:
        raise LearnError("group config missing (default)")
    return GroupConfig(tuple(groups))


def action_tokens(text: str):
    return tuple(text.replace("(", " ").replace(")", " ").split())


def pattern_matches(pattern, tokens) -> bool:
    """Tokenwise match; a trailing `*` matches any tail, otherwise `*`
    matches exactly one token."""
    for i, p in enumerate(pattern):
        if p == "*" and i == len(pattern) - 1:
            return True
        if i >= len(tokens):
            return False
        if p != "*" and tokens[i] != p:
            return False
    return len(tokens) == len(pattern)


@dataclass
class HybridGroup:
    name: str
    patterns: tuple
    gate: Leaf | Node  # binary tree answering TRUE/FALSE
    body: HierarchicalTree


@dataclass
class HybridStructure:
    groups: tuple
    default_body: HierarchicalTree


def _in_group(patterns, action):
    toks = action_tokens(action)
    return any(pattern_matches(p, toks) for p in patterns)


def train_hybrid(examples, group_config: GroupConfig) -> HybridStructure:
    """Gate trees walk the group list in order; first TRUE gate delegates
    to its hierarchical body, the remainder to the default body."""
    examples = list(examples)
    if not examples:
        raise LearnError("no training examples")
    remaining = examples
    groups = []
    for name, patterns in group_config.groups:
        claimed = [ex for ex in remaining if _in_group(patterns, ex.action)]
        if not claimed:
            warnings.warn("group %s has no examples; skipped" % name)
            continue
        claimed_ids = {id(ex) for ex in claimed}
        gate_examples = [
            ParseExample(ex.vector, TRUE if id(ex) in claimed_ids else FALSE,
                         ex.provenance)
            for ex in remaining]
        gate = train_id3(gate_examples)
        body = train_hier(claimed)
        groups.append(HybridGroup(name, patterns, gate, body))
        remaining = [ex for ex in remaining if id(ex) not in claimed_ids]
    # a fully-claimed corpus still needs a default body for unseen vectors
    default_body = train_hier(remaining if remaining else examples)
    return HybridStructure(tuple(groups), default_body)


def _classify_hybrid(hybrid, vector, trace):
    for group in hybrid.groups:
        gate_trace = []
        answer = _classify_tree(group.gate, vector, gate_trace)
        trace.append({"type": "gate", "group": group.name,
                      "result": answer == TRUE})
        if answer == TRUE:
            return _classify_hier(group.body, vector, trace)
    return _classify_hier(hybrid.default_body, vector, trace)


# ---------------------------------------------------------------------------
# classification, stats, serialization

def classify(structure, vector):
    """Deterministic action plus the full decision trace."""
    trace = []
    if isinstance(structure, (Leaf, Node)):
        action = _classify_tree(structure, vector, trace)
    elif isinstance(structure, DecisionList):
        action = _classify_dlist(structure, vector, trace)
    elif isinstance(structure, HierarchicalTree):
        action = _classify_hier(structure, vector, trace)
    elif isinstance(structure, HybridStructure):
        action = _classify_hybrid(structure, vector, trace)
    else:
        raise TypeError("not a decision structure: %r" % (structure,))
    return action, trace


VARIANTS = ("tree", "list", "hier", "hybrid")


def train(variant: str, examples, group_config: GroupConfig | None = None):
    if variant == "tree":
        return train_id3(examples)
    if variant == "list":
        return train_dlist(examples)
    if variant == "hier":
        return train_hier(examples)
    if variant == "hybrid":
        if group_config is None:
            group_config = GroupConfig(())
        return train_hybrid(examples, group_config)
    raise LearnError("unknown variant %r" % variant)


def variant_name(structure) -> str:
    if isinstance(structure, (Leaf, Node)):
        return "tree"
    if isinstance(structure, DecisionList):
        return "list"
    if isinstance(structure, HierarchicalTree):
        return "hier"
    if isinstance(structure, HybridStructure):
        return "hybrid"
    raise TypeError("not a decision structure: %r" % (structure,))


@dataclass(frozen=True)
class TrainStats:
    example_count: int
    node_count: int
    depth: int
    training_accuracy: float


def _tree_size(tree):
    if isinstance(tree, Leaf):
        return 1, 0
    nodes, depth = 1, 0
    for sub in tree.branches.values():
        n, d = _tree_size(sub)
        nodes += n
        depth = max(depth, d + 1)
    return nodes, depth


def _structure_size(structure):
    if isinstance(structure, (Leaf, Node)):
        return _tree_size(structure)
    if isinstance(structure, DecisionList):
        nodes = len(structure.rules) + 1
        depth = max((len(r.tests) for r in structure.rules), default=0)
        return nodes, depth
    if isinstance(structure, HierarchicalTree):
        nodes, depth = _tree_size(structure.class_tree)
        for tree in structure.per_class.values():
            n, d = _tree_size(tree)
            nodes += n
            depth = max(depth, d)
        return nodes, depth
    nodes, depth = _structure_size(structure.default_body)
    for group in structure.groups:
        n, d = _tree_size(group.gate)
        nodes += n
        depth = max(depth, d)
        n, d = _structure_size(group.body)
        nodes += n
        depth = max(depth, d)
    return nodes, depth


def training_stats(structure, examples) -> TrainStats:
    examples = list(examples)
    correct = sum(1 for ex in examples if classify(structure, ex.vector)[0] == ex.action)
    nodes, depth = _structure_size(structure)
    accuracy = correct / len(examples) if examples else 0.0
    return TrainStats(len(examples), nodes, depth, accuracy)


# --- textual serialization -------------------------------------------------

def _q(s):
    return sexp.Quoted(s)


def _tree_sexp(tree):
    if isinstance(tree, Leaf):
        dist = [[_q(a), str(c)] for a, c in tree.distribution]
        return ["leaf", _q(tree.action), str(tree.support), dist]
    expr = ["node", str(tree.feature_index), _q(tree.default_branch)]
    for value in sorted(tree.branches):
        expr.append([_q(value), _tree_sexp(tree.branches[value])])
    return expr


def _hier_sexp(hier):
    expr = ["hier", ["classtree", _tree_sexp(hier.class_tree)]]
    for cls in sorted(hier.per_class):
        expr.append(["class", _q(cls), _tree_sexp(hier.per_class[cls])])
    return expr


def save_structure(structure, stats: TrainStats) -> str:
    """Lossless textual serialization of a structure plus its stats."""
    variant = variant_name(structure)
    if variant == "tree":
        body = _tree_sexp(structure)
    elif variant == "list":
        rules = ["rules"]
        for rule in structure.rules:
            tests = [[str(f), _q(v)] for f, v in rule.tests]
            rules.append(["rule", tests, _q(rule.action), str(rule.coverage)])
        body = ["dlist", rules, ["default", _q(structure.default_action)]]
    elif variant == "hier":
        body = _hier_sexp(structure)
    else:
        body = ["hybrid"]
        for group in structure.groups:
            pats = [list(p) for p in group.patterns]
            body.append(["group", group.name, ["patterns"] + pats,
                         _tree_sexp(group.gate), _hier_sexp(group.body)])
        body.append(["defaultbody", _hier_sexp(structure.default_body)])
    expr = ["structure", variant,
            ["stats", str(stats.example_count), str(stats.node_count),
             str(stats.depth), repr(stats.training_accuracy)],
            body]
    return _pretty(expr) + "\n"


def _pretty(expr):
    # top level and second level on their own lines; rest inline
    parts = [sexp.format_sexp(e) for e in expr]
    return "(" + "\n  ".join(parts) + ")"


def load_structure(text: str):
    """Inverse of save_structure; returns (structure, TrainStats)."""
    try:
        expr = sexp.parse_one(text)
    except sexp.SexpError as exc:
        raise MalformedStructure(str(exc))
    if not (isinstance(expr, list) and len(expr) == 4 and expr[0] == "structure"):
        raise MalformedStructure("expected (structure VARIANT (stats ...) BODY)")
    variant = expr[1]
    stats_expr = expr[2]
    if not (isinstance(stats_expr, list) and len(stats_expr) == 5
            and stats_expr[0] == "stats"):
        raise MalformedStructure("bad stats block")
    try:
        stats = TrainStats(int(stats_expr[1]), int(stats_expr[2]),
                           int(stats_expr[3]), float(stats_expr[4]))
    except ValueError:
        raise MalformedStructure("bad stats values")
    body = expr[3]
    if variant == "tree":
        structure = _tree_from_sexp(body)
    elif variant == "list":
        structure = _dlist_from_sexp(body)
    elif variant == "hier":
        structure = _hier_from_sexp(body)
    elif variant == "hybrid":
        structure = _hybrid_from_sexp(body)
    else:
        raise MalformedStructure("unknown variant %r" % variant)
    return structure, stats


def _tree_from_sexp(expr):
    if not (isinstance(expr, list) and expr):
        raise MalformedStructure("bad tree node %r" % (expr,))
    if expr[0] == "leaf":
        if len(expr) != 4 or not isinstance(expr[3], list):
            raise MalformedStructure("bad leaf %r" % (expr,))
        dist = []
        for pair in expr[3]:
            if not (isinstance(pair, list) and len(pair) == 2):
                raise MalformedStructure("bad leaf distribution")
            dist.append((str(pair[0]), int(pair[1])))
        return Leaf(str(expr[1]), int(expr[2]), tuple(dist))
    if expr[0] == "node":
        if len(expr) < 4:
            raise MalformedStructure("bad node %r" % (expr,))
        branches = {}
        for pair in expr[3:]:
            if not (isinstance(pair, list) and len(pair) == 2):
                raise MalformedStructure("bad branch")
            branches[str(pair[0])] = _tree_from_sexp(pair[1])
        return Node(int(expr[1]), branches, str(expr[2]))
    raise MalformedStructure("bad tree tag %r" % expr[0])


def _dlist_from_sexp(expr):
    if not (isinstance(expr, list) and len(expr) == 3 and expr[0] == "dlist"):
        raise MalformedStructure("bad dlist")
    rules = []
    for item in expr[1][1:]:
        if not (isinstance(item, list) and len(item) == 4 and item[0] == "rule"):
            raise MalformedStructure("bad rule")
        tests = tuple((int(t[0]), str(t[1])) for t in item[1])
        rules.append(Rule(tests, str(item[2]), int(item[3])))
    default = expr[2]
    if not (isinstance(default, list) and len(default) == 2 and default[0] == "default"):
        raise MalformedStructure("bad default")
    return DecisionList(tuple(rules), str(default[1]))


def _hier_from_sexp(expr):
    if not (isinstance(expr, list) and len(expr) >= 2 and expr[0] == "hier"):
        raise MalformedStructure("bad hier")
    ct = expr[1]
    if not (isinstance(ct, list) and len(ct) == 2 and ct[0] == "classtree"):
        raise MalformedStructure("bad classtree")
    per_class = {}
    for item in expr[2:]:
        if not (isinstance(item, list) and len(item) == 3 and item[0] == "class"):
            raise MalformedStructure("bad class block")
        per_class[str(item[1])] = _tree_from_sexp(item[2])
    return HierarchicalTree(_tree_from_sexp(ct[1]), per_class)


def _hybrid_from_sexp(expr):
    if not (isinstance(expr, list) and expr and expr[0] == "hybrid"):
        raise MalformedStructure("bad hybrid")
    groups = []
    default_body = None
    for item in expr[1:]:
        if not (isinstance(item, list) and item):
            raise MalformedStructure("bad hybrid block")
        if item[0] == "group":
            if len(item) != 5:
                raise MalformedStructure("bad group block")
            patterns = tuple(tuple(str(t) for t in p) for p in item[2][1:])
            groups.append(HybridGroup(str(item[1]), patterns,
                                      _tree_from_sexp(item[3]),
                                      _hier_from_sexp(item[4])))
        elif item[0] == "defaultbody" and len(item) == 2:
            default_body = _hier_from_sexp(item[1])
        else:
            raise MalformedStructure("bad hybrid block %r" % item[0])
    if default_body is None:
        raise MalformedStructure("hybrid missing defaultbody")
    return HybridStructure(tuple(groups), default_body)
