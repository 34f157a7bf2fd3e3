"""Shared random builders for property tests: trees, vectors, DAGs."""
import os
import shutil

from parsebench.frames import Forms, Frame, Sub, detokenize


def temp_project(tmp_path, with_corpus=True):
    """A disposable copy of the bundled project for write-heavy tests."""
    from parsebench.project import bundled_project_path
    src = os.path.dirname(bundled_project_path())
    dst = os.path.join(str(tmp_path), "project")
    shutil.copytree(src, dst)
    if not with_corpus:
        corpus = os.path.join(dst, "corpus")
        for name in os.listdir(corpus):
            os.unlink(os.path.join(corpus, name))
    return os.path.join(dst, "project.json")

LEAF_WORDS = ["fox", "mill", "stone", "river", "lamp", "gate", "cloud",
              "spoon", "ridge", "flute", ",", "."]
SYNTS = ["S-NP", "S-VP", "S-SNT", "S-NOUN", "S-ADJ", "S-ADV", "S-X1", "S-X2"]
SEMS = ["I-X-A", "I-X-B", "I-X-C", "C-X-TOP"]
ROLES = ["SUBJ", "OBJ", "MOD", "DET", "TIME", "LOC", "AUX", "COORD"]
TENSES = ["PAST_TENSE", "PRESENT_TENSE"]


def random_forms(rng):
    return Forms(
        person=rng.choice(["1", "2", "3", "UNAVAILABLE"]),
        number=rng.choice(["SING", "PLUR", "UNAVAILABLE"]),
        tense=rng.choice(TENSES + ["UNAVAILABLE"]),
        extra=frozenset(rng.sample(["INFINITIVE", "PASSIVE"], rng.randint(0, 2))),
    )


def random_tree(rng, max_depth=3, allow_empty=True):
    """A well-formed random frame whose leaves are consecutive tokens."""
    counter = [0]
    tokens = []

    def leaf():
        word = rng.choice(LEAF_WORDS)
        idx = counter[0]
        counter[0] += 1
        tokens.append(word)
        lex = word if rng.random() < 0.7 else word + "x"
        return Frame(surface=word, lex=lex, synt=rng.choice(SYNTS),
                     sem=rng.choice(SEMS + ["UNAVAILABLE"]),
                     forms=random_forms(rng), span=(idx, idx + 1))

    def empty_leaf():
        return Frame(surface="", lex=rng.choice(["PRO", "TRACE"]), synt="S-NP",
                     span=None, extras=(("COINDEX", str(rng.randint(1, 3))),))

    def build(depth):
        if depth >= max_depth or rng.random() < 0.35:
            return leaf()
        n = rng.randint(1, 3)
        children = [build(depth + 1) for _ in range(n)]
        if allow_empty and rng.random() < 0.15:
            children.append(empty_leaf())
        subs = []
        pred_at = rng.randrange(len(children))
        for i, child in enumerate(children):
            if i == pred_at:
                roles = ("PRED",)
            else:
                roles = tuple(rng.sample(ROLES, rng.randint(1, 2)))
            subs.append(Sub(roles, child))
        spans = [c.span for c in children if c.span is not None]
        span = (spans[0][0], spans[-1][1]) if spans else None
        head = children[pred_at]
        surface = detokenize(tokens[span[0]:span[1]]) if span else ""
        return Frame(surface=surface, lex=head.lex, synt=rng.choice(SYNTS),
                     sem=head.sem, forms=head.forms, subs=tuple(subs), span=span)

    tree = build(0)
    if tree.is_leaf and tree.surface == "":
        return random_tree(rng, max_depth, allow_empty)
    return tree


def random_examples(rng, n, width, n_values=3, n_actions=3):
    """Random categorical example sets for learner oracles."""
    from parsebench.features import ParseExample
    values = ["V%d" % i for i in range(n_values)] + ["UNAVAILABLE"]
    actions = ["(A%d)" % i for i in range(n_actions)]
    out = []
    for i in range(n):
        vec = tuple(rng.choice(values) for _ in range(width))
        out.append(ParseExample(vec, rng.choice(actions), ("rnd", i)))
    return out


def random_dag(rng, n_nodes):
    """Random DAG over concepts C0..C(n-1); edges only from lower to
    higher index, so acyclicity holds by construction."""
    concepts = ["C%02d" % i for i in range(n_nodes)]
    links = set()
    for i in range(n_nodes):
        for j in range(i + 1, n_nodes):
            if rng.random() < 0.15:
                links.add((concepts[i], concepts[j]))
    return concepts, links
