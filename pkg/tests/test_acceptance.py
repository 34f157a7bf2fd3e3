"""Acceptance suite: one test per criterion, at its stated tolerance.

Each test prints a PASS line so the suite doubles as a checklist.
Run with `pytest tests/test_acceptance.py -v`.
"""
import math
import random
import time

from helpers import random_examples, random_tree
from parsebench.actions import apply_action, initial_state, parse_action, replay
from parsebench.engine import (COMPLETE, ENDLESS_LOOP, default_limits, parse)
from parsebench.evaluator import (CVConfig, cross_validate, evaluate_sentence,
                                  format_report_table, score_corpus, score_pair)
from parsebench.features import (eval_feature, extract_examples,
                                 find_conflicts, parse_feature)
from parsebench.frames import UNAVAILABLE, render_tree
from parsebench.learner import (Leaf, Node, entropy, info_gain, label_entropy,
                                save_structure, train, train_id3,
                                training_stats)


def ok(name):
    print("ACCEPTANCE PASS: %s" % name)


def test_criterion_replay_golden_suite(corpus, bundle, project):
    """Every bundled log replays to a byte-identical tree in < 1 s total."""
    import os
    assert len(corpus) >= 30
    golden_bytes = {}
    for log in corpus:
        with open(os.path.join(project.corpus_dir, log.id + ".log"),
                  encoding="utf-8") as f:
            golden_bytes[log.id] = f.read().split("#TREE\n", 1)[1]
    start = time.monotonic()
    for log in corpus:
        tree, states = replay(log.sentence, log.actions, bundle)
        assert render_tree(tree) == golden_bytes[log.id], log.id
        assert len(states) == len(log.actions)
    elapsed = time.monotonic() - start
    assert elapsed < 1.0, "replay suite took %.3fs" % elapsed
    ok("replay golden suite (%d sentences, byte-identical, %.3fs)"
       % (len(corpus), elapsed))


def test_criterion_training_consistency(corpus, feature_set, bundle, group_config):
    """All four variants: exact 100% training accuracy and gold-tree parses."""
    examples = extract_examples(corpus, feature_set, bundle)
    assert find_conflicts(examples) == []
    for variant in ("tree", "list", "hier", "hybrid"):
        structure = train(variant, examples, group_config)
        stats = training_stats(structure, examples)
        assert stats.training_accuracy == 1.0, variant
        results = []
        for log in corpus:
            outcome = parse(log.sentence, structure, feature_set, bundle)
            assert outcome.status == COMPLETE, (variant, log.id)
            assert outcome.tree == log.gold_tree, (variant, log.id)
            results.append(evaluate_sentence(log, structure, feature_set, bundle))
        report = score_corpus(results)
        assert report.str_and_l == 1.0, variant
        assert report.ops == 1.0, variant
    ok("training consistency: 4 variants at accuracy 1.0, Str&L 1.0 on training set")


def entropy_oracle(counts):
    total = sum(counts)
    return math.log2(total) - sum(c * math.log2(c) for c in counts if c) / total


def gain_oracle(examples, f):
    groups = {}
    for e in examples:
        groups.setdefault(e.vector[f], []).append(e)

    def h(exs):
        counts = {}
        for e in exs:
            counts[e.action] = counts.get(e.action, 0) + 1
        return entropy_oracle(list(counts.values()))

    n = len(examples)
    return h(examples) - sum(len(g) / n * h(g) for g in groups.values())


def test_criterion_learner_oracles():
    """entropy/info_gain vs brute force to 1e-9 on 1000 sets; 50-shuffle
    invariance of ID3."""
    rng = random.Random(101)
    for _ in range(1000):
        examples = random_examples(rng, rng.randint(1, 12), rng.randint(1, 4))
        counts = {}
        for e in examples:
            counts[e.action] = counts.get(e.action, 0) + 1
        cl = [counts[k] for k in sorted(counts)]
        assert abs(entropy(cl) - entropy_oracle(cl)) < 1e-9
        assert abs(label_entropy(examples) - entropy_oracle(cl)) < 1e-9
        f = rng.randrange(len(examples[0].vector))
        assert abs(info_gain(examples, f) - gain_oracle(examples, f)) < 1e-9

    examples = random_examples(rng, 80, 4)
    tree = train_id3(examples)
    reference = save_structure(tree, training_stats(tree, examples))
    for _ in range(50):
        shuffled = examples[:]
        rng.shuffle(shuffled)
        permuted = train_id3(shuffled)
        assert save_structure(permuted, training_stats(permuted, shuffled)) \
            == reference
    ok("learner oracles: 1000 gain checks at 1e-9, ID3 order-invariant over 50 shuffles")


def test_criterion_metric_oracles():
    """score_pair vs independent span comparison on 500 random pairs, exact."""
    rng = random.Random(103)

    def brackets(frame, roles, out):
        if frame.subs and roles != ("DUMMY",):
            toks = set()

            def tokens_of(fr):
                if fr.is_leaf:
                    return set(range(*fr.span)) if fr.span else set()
                t = set()
                for sub in fr.subs:
                    if tuple(sub.roles) != ("DUMMY",):
                        t |= tokens_of(sub.child)
                return t

            toks = tokens_of(frame)
            if toks:
                out.add((min(toks), max(toks) + 1, frame.synt))
        for sub in frame.subs:
            brackets(sub.child, tuple(sub.roles), out)

    checked = 0
    while checked < 500:
        a = random_tree(rng)
        b = random_tree(rng)
        if a.span != b.span:
            continue
        checked += 1
        pair = score_pair(a, b)
        ca, cb = set(), set()
        brackets(a, None, ca)
        brackets(b, None, cb)
        sa = {(s, e) for s, e, _ in ca}
        sb = {(s, e) for s, e, _ in cb}
        assert pair.labeled_matched == len(ca & cb)
        assert pair.matched_spans == len(sa & sb)
        assert pair.system_count == len(ca) and pair.gold_count == len(cb)
        cross = sum(
            1 for (s1, e1) in sa
            if any(s1 < e2 and s2 < e1
                   and not (s1 <= s2 and e2 <= e1)
                   and not (s2 <= s1 and e1 <= e2)
                   for (s2, e2) in sb))
        assert pair.crossings == cross
    ok("metric oracles: 500 random tree pairs match the brute-force scorer exactly")


def test_criterion_fig1_end_to_end(bundle):
    """The reduce example produces the expected verb-phrase fragment and
    the syntactic-class feature reads S-NP on the result."""
    sentence = "John bought a new computer science book today."
    state = initial_state(sentence, bundle)
    for text in ["(S)", "(R 1 TO NP AS PRED)", "(S)", "(S)", "(S)", "(S)", "(S)",
                 "(R 2 TO NOUN AS MOD PRED)", "(S NOUN)",
                 "(R 2 TO NOUN AS MOD PRED)", "(R 3 TO NP AS DET MOD PRED)"]:
        state = apply_action(state, parse_action(text), bundle)
    assert state.stack[-1].surface == "a new computer science book"

    state = apply_action(state, parse_action("(R 2 TO VP AS PRED (OBJ PAT))"),
                         bundle)
    vp = state.stack[-1]
    rendered = render_tree(vp)
    assert rendered.startswith('"bought a new computer science book":')
    assert "synt/sem: S-VP/I-EV-BUY" in rendered
    assert '(PRED) "bought":' in rendered
    assert '(OBJ PAT) "a new computer science book":' in rendered
    assert '(DET) "a":' in rendered
    assert '(PRED) "computer science book":' in rendered

    feature = parse_feature("(SYNT OF OBJ OF -1 AT S-SYNT-ELEM)")
    assert eval_feature(state, feature, bundle) == "S-NP"
    ok("Fig.-1 end-to-end reduce + feature value S-NP")


def test_criterion_cross_validation_harness(corpus, feature_set, bundle,
                                            group_config):
    """k=5 with train sizes (4,8,16): < 30 s, leakage-free, byte-deterministic;
    hybrid's training-set Ops at least matches the plain tree's."""
    cfg = CVConfig(k=5, train_sizes=(4, 8, 16))
    start = time.monotonic()
    first = cross_validate(corpus, cfg, feature_set, bundle, "hybrid", group_config)
    second = cross_validate(corpus, cfg, feature_set, bundle, "hybrid", group_config)
    elapsed = time.monotonic() - start
    assert elapsed < 30.0, "cross-validation took %.1fs" % elapsed

    columns = [(str(s), first.averages[s]) for s in cfg.train_sizes]
    columns2 = [(str(s), second.averages[s]) for s in cfg.train_sizes]
    assert format_report_table(columns) == format_report_table(columns2)

    # explicit leakage re-check over the fold layout
    from parsebench.evaluator import corpus_blocks
    blocks = corpus_blocks(corpus, 5)
    for fold, block in enumerate(blocks):
        pool_ids = {log.id for i, b in enumerate(blocks) if i != fold for log in b}
        assert not ({log.id for log in block} & pool_ids), "leak in fold %d" % fold

    # training-set Ops comparison, hybrid vs plain tree
    examples = extract_examples(corpus, feature_set, bundle)
    hybrid = train("hybrid", examples, group_config)
    tree = train("tree", examples)
    hybrid_report = score_corpus(
        [evaluate_sentence(log, hybrid, feature_set, bundle) for log in corpus])
    tree_report = score_corpus(
        [evaluate_sentence(log, tree, feature_set, bundle) for log in corpus])
    assert hybrid_report.ops >= tree_report.ops
    ok("cross-validation: k=5 x (4,8,16) in %.1fs, deterministic, hybrid Ops %.3f >= tree Ops %.3f"
       % (elapsed, hybrid_report.ops, tree_report.ops))


def test_criterion_loop_safety(bundle, feature_set):
    """A deliberately cyclic model loops out within limits on 100 fuzzed
    sentences; no parse ever exceeds its step budget."""
    cyclic = Node(
        feature_index=0,
        branches={UNAVAILABLE: Leaf("(S)", 1, (("(S)", 1),)),
                  "X": Leaf("(S-BACK)", 1, (("(S-BACK)", 1),))},
        default_branch="X")
    rng = random.Random(107)
    words = sorted(bundle.lexicon)
    for _ in range(100):
        sentence = " ".join(rng.choice(words) for _ in range(rng.randint(1, 9)))
        limits = default_limits(len(sentence.split()))
        outcome = parse(sentence, cyclic, feature_set, bundle, limits)
        assert outcome.status == ENDLESS_LOOP
        assert outcome.steps <= limits.max_steps
    ok("loop safety: 100 fuzzed sentences all detected within budget")
