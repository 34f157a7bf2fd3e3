import random

import pytest

from helpers import random_tree
from parsebench.engine import COMPLETE, ENDLESS_LOOP, ParseOutcome
from parsebench.evaluator import (ConfigError, CVConfig, MetricsReport,
                                  SentenceResult, TokenMismatch,
                                  average_reports, constituents,
                                  corpus_blocks, cross_validate,
                                  evaluate_sentence, format_report_table,
                                  format_report_tsv, leaf_tags, score_corpus,
                                  score_pair, _crossing_count)
from parsebench.features import extract_examples
from parsebench.frames import DUMMY, Frame
from parsebench.learner import train


def test_constituents_fig2_hand_count(corpus):
    fig2 = next(log for log in corpus if log.sentence.startswith("John bought a new"))
    got = constituents(fig2.gold_tree)
    # tokens: John0 bought1 a2 new3 computer4 science5 book6 today7 .8
    # the DUMMY period is excluded from the sentence bracket
    assert got == {
        (0, 8, "S-SNT"),
        (0, 1, "S-NP"),
        (2, 7, "S-NP"),
        (4, 6, "S-NOUN"),
        (4, 7, "S-NOUN"),
        (7, 8, "S-ADV"),
    }


def test_constituents_single_word():
    leaf = Frame(surface="hi", lex="hi", synt="S-NOUN", span=(0, 1))
    assert constituents(leaf) == set()
    assert leaf_tags(leaf) == {0: "S-NOUN"}


def oracle_constituents(tree):
    """Independent walk: token sets instead of span hulls."""
    out = set()

    def tokens_of(frame):
        if frame.is_leaf:
            return set(range(*frame.span)) if frame.span else set()
        toks = set()
        for sub in frame.subs:
            if tuple(sub.roles) == (DUMMY,):
                continue
            toks |= tokens_of(sub.child)
        return toks

    def walk(frame, roles):
        if frame.subs and roles != (DUMMY,):
            toks = tokens_of(frame)
            if toks:
                out.add((min(toks), max(toks) + 1, frame.synt))
        for sub in frame.subs:
            walk(sub.child, tuple(sub.roles))

    walk(tree, None)
    return out


def test_constituents_matches_oracle_on_random_trees():
    rng = random.Random(19)
    for _ in range(200):
        tree = random_tree(rng)
        assert constituents(tree) == oracle_constituents(tree)


def test_crossing_counting():
    assert _crossing_count({(2, 4)}, {(0, 3), (3, 5)}) == 1
    assert _crossing_count({(0, 2)}, {(0, 5), (0, 1), (2, 5)}) == 0
    assert _crossing_count({(0, 5), (0, 2), (2, 5)},
                           {(0, 5), (0, 1), (2, 5)}) == 0


def test_score_pair_identity(corpus):
    gold = corpus[0].gold_tree
    pair = score_pair(gold, gold)
    assert pair.matched_spans == pair.system_spans == pair.gold_spans
    assert pair.labeled_matched == pair.system_count == pair.gold_count
    assert pair.crossings == 0
    assert pair.correct_tags == pair.words


def test_score_pair_swap_symmetry():
    rng = random.Random(21)
    for _ in range(50):
        a = random_tree(rng)
        b = random_tree(rng)
        if a.span != b.span:
            continue
        ab = score_pair(a, b)
        ba = score_pair(b, a)
        assert ab.matched_spans == ba.matched_spans
        assert ab.labeled_matched == ba.labeled_matched
        assert ab.system_spans == ba.gold_spans
        assert ab.gold_spans == ba.system_spans


def test_score_pair_brute_force_oracle_500_random_pairs():
    rng = random.Random(25)
    checked = 0
    while checked < 500:
        a = random_tree(rng)
        b = random_tree(rng)
        if a.span != b.span:
            continue
        checked += 1
        pair = score_pair(a, b)
        ca, cb = oracle_constituents(a), oracle_constituents(b)
        sa = {(s, e) for s, e, _ in ca}
        sb = {(s, e) for s, e, _ in cb}
        assert pair.labeled_matched == len(ca & cb)
        assert pair.matched_spans == len(sa & sb)
        assert pair.system_count == len(ca)
        assert pair.gold_count == len(cb)
        crossings = 0
        for (s1, e1) in sa:
            if any(s1 < e2 and s2 < e1
                   and not (s1 <= s2 and e2 <= e1)
                   and not (s2 <= s1 and e1 <= e2)
                   for (s2, e2) in sb):
                crossings += 1
        assert pair.crossings == crossings


def test_score_pair_token_mismatch(corpus):
    with pytest.raises(TokenMismatch):
        score_pair(corpus[0].gold_tree, corpus[1].gold_tree)


def fake_result(log, hits, total, outcome):
    predicted = ["(S)"] * total
    logged = list(predicted)
    for i in range(total - hits):
        predicted[i] = "(S-BACK)"
    return SentenceResult(log=log, predicted=tuple(predicted),
                          logged=tuple(logged), outcome=outcome)


def complete_outcome(log):
    return ParseOutcome(COMPLETE, log.gold_tree, log.actions, len(log.actions),
                        (log.gold_tree,))


def test_score_corpus_micro_average_ops(corpus):
    r1 = fake_result(corpus[0], 38, 43, complete_outcome(corpus[0]))
    r2 = fake_result(corpus[1], 5, 7, complete_outcome(corpus[1]))
    report = score_corpus([r1, r2])
    assert report.ops == 43 / 50
    assert report.op_seq == 0.0
    assert report.str_and_l == 1.0
    assert report.sentence_count == 2


def test_score_corpus_all_perfect(corpus):
    results = [fake_result(log, len(log.actions), len(log.actions),
                           complete_outcome(log)) for log in corpus[:8]]
    report = score_corpus(results)
    assert report.precision == report.recall == 1.0
    assert report.labeled_precision == report.labeled_recall == 1.0
    assert report.tagging == 1.0
    assert report.ops == report.op_seq == report.str_and_l == 1.0
    assert report.crossings_per_sentence == 0.0
    assert report.buckets == (1.0,) * 5
    assert report.loops == 0


def test_score_corpus_loop_counts_and_harsh_precision(corpus):
    log = corpus[0]
    partial = (log.gold_tree,)  # partial frames match gold exactly, but
    looped = ParseOutcome(ENDLESS_LOOP, None, (), 5, partial)
    results = [fake_result(log, 0, len(log.actions), looped)]
    results += [fake_result(l, len(l.actions), len(l.actions), complete_outcome(l))
                for l in corpus[1:16]]
    report = score_corpus(results)
    assert report.loops == 1
    assert report.op_seq <= 15 / 16
    # the looped sentence contributes its brackets only to the denominator
    assert report.precision < 1.0
    assert report.recall < 1.0


def test_bucket_monotonicity_random_reports(corpus, feature_set, bundle):
    examples = extract_examples(corpus[:6], feature_set, bundle)
    structure = train("tree", examples)
    results = [evaluate_sentence(log, structure, feature_set, bundle)
               for log in corpus]
    report = score_corpus(results)
    for a, b in zip(report.buckets, report.buckets[1:]):
        assert a <= b
    assert report.buckets[4] <= 1.0


def test_corpus_blocks_partition():
    blocks = corpus_blocks(list(range(10)), 4)
    assert [len(b) for b in blocks] == [3, 3, 2, 2]
    assert sum(blocks, []) == list(range(10))


def test_cross_validate_each_sentence_tested_once(corpus, feature_set, bundle,
                                                  group_config):
    cfg = CVConfig(k=2, train_sizes=(2,))
    result = cross_validate(corpus[:4], cfg, feature_set, bundle, "tree",
                            group_config)
    total = sum(result.per_fold[(f, 2)].sentence_count for f in range(2))
    assert total == 4
    assert result.averages[2].sentence_count == 4


def test_cross_validate_rejects_oversized_train(corpus, feature_set, bundle,
                                                group_config):
    cfg = CVConfig(k=2, train_sizes=(100,))
    with pytest.raises(ConfigError):
        cross_validate(corpus[:4], cfg, feature_set, bundle, "tree", group_config)
    with pytest.raises(ConfigError):
        CVConfig(k=1, train_sizes=(1,))


def test_fold_averaging_matches_recomputation(corpus, feature_set, bundle,
                                              group_config):
    cfg = CVConfig(k=3, train_sizes=(4,))
    result = cross_validate(corpus[:12], cfg, feature_set, bundle, "hier",
                            group_config)
    reports = [result.per_fold[(f, 4)] for f in range(3)]
    avg = result.averages[4]
    assert avg == average_reports(reports)
    assert abs(avg.precision - sum(r.precision for r in reports) / 3) < 1e-12
    assert avg.loops == sum(r.loops for r in reports)


def test_report_formatting_deterministic():
    report = MetricsReport(precision=0.851, recall=0.828,
                           labeled_precision=0.772, labeled_recall=0.75,
                           tagging=0.966, crossings_per_sentence=2.5,
                           buckets=(0.276, 0.441, 0.614, 0.724, 0.849),
                           ops=0.791, op_seq=0.018, str_and_l=0.055,
                           loops=13, sentence_count=272)
    table = format_report_table([("16", report)])
    assert "Prec." in table and "85.1%" in table
    assert "Cr/snt" in table and "2.50" in table
    assert "Loops" in table and "13" in table
    assert table == format_report_table([("16", report)])
    tsv = format_report_tsv([("16", report)])
    assert tsv.splitlines()[0] == "metric\t16"
