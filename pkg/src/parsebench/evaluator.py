"""Bracket-scoring metrics and the k-fold cross-validation harness.

Scoring decisions that the metric names leave open, pinned here for
reproducibility: constituent sets exclude word-level single-token leaves
and frames attached under a bare DUMMY role (punctuation); failed or
looping free parses contribute their partial stack frames' brackets to the
precision denominator and nothing to the numerator; crossings are counted
over distinct system spans.
"""
from __future__ import annotations

from dataclasses import dataclass

from .actions import ActionLog
from .engine import COMPLETE, ENDLESS_LOOP, ParseOutcome, assisted_parse
from .features import extract_examples
from .frames import DUMMY, Frame
from .learner import train


class TokenMismatch(Exception):
    pass


class ConfigError(Exception):
    pass


def constituents(tree: Frame) -> set:
    """(start, end, label) triples for every scoring-relevant frame.

    Scoring spans exclude tokens under bare-DUMMY subframes, so a sentence
    bracket stops before its final period.
    """
    out = set()
    _collect(tree, None, out)
    return out


def _scoring_span(frame):
    if frame.is_leaf:
        return frame.span
    lo = hi = None
    for sub in frame.subs:
        if tuple(sub.roles) == (DUMMY,):
            continue
        span = _scoring_span(sub.child)
        if span is None:
            continue
        lo = span[0] if lo is None else min(lo, span[0])
        hi = span[1] if hi is None else max(hi, span[1])
    return None if lo is None else (lo, hi)


def _collect(frame, roles, out):
    if frame.subs and not (roles is not None and tuple(roles) == (DUMMY,)):
        span = _scoring_span(frame)
        if span is not None:
            out.add((span[0], span[1], frame.synt))
    for sub in frame.subs:
        _collect(sub.child, sub.roles, out)


def leaf_tags(tree: Frame) -> dict:
    """token index -> committed leaf synt, for tagging accuracy."""
    out = {}
    _tags(tree, out)
    return out


def _tags(frame, out):
    if frame.is_leaf and frame.span is not None:
        out[frame.span[0]] = frame.synt
    for sub in frame.subs:
        _tags(sub.child, out)


def _crossing_count(system_spans, gold_spans) -> int:
    """Distinct system spans that overlap a gold span without containment."""
    crossings = 0
    for a, b in system_spans:
        for c, d in gold_spans:
            if a < d and c < b:  # overlap
                if not ((a <= c and d <= b) or (c <= a and b <= d)):
                    crossings += 1
                    break
    return crossings


@dataclass(frozen=True)
class PairScore:
    system_count: int
    gold_count: int
    labeled_matched: int
    system_spans: int
    gold_spans: int
    matched_spans: int
    crossings: int
    words: int
    correct_tags: int


def score_pair(system: Frame, gold: Frame) -> PairScore:
    """Bracket comparison of a completed system parse against gold."""
    if system.span != gold.span:
        raise TokenMismatch(
            "system covers %r, gold covers %r" % (system.span, gold.span))
    sys_c = constituents(system)
    gold_c = constituents(gold)
    sys_spans = {(s, e) for s, e, _ in sys_c}
    gold_spans = {(s, e) for s, e, _ in gold_c}
    gold_t = leaf_tags(gold)
    sys_t = leaf_tags(system)
    correct = sum(1 for i, tag in gold_t.items() if sys_t.get(i) == tag)
    return PairScore(
        system_count=len(sys_c),
        gold_count=len(gold_c),
        labeled_matched=len(sys_c & gold_c),
        system_spans=len(sys_spans),
        gold_spans=len(gold_spans),
        matched_spans=len(sys_spans & gold_spans),
        crossings=_crossing_count(sys_spans, gold_spans),
        words=len(gold_t),
        correct_tags=correct,
    )


def _score_partial(partial_stack, gold: Frame) -> PairScore:
    """Harsh scoring of an incomplete parse: brackets count only against
    the system, never as matches."""
    sys_c = set()
    sys_t = {}
    for frame in partial_stack:
        sys_c |= constituents(frame)
        sys_t.update(leaf_tags(frame))
    gold_c = constituents(gold)
    sys_spans = {(s, e) for s, e, _ in sys_c}
    gold_spans = {(s, e) for s, e, _ in gold_c}
    gold_t = leaf_tags(gold)
    correct = sum(1 for i, tag in gold_t.items() if sys_t.get(i) == tag)
    return PairScore(
        system_count=len(sys_c),
        gold_count=len(gold_c),
        labeled_matched=0,
        system_spans=len(sys_spans),
        gold_spans=len(gold_spans),
        matched_spans=0,
        crossings=_crossing_count(sys_spans, gold_spans),
        words=len(gold_t),
        correct_tags=correct,
    )


@dataclass(frozen=True)
class SentenceResult:
    """Everything the corpus scorer needs for one sentence."""

    log: ActionLog
    predicted: tuple
    logged: tuple
    outcome: ParseOutcome


def evaluate_sentence(log: ActionLog, structure, feature_set, bundle) -> SentenceResult:
    predicted, logged, outcome = assisted_parse(
        log.sentence, log, structure, feature_set, bundle)
    return SentenceResult(log, tuple(predicted), tuple(logged), outcome)


@dataclass(frozen=True)
class MetricsReport:
    precision: float
    recall: float
    labeled_precision: float
    labeled_recall: float
    tagging: float
    crossings_per_sentence: float
    buckets: tuple  # sentence ratios with 0, <=1, <=2, <=3, <=4 crossings
    ops: float
    op_seq: float
    str_and_l: float
    loops: float
    sentence_count: int


def _ratio(n, d):
    return n / d if d else 1.0


def score_corpus(results) -> MetricsReport:
    """Micro-averaged corpus metrics over per-sentence results."""
    if not results:
        raise ConfigError("no sentences to score")
    sys_spans = gold_spans = matched_spans = 0
    sys_lab = gold_lab = matched_lab = 0
    words = correct_tags = 0
    crossings = []
    ops_matched = ops_total = 0
    op_seq_count = 0
    str_l_count = 0
    loops = 0
    for res in results:
        gold = res.log.gold_tree
        if res.outcome.status == COMPLETE:
            pair = score_pair(res.outcome.tree, gold)
        else:
            pair = _score_partial(res.outcome.partial_stack, gold)
            if res.outcome.status == ENDLESS_LOOP:
                loops += 1
        sys_spans += pair.system_spans
        gold_spans += pair.gold_spans
        matched_spans += pair.matched_spans
        sys_lab += pair.system_count
        gold_lab += pair.gold_count
        matched_lab += pair.labeled_matched
        words += pair.words
        correct_tags += pair.correct_tags
        crossings.append(pair.crossings)
        step_hits = sum(1 for p, l in zip(res.predicted, res.logged) if p == l)
        ops_matched += step_hits
        ops_total += len(res.logged)
        seq_ok = step_hits == len(res.logged)
        if seq_ok:
            op_seq_count += 1
        str_l = (res.outcome.status == COMPLETE
                 and constituents(res.outcome.tree) == constituents(gold)
                 and leaf_tags(res.outcome.tree) == leaf_tags(gold))
        if str_l:
            str_l_count += 1
        # a fully predicted sequence must reproduce the gold tree
        assert not seq_ok or str_l, "OpSeq without Str&L on %r" % res.log.id
    n = len(results)
    buckets = tuple(
        sum(1 for c in crossings if c <= limit) / n for limit in range(5))
    report = MetricsReport(
        precision=_ratio(matched_spans, sys_spans),
        recall=_ratio(matched_spans, gold_spans),
        labeled_precision=_ratio(matched_lab, sys_lab),
        labeled_recall=_ratio(matched_lab, gold_lab),
        tagging=_ratio(correct_tags, words),
        crossings_per_sentence=sum(crossings) / n,
        buckets=buckets,
        ops=_ratio(ops_matched, ops_total),
        op_seq=op_seq_count / n,
        str_and_l=str_l_count / n,
        loops=loops,
        sentence_count=n,
    )
    _check_report(report)
    return report


def _check_report(report):
    ratios = (report.precision, report.recall, report.labeled_precision,
              report.labeled_recall, report.tagging, report.ops,
              report.op_seq, report.str_and_l) + report.buckets
    for r in ratios:
        assert 0.0 <= r <= 1.0, "ratio out of range: %r" % r
    for a, b in zip(report.buckets, report.buckets[1:]):
        assert a <= b, "crossing buckets must be monotone"


# ---------------------------------------------------------------------------
# cross-validation

@dataclass(frozen=True)
class CVConfig:
    k: int
    train_sizes: tuple

    def __post_init__(self):
        if self.k < 2:
            raise ConfigError("k must be >= 2")


def corpus_blocks(corpus, k):
    """Corpus-order blocks; the first len(corpus) % k blocks get one extra."""
    n = len(corpus)
    base, extra = divmod(n, k)
    blocks = []
    start = 0
    for i in range(k):
        size = base + (1 if i < extra else 0)
        blocks.append(corpus[start:start + size])
        start += size
    return blocks


@dataclass(frozen=True)
class CVResult:
    per_fold: dict  # (fold, train_size) -> MetricsReport
    averages: dict  # train_size -> MetricsReport


def cross_validate(corpus, cfg: CVConfig, feature_set, bundle, variant,
                   group_config=None) -> CVResult:
    """Train on pool prefixes per fold, test on the held-out block.

    No test sentence ever appears in its fold's training set (asserted).
    """
    if len(corpus) < cfg.k:
        raise ConfigError("corpus smaller than k")
    blocks = corpus_blocks(corpus, cfg.k)
    per_fold = {}
    for fold, test_block in enumerate(blocks):
        pool = []
        for i, block in enumerate(blocks):
            if i != fold:
                pool.extend(block)
        test_ids = {log.id for log in test_block}
        for size in cfg.train_sizes:
            if size > len(pool):
                raise ConfigError(
                    "train size %d exceeds pool of %d" % (size, len(pool)))
            train_logs = pool[:size]
            assert not ({log.id for log in train_logs} & test_ids), \
                "training/test leakage in fold %d" % fold
            examples = extract_examples(train_logs, feature_set, bundle)
            structure = train(variant, examples, group_config)
            results = [evaluate_sentence(log, structure, feature_set, bundle)
                       for log in test_block]
            per_fold[(fold, size)] = score_corpus(results)
    averages = {}
    for size in cfg.train_sizes:
        averages[size] = average_reports(
            [per_fold[(fold, size)] for fold in range(cfg.k)])
    return CVResult(per_fold, averages)


def average_reports(reports) -> MetricsReport:
    """Arithmetic mean of ratio fields; loops and sentences summed."""
    n = len(reports)

    def mean(get):
        return sum(get(r) for r in reports) / n

    return MetricsReport(
        precision=mean(lambda r: r.precision),
        recall=mean(lambda r: r.recall),
        labeled_precision=mean(lambda r: r.labeled_precision),
        labeled_recall=mean(lambda r: r.labeled_recall),
        tagging=mean(lambda r: r.tagging),
        crossings_per_sentence=mean(lambda r: r.crossings_per_sentence),
        buckets=tuple(mean(lambda r, i=i: r.buckets[i]) for i in range(5)),
        ops=mean(lambda r: r.ops),
        op_seq=mean(lambda r: r.op_seq),
        str_and_l=mean(lambda r: r.str_and_l),
        loops=sum(r.loops for r in reports),
        sentence_count=sum(r.sentence_count for r in reports),
    )


# ---------------------------------------------------------------------------
# report formatting

_ROWS = (
    ("Prec.", "precision", "pct"),
    ("Recall", "recall", "pct"),
    ("L. pr.", "labeled_precision", "pct"),
    ("L. rec.", "labeled_recall", "pct"),
    ("Tagging", "tagging", "pct"),
    ("Cr/snt", "crossings_per_sentence", "num"),
    ("0 cr", 0, "bucket"),
    ("<=1 cr", 1, "bucket"),
    ("<=2 cr", 2, "bucket"),
    ("<=3 cr", 3, "bucket"),
    ("<=4 cr", 4, "bucket"),
    ("Ops", "ops", "pct"),
    ("OpSeq", "op_seq", "pct"),
    ("Str&L", "str_and_l", "pct"),
    ("Loops", "loops", "int"),
)


def _cell(report, key, kind):
    if kind == "pct":
        return "%.1f%%" % (100.0 * getattr(report, key))
    if kind == "num":
        return "%.2f" % getattr(report, key)
    if kind == "bucket":
        return "%.1f%%" % (100.0 * report.buckets[key])
    return "%d" % getattr(report, key)


def format_report_table(columns) -> str:
    """Aligned plain-text table; columns is [(title, MetricsReport), ...]."""
    titles = [title for title, _ in columns]
    header = ["Tr. snt."] + titles
    rows = [header]
    for label, key, kind in _ROWS:
        rows.append([label] + [_cell(report, key, kind) for _, report in columns])
    widths = [max(len(row[i]) for row in rows) for i in range(len(header))]
    lines = []
    for row in rows:
        cells = [row[0].ljust(widths[0])]
        cells += [row[i].rjust(widths[i]) for i in range(1, len(row))]
        lines.append("  ".join(cells).rstrip())
    return "\n".join(lines) + "\n"


def format_report_tsv(columns) -> str:
    """Machine-readable companion to the table."""
    lines = ["metric\t" + "\t".join(title for title, _ in columns)]
    for label, key, kind in _ROWS:
        cells = []
        for _, report in columns:
            if kind == "bucket":
                cells.append(repr(report.buckets[key]))
            elif kind == "int":
                cells.append(str(getattr(report, key)))
            else:
                cells.append(repr(getattr(report, key)))
        lines.append(label + "\t" + "\t".join(cells))
    return "\n".join(lines) + "\n"
