"""Command-line front door: replay, extract, train, parse, eval, serve.

Every command operates on a project file (defaults to the bundled toy
project) and produces byte-identical output on identical inputs; exit
codes are 0 success, 1 verification failure, 2 usage/config error.
"""
from __future__ import annotations

import difflib
import os
import sys

import click

from .actions import ApplyError, MalformedAction, load_corpus, load_log, replay
from .engine import COMPLETE, parse
from .evaluator import (ConfigError, CVConfig, cross_validate,
                        format_report_table, format_report_tsv)
from .features import extract_examples, find_conflicts, format_examples
from .frames import render_tree
from .learner import (VARIANTS, load_structure, save_structure, train,
                      training_stats)
from .project import load_project
from .resources import segment


class Workbench:
    def __init__(self, project_path, seed):
        self.project_path = project_path
        self.seed = seed
        self._project = None

    @property
    def project(self):
        if self._project is None:
            try:
                self._project = load_project(self.project_path)
            except Exception as exc:
                raise click.ClickException("project error: %s" % exc)
        return self._project


@click.group()
@click.option("--project", "project_path", type=click.Path(), default=None,
              help="Project JSON file (default: bundled toy project).")
@click.option("--seed", type=int, default=None,
              help="Reserved; no stochastic steps exist.  Recorded in reports.")
@click.pass_context
def main(ctx, project_path, seed):
    """Deterministic shift-reduce parsing workbench."""
    ctx.obj = Workbench(project_path, seed)


def _corpus(project):
    logs = load_corpus(project.corpus_dir)
    if not logs:
        raise click.ClickException("corpus directory %s has no logs"
                                   % project.corpus_dir)
    return logs


def _print_conflicts(conflicts):
    if not conflicts:
        return
    click.echo("WARNING: %d conflicting vector groups "
               "(identical features, different actions):" % len(conflicts))
    for _, group in conflicts:
        for ex in group:
            click.echo("  %s step %d -> %s"
                       % (ex.provenance[0], ex.provenance[1], ex.action))


@main.command("replay")
@click.argument("sentence_id")
@click.pass_obj
def cmd_replay(wb, sentence_id):
    """Replay one corpus log and diff against its golden tree."""
    project = wb.project
    path = os.path.join(project.corpus_dir, sentence_id + ".log")
    if not os.path.exists(path):
        raise click.UsageError("no log %r in %s" % (sentence_id, project.corpus_dir))
    try:
        log = load_log(path)
        tree, _ = replay(log.sentence, log.actions, project.bundle)
    except MalformedAction as exc:
        click.echo("bad log file: %s" % exc)
        sys.exit(1)
    except ApplyError as exc:
        click.echo("replay failed [%s]: %s" % (exc.code, exc))
        sys.exit(1)
    got = render_tree(tree)
    want = render_tree(log.gold_tree)
    if got == want:
        click.echo("%s: OK (%d actions)" % (sentence_id, len(log.actions)))
        return
    click.echo("%s: MISMATCH" % sentence_id)
    for line in difflib.unified_diff(want.splitlines(), got.splitlines(),
                                     "golden", "replayed", lineterm=""):
        click.echo(line)
    sys.exit(1)


@main.command("extract")
@click.option("--out", "out_path", type=click.Path(), default=None,
              help="Write the tab-separated example set here.")
@click.pass_obj
def cmd_extract(wb, out_path):
    """Extract parse examples from every corpus log."""
    project = wb.project
    logs = _corpus(project)
    examples = extract_examples(logs, project.feature_set, project.bundle)
    _print_conflicts(find_conflicts(examples))
    text = format_examples(examples, project.feature_set)
    if out_path:
        with open(out_path, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
        click.echo("wrote %d examples to %s" % (len(examples), out_path))
    else:
        click.echo(text, nl=False)


@main.command("train")
@click.option("--variant", type=click.Choice(VARIANTS), default="hybrid")
@click.option("--train-ids", default=None,
              help="Comma-separated log ids; default: whole corpus.")
@click.option("--out", "out_path", type=click.Path(), default=None,
              help="Model file (default: the project's model path).")
@click.pass_obj
def cmd_train(wb, variant, train_ids, out_path):
    """Extract examples, train a decision structure, save it."""
    project = wb.project
    logs = _corpus(project)
    if train_ids:
        wanted = [t.strip() for t in train_ids.split(",") if t.strip()]
        by_id = {log.id: log for log in logs}
        missing = [t for t in wanted if t not in by_id]
        if missing:
            raise click.UsageError("unknown log ids: %s" % ", ".join(missing))
        logs = [by_id[t] for t in wanted]
    examples = extract_examples(logs, project.feature_set, project.bundle)
    conflicts = find_conflicts(examples)
    _print_conflicts(conflicts)
    structure = train(variant, examples,
                      project.group_config if variant == "hybrid" else None)
    stats = training_stats(structure, examples)
    path = out_path or project.model_path
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(save_structure(structure, stats))
    click.echo("variant=%s examples=%d nodes=%d depth=%d trainingAccuracy=%.6f"
               % (variant, stats.example_count, stats.node_count, stats.depth,
                  stats.training_accuracy))
    click.echo("model written to %s" % path)


@main.command("parse")
@click.argument("sentence")
@click.option("--model", "model_path", type=click.Path(), default=None,
              help="Model file (default: the project's model path).")
@click.pass_obj
def cmd_parse(wb, sentence, model_path):
    """Parse one sentence with a trained model."""
    project = wb.project
    path = model_path or project.model_path
    if not os.path.exists(path):
        raise click.UsageError("model file %s does not exist; train first" % path)
    with open(path, encoding="utf-8") as f:
        structure, _ = load_structure(f.read())
    limits = project.limits_for(len(segment(sentence)))
    outcome = parse(sentence, structure, project.feature_set, project.bundle,
                    limits)
    if outcome.status == COMPLETE:
        click.echo(render_tree(outcome.tree), nl=False)
        return
    click.echo("%s after %d steps" % (outcome.status, outcome.steps))
    for a in outcome.actions[-5:]:
        click.echo("  ... %s" % a)
    sys.exit(1)


@main.command("eval")
@click.option("--k", type=int, default=5, show_default=True)
@click.option("--train-sizes", default="4,8,16", show_default=True)
@click.option("--variant", type=click.Choice(VARIANTS), default="hybrid")
@click.option("--out-dir", type=click.Path(), default=None,
              help="Write report table and TSV here.")
@click.pass_obj
def cmd_eval(wb, k, train_sizes, variant, out_dir):
    """k-fold cross-validation over the corpus; Table-style report."""
    project = wb.project
    logs = _corpus(project)
    try:
        sizes = tuple(int(t) for t in train_sizes.split(","))
        cfg = CVConfig(k=k, train_sizes=sizes)
        result = cross_validate(logs, cfg, project.feature_set, project.bundle,
                                variant, project.group_config)
    except (ConfigError, ValueError) as exc:
        raise click.UsageError(str(exc))
    columns = [(str(size), result.averages[size]) for size in sizes]
    header = ""
    if wb.seed is not None:
        header = "; seed %d\n" % wb.seed
    table = header + format_report_table(columns)
    tsv = format_report_tsv(columns)
    click.echo(table, nl=False)
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
        base = os.path.join(out_dir, "eval_%s_k%d" % (variant, k))
        with open(base + ".txt", "w", encoding="utf-8", newline="\n") as f:
            f.write(table)
        with open(base + ".tsv", "w", encoding="utf-8", newline="\n") as f:
            f.write(tsv)
        click.echo("reports written to %s.txt and %s.tsv" % (base, base))


@main.command("serve")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8750, show_default=True)
@click.option("--frontend", "frontend_dir", type=click.Path(), default=None,
              help="Directory with the built console (serves / and /ui).")
@click.pass_obj
def cmd_serve(wb, host, port, frontend_dir):
    """Run the interactive training service."""
    import uvicorn

    from .service import create_app
    app = create_app(wb.project, frontend_dir=frontend_dir)
    uvicorn.run(app, host=host, port=port, log_level="warning")


if __name__ == "__main__":
    main()
