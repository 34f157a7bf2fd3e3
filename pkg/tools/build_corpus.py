#!/usr/bin/env python3
"""Regenerate the bundled corpus logs from their action sequences.

Each sentence's action sequence below is the hand-authored ground truth;
this script replays it against the bundled resources, verifies the frame
invariants, freezes the resulting tree into the log file, and finally
checks the corpus is conflict-free under the bundled feature set.

Run from the repository root:  python3 tools/build_corpus.py
"""
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from parsebench.actions import ActionLog, format_log, replay
from parsebench.features import extract_examples, find_conflicts, load_feature_set
from parsebench.frames import check_frame
from parsebench.resources import load_bundle

DATA = os.path.join(os.path.dirname(__file__), "..", "src", "parsebench", "data")

CORPUS = [
    ("s01", "John bought a book.", [
        "(S)", "(R 1 TO NP AS PRED)", "(S)", "(S)", "(S NOUN)",
        "(R 2 TO NP AS DET PRED)", "(S)",
        "(R 4 TO SNT AS (SUBJ AGENT) PRED (OBJ THEME) DUMMY)", "(DONE)"]),
    ("s02", "John slept.", [
        "(S)", "(R 1 TO NP AS PRED)", "(S)", "(S)",
        "(R 3 TO SNT AS (SUBJ AGENT) PRED DUMMY)", "(DONE)"]),
    ("s03", "Mary sold the car.", [
        "(S)", "(R 1 TO NP AS PRED)", "(S)", "(S)", "(S)",
        "(R 2 TO NP AS DET PRED)", "(S)",
        "(R 4 TO SNT AS (SUBJ AGENT) PRED (OBJ THEME) DUMMY)", "(DONE)"]),
    ("s04", "The man read a letter.", [
        "(S)", "(S)", "(R 2 TO NP AS DET PRED)", "(S)", "(S)", "(S)",
        "(R 2 TO NP AS DET PRED)", "(S)",
        "(R 4 TO SNT AS (SUBJ AGENT) PRED (OBJ THEME) DUMMY)", "(DONE)"]),
    ("s05", "Mary won.", [
        "(S)", "(R 1 TO NP AS PRED)", "(S)", "(S)",
        "(R 3 TO SNT AS (SUBJ AGENT) PRED DUMMY)", "(DONE)"]),
    ("s06", "John likes Mary.", [
        "(S)", "(R 1 TO NP AS PRED)", "(S)", "(S)", "(R 1 TO NP AS PRED)", "(S)",
        "(R 4 TO SNT AS (SUBJ EXPER) PRED (OBJ THEME) DUMMY)", "(DONE)"]),
    ("s07", "The woman saw a dog.", [
        "(S)", "(S)", "(R 2 TO NP AS DET PRED)", "(S TR-VERB)", "(S)", "(S)",
        "(R 2 TO NP AS DET PRED)", "(S)",
        "(R 4 TO SNT AS (SUBJ EXPER) PRED (OBJ THEME) DUMMY)", "(DONE)"]),
    ("s08", "They like apples.", [
        "(S)", "(R 1 TO NP AS PRED)", "(S)", "(S)", "(R 1 TO NP AS PRED)", "(S)",
        "(R 4 TO SNT AS (SUBJ EXPER) PRED (OBJ THEME) DUMMY)", "(DONE)"]),
    ("s09", "The dog slept today.", [
        "(S)", "(S)", "(R 2 TO NP AS DET PRED)", "(S)", "(S)",
        "(R 1 TO ADV AS PRED)", "(S)",
        "(R 4 TO SNT AS (SUBJ AGENT) PRED TIME DUMMY)", "(DONE)"]),
    ("s10", "She read the old book yesterday.", [
        "(S)", "(R 1 TO NP AS PRED)", "(S)", "(S)", "(S)", "(S NOUN)",
        "(R 3 TO NP AS DET MOD PRED)", "(S)", "(R 1 TO ADV AS PRED)", "(S)",
        "(R 5 TO SNT AS (SUBJ AGENT) PRED (OBJ THEME) TIME DUMMY)", "(DONE)"]),
    ("s11", "The student sold his computer.", [
        "(S)", "(S)", "(R 2 TO NP AS DET PRED)", "(S)", "(S)", "(S)",
        "(R 2 TO NP AS DET PRED)", "(S)",
        "(R 4 TO SNT AS (SUBJ AGENT) PRED (OBJ THEME) DUMMY)", "(DONE)"]),
    ("s12", "Mary gave John a letter.", [
        "(S)", "(R 1 TO NP AS PRED)", "(S)", "(S)", "(R 1 TO NP AS PRED)",
        "(S)", "(S)", "(R 2 TO NP AS DET PRED)", "(S)",
        "(R 5 TO SNT AS (SUBJ AGENT) PRED (IOBJ RECIP) (OBJ THEME) DUMMY)",
        "(DONE)"]),
    ("s13", "The students slept.", [
        "(S)", "(S)", "(R 2 TO NP AS DET PRED)", "(S)", "(S)",
        "(R 3 TO SNT AS (SUBJ AGENT) PRED DUMMY)", "(DONE)"]),
    ("s14", "Today John slept.", [
        "(S)", "(R 1 TO ADV AS PRED)", "(S)", "(R 1 TO NP AS PRED)", "(S)", "(S)",
        "(R 4 TO SNT AS TIME (SUBJ AGENT) PRED DUMMY)", "(DONE)"]),
    ("s15", "John bought a new computer science book today.", [
        "(S)", "(R 1 TO NP AS PRED)", "(S)", "(S)", "(S)", "(S)", "(S)",
        "(R 2 TO NOUN AS MOD PRED)", "(S NOUN)", "(R 2 TO NOUN AS MOD PRED)",
        "(R 3 TO NP AS DET MOD PRED)", "(S)", "(R 1 TO ADV AS PRED)", "(S)",
        "(R 5 TO SNT AS (SUBJ AGENT) PRED (OBJ THEME) TIME DUMMY)", "(DONE)"]),
    ("s16", "Mary slept yesterday.", [
        "(S)", "(R 1 TO NP AS PRED)", "(S)", "(S)", "(R 1 TO ADV AS PRED)", "(S)",
        "(R 4 TO SNT AS (SUBJ AGENT) PRED TIME DUMMY)", "(DONE)"]),
    ("s17", "John bought a book in the store.", [
        "(S)", "(R 1 TO NP AS PRED)", "(S)", "(S)", "(S NOUN)",
        "(R 2 TO NP AS DET PRED)",
        "(R 3 TO SNT AS (SUBJ AGENT) PRED (OBJ THEME))",
        "(S)", "(S)", "(S)", "(R 2 TO NP AS DET PRED)",
        "(R 2 TO PP AS PRED POBJ)", "(A -1 TO -2 AS LOC)",
        "(S)", "(A -1 TO -2 AS DUMMY)", "(DONE)"]),
    ("s18", "She wanted to win.", [
        "(S)", "(R 1 TO NP AS PRED)", "(S)", "(S)", "(S)", "(E PRO -4)",
        "(R 3 TO INF AS AUX PRED (SUBJ AGENT))", "(S)",
        "(R 4 TO SNT AS (SUBJ EXPER) PRED (OBJ THEME) DUMMY)", "(DONE)"]),
    ("s19", "John and Mary slept.", [
        "(S)", "(S)", "(S)", "(R 3 TO NP AS PRED CONJ COORD)",
        "(M -1 NUMBER PLUR)", "(S)", "(S)",
        "(R 3 TO SNT AS (SUBJ AGENT) PRED DUMMY)", "(DONE)"]),
    ("s20", "The old man saw Mary.", [
        "(S)", "(S)", "(S)", "(S TR-VERB)", "(S-BACK)",
        "(R 3 TO NP AS DET MOD PRED)", "(S)", "(S)", "(R 1 TO NP AS PRED)",
        "(S)", "(R 4 TO SNT AS (SUBJ EXPER) PRED (OBJ THEME) DUMMY)", "(DONE)"]),
    ("s21", "Orders fell today.", [
        "(S NOUN)", "(R 1 TO NP AS PRED)", "(S)", "(S)", "(R 1 TO ADV AS PRED)",
        "(S)", "(R 4 TO SNT AS (SUBJ THEME) PRED TIME DUMMY)", "(DONE)"]),
    ("s22", "Mary books the car.", [
        "(S)", "(R 1 TO NP AS PRED)", "(S TR-VERB)", "(S)", "(S)",
        "(R 2 TO NP AS DET PRED)", "(S)",
        "(R 4 TO SNT AS (SUBJ AGENT) PRED (OBJ THEME) DUMMY)", "(DONE)"]),
    ("s23", "The students read books.", [
        "(S)", "(S)", "(R 2 TO NP AS DET PRED)", "(S)", "(S NOUN)",
        "(R 1 TO NP AS PRED)", "(S)",
        "(R 4 TO SNT AS (SUBJ AGENT) PRED (OBJ THEME) DUMMY)", "(DONE)"]),
    ("s24", "They bought the apples.", [
        "(S)", "(R 1 TO NP AS PRED)", "(S)", "(S)", "(S)",
        "(R 2 TO NP AS DET PRED)", "(S)",
        "(R 4 TO SNT AS (SUBJ AGENT) PRED (OBJ THEME) DUMMY)", "(DONE)"]),
    ("s25", "John gave Mary the book.", [
        "(S)", "(R 1 TO NP AS PRED)", "(S)", "(S)", "(R 1 TO NP AS PRED)",
        "(S)", "(S NOUN)", "(R 2 TO NP AS DET PRED)", "(S)",
        "(R 5 TO SNT AS (SUBJ AGENT) PRED (IOBJ RECIP) (OBJ THEME) DUMMY)",
        "(DONE)"]),
    ("s26", "Yesterday Mary won.", [
        "(S)", "(R 1 TO ADV AS PRED)", "(S)", "(R 1 TO NP AS PRED)", "(S)", "(S)",
        "(R 4 TO SNT AS TIME (SUBJ AGENT) PRED DUMMY)", "(DONE)"]),
    ("s27", "Mary read the letter in the library.", [
        "(S)", "(R 1 TO NP AS PRED)", "(S)", "(S)", "(S)",
        "(R 2 TO NP AS DET PRED)",
        "(R 3 TO SNT AS (SUBJ AGENT) PRED (OBJ THEME))",
        "(S)", "(S)", "(S)", "(R 2 TO NP AS DET PRED)",
        "(R 2 TO PP AS PRED POBJ)", "(A -1 TO -2 AS LOC)",
        "(S)", "(A -1 TO -2 AS DUMMY)", "(DONE)"]),
    ("s28", "John wanted to sleep.", [
        "(S)", "(R 1 TO NP AS PRED)", "(S)", "(S)", "(S)", "(E PRO -4)",
        "(R 3 TO INF AS AUX PRED (SUBJ AGENT))", "(S)",
        "(R 4 TO SNT AS (SUBJ EXPER) PRED (OBJ THEME) DUMMY)", "(DONE)"]),
    ("s29", "The man and the woman won.", [
        "(S)", "(S)", "(R 2 TO NP AS DET PRED)", "(S)", "(S)", "(S)",
        "(R 2 TO NP AS DET PRED)", "(R 3 TO NP AS PRED CONJ COORD)",
        "(M -1 NUMBER PLUR)", "(S)", "(S)",
        "(R 3 TO SNT AS (SUBJ AGENT) PRED DUMMY)", "(DONE)"]),
    ("s30", "The orders fell.", [
        "(S)", "(S NOUN)", "(R 2 TO NP AS DET PRED)", "(S)", "(S)",
        "(R 3 TO SNT AS (SUBJ THEME) PRED DUMMY)", "(DONE)"]),
    ("s31", "John saw the new car today.", [
        "(S)", "(R 1 TO NP AS PRED)", "(S TR-VERB)", "(S)", "(S)", "(S)",
        "(R 3 TO NP AS DET MOD PRED)", "(S)", "(R 1 TO ADV AS PRED)", "(S)",
        "(R 5 TO SNT AS (SUBJ EXPER) PRED (OBJ THEME) TIME DUMMY)", "(DONE)"]),
    ("s32", "A friend sold the house.", [
        "(S)", "(S)", "(R 2 TO NP AS DET PRED)", "(S)", "(S)", "(S)",
        "(R 2 TO NP AS DET PRED)", "(S)",
        "(R 4 TO SNT AS (SUBJ AGENT) PRED (OBJ THEME) DUMMY)", "(DONE)"]),
]


def main():
    bundle = load_bundle(os.path.join(DATA, "lexicon.sexp"),
                         os.path.join(DATA, "kb.sexp"),
                         os.path.join(DATA, "subcat.sexp"))
    corpus_dir = os.path.join(DATA, "corpus")
    os.makedirs(corpus_dir, exist_ok=True)
    logs = []
    total_actions = 0
    for sid, sentence, actions in CORPUS:
        tree, _ = replay(sentence, actions, bundle)
        check_frame(tree)
        log = ActionLog(sentence=sentence, actions=tuple(actions),
                        gold_tree=tree, id=sid)
        path = os.path.join(corpus_dir, sid + ".log")
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write(format_log(log))
        logs.append(log)
        total_actions += len(actions)
    print("wrote %d logs, %d actions total" % (len(logs), total_actions))

    with open(os.path.join(DATA, "features.sexp"), encoding="utf-8") as f:
        feature_set = load_feature_set(f.read())
    examples = extract_examples(logs, feature_set, bundle)
    conflicts = find_conflicts(examples)
    if conflicts:
        print("CONFLICTS (%d vector groups):" % len(conflicts))
        for vector, group in conflicts:
            print("  vector:", vector)
            for ex in group:
                print("    %s step %d -> %s" % (ex.provenance[0], ex.provenance[1], ex.action))
        sys.exit(1)
    print("%d examples, conflict-free under %d features"
          % (len(examples), len(feature_set)))


if __name__ == "__main__":
    main()
