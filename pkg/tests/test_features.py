import random

import pytest

from parsebench.actions import apply_action, initial_state, parse_action
from parsebench.features import (Agreement, Exists, MalformedFeature,
                                 ParseExample, Select, SemRole, eval_feature,
                                 eval_vector, extract_examples, feature_text,
                                 find_conflicts, format_examples,
                                 load_feature_set, make_feature_set,
                                 parse_examples_text, parse_feature)
from parsebench.frames import UNAVAILABLE, ParseState, TreePath


def test_parse_select_paper_example():
    f = parse_feature("(SYNT OF OBJ OF -1 AT S-SYNT-ELEM)")
    assert f == Select("SYNT", TreePath(-1, ("OBJ",)), None, "S-SYNT-ELEM")
    assert feature_text(f) == "(SYNT OF OBJ OF -1 AT S-SYNT-ELEM)"


def test_parse_exists_and_positions():
    assert parse_feature("(EXISTS OBJ OF -1)") == Exists(TreePath(-1, ("OBJ",)))
    assert parse_feature("(AGREEMENT -2 -1)") == Agreement(-2, -1)
    assert parse_feature("(SEMROLE -1 -2)") == SemRole(-1, -2)


def test_parse_alt_filter():
    f = parse_feature("(SYNT OF (ALT S-ADV) OF 1 AT S-SYNT-ELEM)")
    assert f == Select("SYNT", TreePath(1), "S-ADV", "S-SYNT-ELEM")
    assert feature_text(f) == "(SYNT OF (ALT S-ADV) OF 1 AT S-SYNT-ELEM)"


def test_parse_feature_rejects_malformed():
    for text in ["(SYNT OF)", "(SYNT -1)", "(LEX OF -1 AT S-NP)",
                 "(EXISTS)", "(AGREEMENT -1)", "(SEMROLE 0 -1)",
                 "(WIBBLE OF -1)", "(SYNT OF OBJ OF 0)"]:
        with pytest.raises(MalformedFeature):
            parse_feature(text)


def fig1_state(bundle):
    """Stack [NP(John), bought, NP(a new computer science book)]."""
    state = initial_state("John bought a new computer science book today.", bundle)
    for text in ["(S)", "(R 1 TO NP AS PRED)", "(S)", "(S)", "(S)", "(S)", "(S)",
                 "(R 2 TO NOUN AS MOD PRED)", "(S NOUN)", "(R 2 TO NOUN AS MOD PRED)",
                 "(R 3 TO NP AS DET MOD PRED)"]:
        state = apply_action(state, parse_action(text), bundle)
    return state


def test_section3_feature_on_target_state(bundle):
    state = fig1_state(bundle)
    state = apply_action(state, parse_action("(R 2 TO VP AS PRED (OBJ PAT))"),
                         bundle)
    f = parse_feature("(SYNT OF OBJ OF -1 AT S-SYNT-ELEM)")
    assert eval_feature(state, f, bundle) == "S-NP"


def test_features_on_empty_state(bundle):
    empty = ParseState()
    for text in ["(SYNT OF -1 AT S-SYNT-ELEM)", "(LEX OF 1)",
                 "(AGREEMENT -2 -1)", "(SEMROLE -1 -2)"]:
        assert eval_feature(empty, parse_feature(text), bundle) == UNAVAILABLE
    assert eval_feature(empty, parse_feature("(EXISTS -1)"), bundle) == "FALSE"


def test_agreement_compatibility(bundle):
    state = initial_state("John likes Mary.", bundle)
    state = apply_action(state, parse_action("(S)"), bundle)
    state = apply_action(state, parse_action("(S)"), bundle)
    # John (3 sing) vs likes (3 sing)
    assert eval_feature(state, parse_feature("(AGREEMENT -2 -1)"), bundle) == "TRUE"
    plur = initial_state("They likes Mary.", bundle)
    plur = apply_action(plur, parse_action("(S)"), bundle)
    plur = apply_action(plur, parse_action("(S)"), bundle)
    assert eval_feature(plur, parse_feature("(AGREEMENT -2 -1)"), bundle) == "FALSE"
    # UNAVAILABLE fields are compatible with anything
    base = initial_state("They like Mary.", bundle)
    base = apply_action(base, parse_action("(S)"), bundle)
    base = apply_action(base, parse_action("(S)"), bundle)
    assert eval_feature(base, parse_feature("(AGREEMENT -2 -1)"), bundle) == "TRUE"


def test_semrole_feature(bundle):
    state = fig1_state(bundle)
    # semantic role of frame -1 (the NP) with respect to frame -2 (bought)
    assert eval_feature(state, parse_feature("(SEMROLE -1 -2)"), bundle) == "THEME"
    assert eval_feature(state, parse_feature("(SEMROLE -3 -2)"), bundle) == "AGENT"


def test_alt_filter_selects_adverb_alternative(bundle):
    state = initial_state("today John slept.", bundle)
    f = parse_feature("(SYNT OF (ALT S-ADV) OF 1 AT S-SYNT-ELEM)")
    assert eval_feature(state, f, bundle) == "S-ADV"
    state2 = initial_state("John slept.", bundle)
    assert eval_feature(state2, f, bundle) == UNAVAILABLE


def test_tense_number_selectors(bundle):
    state = initial_state("John bought a book.", bundle)
    state = apply_action(state, parse_action("(S)"), bundle)
    state = apply_action(state, parse_action("(S)"), bundle)
    assert eval_feature(state, parse_feature("(TENSE OF -1)"), bundle) == "PAST_TENSE"
    assert eval_feature(state, parse_feature("(NUMBER OF -2)"), bundle) == "SING"
    assert eval_feature(state, parse_feature("(PERSON OF -2)"), bundle) == "3"
    assert eval_feature(state, parse_feature("(SURF OF -1)"), bundle) == "bought"


def test_eval_vector_shape(bundle, feature_set):
    state = initial_state("John slept.", bundle)
    empty = make_feature_set([])
    assert eval_vector(state, empty, bundle) == ()
    vec = eval_vector(state, feature_set, bundle)
    assert len(vec) == len(feature_set)


def test_eval_totality_fuzz(corpus, bundle, feature_set):
    """Random prefixes of logged action sequences never make eval raise."""
    rng = random.Random(23)
    texts = ["(SYNT OF OBJ OF -7 AT S-SYNT-ELEM)", "(SEM OF MOD OF 4 AT C-SEM-ELEM)",
             "(LEX OF PRED OF -2)", "(EXISTS COORD OF 3)", "(AGREEMENT -9 9)",
             "(SEMROLE 2 -6)", "(SYNT OF (ALT S-PUNCT) OF 1 AT S-SYNT-ELEM)",
             "(SYNT OF -1 AT I-EN-BOOK)"]
    fuzz = make_feature_set([parse_feature(t) for t in texts])
    for _ in range(60):
        log = rng.choice(corpus)
        cut = rng.randint(0, len(log.actions))
        state = initial_state(log.sentence, bundle)
        for text in log.actions[:cut]:
            state = apply_action(state, parse_action(text), bundle)
        v1 = eval_vector(state, fuzz, bundle)
        v2 = eval_vector(state, fuzz, bundle)
        assert v1 == v2  # purity: repeated evaluation identical


def test_extract_one_example_per_action(corpus, feature_set, bundle):
    log = corpus[0]
    examples = extract_examples([log], feature_set, bundle)
    assert len(examples) == len(log.actions)
    assert [ex.action for ex in examples] == list(log.actions)
    assert all(len(ex.vector) == len(feature_set) for ex in examples)
    assert examples[0].provenance == (log.id, 0)
    assert extract_examples([], feature_set, bundle) == []


def test_extraction_labels_stable_under_feature_change(corpus, bundle, feature_set):
    small = make_feature_set([parse_feature("(EXISTS 1)")])
    a = extract_examples(corpus[:5], feature_set, bundle)
    b = extract_examples(corpus[:5], small, bundle)
    assert [ex.action for ex in a] == [ex.action for ex in b]
    assert [ex.vector for ex in a] != [ex.vector for ex in b]


def test_bundled_corpus_conflict_free(corpus, feature_set, bundle):
    examples = extract_examples(corpus, feature_set, bundle)
    assert find_conflicts(examples) == []


def test_find_conflicts_reports_pairs():
    a = ParseExample(("X",), "(S)", ("a", 0))
    b = ParseExample(("X",), "(DONE)", ("b", 1))
    c = ParseExample(("Y",), "(S)", ("c", 2))
    conflicts = find_conflicts([a, b, c])
    assert len(conflicts) == 1
    vector, group = conflicts[0]
    assert vector == ("X",)
    assert {ex.action for ex in group} == {"(S)", "(DONE)"}


def test_example_file_round_trip(corpus, feature_set, bundle):
    examples = extract_examples(corpus[:3], feature_set, bundle)
    text = format_examples(examples, feature_set)
    back = parse_examples_text(text)
    assert [ex.vector for ex in back] == [ex.vector for ex in examples]
    assert [ex.action for ex in back] == [ex.action for ex in examples]


def test_duplicate_features_rejected():
    f = parse_feature("(EXISTS 1)")
    with pytest.raises(MalformedFeature):
        make_feature_set([f, f])


def test_load_feature_set_skips_comments():
    fs = load_feature_set("; comment\n(EXISTS 1)\n\n(LEX OF -1) ; tail\n")
    assert fs.texts == ("(EXISTS 1)", "(LEX OF -1)")
