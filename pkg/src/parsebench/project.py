"""Project configuration: one JSON file naming every resource the
workbench needs, with paths resolved relative to the file itself."""
from __future__ import annotations

import json
import os
from dataclasses import dataclass
from importlib import resources as importlib_resources

from .engine import Limits, default_limits
from .features import FeatureSet, load_feature_set
from .learner import GroupConfig, load_group_config
from .resources import ResourceBundle, load_bundle


class ProjectError(Exception):
    pass


@dataclass
class Project:
    path: str
    lexicon_path: str
    kb_path: str
    subcat_path: str
    features_path: str
    groups_path: str
    corpus_dir: str
    model_path: str
    max_steps: int  # 0 means per-sentence default
    detect_state_repeat: bool
    bundle: ResourceBundle
    feature_set: FeatureSet
    group_config: GroupConfig

    def limits_for(self, token_count: int) -> Limits:
        if self.max_steps > 0:
            return Limits(self.max_steps, self.detect_state_repeat)
        base = default_limits(token_count)
        return Limits(base.max_steps, self.detect_state_repeat)


def bundled_project_path() -> str:
    return str(importlib_resources.files("parsebench") / "data" / "project.json")


def load_project(path: str | None = None) -> Project:
    """Load and validate a project file; every input file must exist."""
    if path is None:
        path = bundled_project_path()
    try:
        with open(path, encoding="utf-8") as f:
            cfg = json.load(f)
    except OSError as exc:
        raise ProjectError("cannot read project file: %s" % exc)
    except json.JSONDecodeError as exc:
        raise ProjectError("bad project file: %s" % exc)
    root = os.path.dirname(os.path.abspath(path))

    def resolve(key, required=True):
        if key not in cfg:
            raise ProjectError("project file missing %r" % key)
        p = os.path.join(root, cfg[key])
        if required and not os.path.exists(p):
            raise ProjectError("project file references missing %s: %s" % (key, p))
        return p

    lexicon_path = resolve("lexicon")
    kb_path = resolve("kb")
    subcat_path = resolve("subcat")
    features_path = resolve("features")
    groups_path = resolve("groups")
    corpus_dir = resolve("corpus_dir")
    model_path = resolve("model", required=False)  # written by train/retrain
    bundle = load_bundle(lexicon_path, kb_path, subcat_path)
    with open(features_path, encoding="utf-8") as f:
        feature_set = load_feature_set(f.read())
    with open(groups_path, encoding="utf-8") as f:
        group_config = load_group_config(f.read())
    return Project(
        path=os.path.abspath(path),
        lexicon_path=lexicon_path,
        kb_path=kb_path,
        subcat_path=subcat_path,
        features_path=features_path,
        groups_path=groups_path,
        corpus_dir=corpus_dir,
        model_path=model_path,
        max_steps=int(cfg.get("max_steps", 0)),
        detect_state_repeat=bool(cfg.get("detect_state_repeat", True)),
        bundle=bundle,
        feature_set=feature_set,
        group_config=group_config,
    )
