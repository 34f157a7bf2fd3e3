import pytest

from parsebench.actions import load_corpus
from parsebench.project import load_project


@pytest.fixture(scope="session")
def project():
    return load_project()


@pytest.fixture(scope="session")
def bundle(project):
    return project.bundle


@pytest.fixture(scope="session")
def feature_set(project):
    return project.feature_set


@pytest.fixture(scope="session")
def group_config(project):
    return project.group_config


@pytest.fixture(scope="session")
def corpus(project):
    return load_corpus(project.corpus_dir)
