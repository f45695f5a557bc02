import pytest

from evimap.fixtures import (
    build_fixture_corpus,
    fixture_gazetteer,
    fixture_ontology,
    write_fixture_files,
)
from evimap.normalize import build_dictionary


@pytest.fixture(scope="session")
def corpus():
    return build_fixture_corpus()


@pytest.fixture(scope="session")
def corpus_by_id(corpus):
    return {doc.doc_id: (doc, gold) for doc, gold in corpus}


@pytest.fixture(scope="session")
def ontology():
    return fixture_ontology()


@pytest.fixture(scope="session")
def gazetteer():
    return fixture_gazetteer()


@pytest.fixture(scope="session")
def dictionary(ontology):
    dictionary, rejected = build_dictionary(ontology)
    assert not rejected
    return dictionary


@pytest.fixture(scope="session")
def fixture_files(tmp_path_factory):
    return write_fixture_files(tmp_path_factory.mktemp("fixtures"))
