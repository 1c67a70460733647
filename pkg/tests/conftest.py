import pytest

from hybridsim import corpus_path, desugar, parse


def load_corpus(name: str):
    return parse(corpus_path(name).read_text(encoding="utf-8"))


def load_core(name: str):
    """Corpus unit, desugared."""
    return desugar(load_corpus(name))


@pytest.fixture
def eq1():
    return load_core("eq1")


@pytest.fixture
def ex21():
    return load_core("ex21")


@pytest.fixture
def zeno():
    return load_core("zeno")
