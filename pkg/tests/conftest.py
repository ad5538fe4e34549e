import pathlib

import pytest

from dartomp.pipeline import load

CORPUS = pathlib.Path(__file__).parent / "corpus"


def corpus_path(group: str, name: str) -> pathlib.Path:
    return CORPUS / group / name


def corpus_text(group: str, name: str) -> str:
    return corpus_path(group, name).read_text()


def load_corpus(group: str, name: str, **kw):
    return load(path=str(corpus_path(group, name)), **kw)


def load_text(text: str, path: str = "snippet.c", **kw):
    return load(path=path, text=text, **kw)


@pytest.fixture
def tmp_c(tmp_path):
    """Write a snippet to a temp .c file and return its path."""

    def write(text: str, name: str = "input.c") -> pathlib.Path:
        p = tmp_path / name
        p.write_text(text)
        return p

    return write
