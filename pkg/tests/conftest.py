from pathlib import Path

import pytest

from unithood import read_parse_file

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def sample_sentence():
    with open(FIXTURES / "sample_parse.tsv", encoding="utf-8") as handle:
        sentences = read_parse_file(handle)
    assert len(sentences) == 1
    return sentences[0]
