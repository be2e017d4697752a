import json
from pathlib import Path

import pytest

DATA = Path(__file__).resolve().parents[1] / "src" / "symclust" / "data"
CORPUS = DATA / "corpus"
DATASETS = DATA / "datasets"
FIXTURES = DATA / "fixtures"
EXAMPLES = DATA / "examples"

GOOD_ARRAY = ("good_array_sorted", "good_array_count", "good_array_max")


def corpus_source(name: str) -> str:
    return (CORPUS / f"{name}.snip").read_text()


def corpus_pairs():
    return json.loads((CORPUS / "pairs.json").read_text())["pairs"]


def corpus_names():
    return sorted(p.stem for p in CORPUS.glob("*.snip"))


@pytest.fixture
def data_dir():
    return DATA
