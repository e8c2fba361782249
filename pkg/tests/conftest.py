import sys
from pathlib import Path

import pytest

REPO = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(Path(__file__).resolve().parent))

from clfbench.data import load_dataset, encode_nominal_to_binary


@pytest.fixture(scope="session")
def uci_dir() -> Path:
    return REPO / "data" / "uci"


@pytest.fixture(scope="session")
def iris(uci_dir):
    return encode_nominal_to_binary(load_dataset(uci_dir / "iris.arff"))


@pytest.fixture(scope="session")
def wine(uci_dir):
    return encode_nominal_to_binary(load_dataset(uci_dir / "wine.arff"))


@pytest.fixture(scope="session")
def breast_cancer(uci_dir):
    return encode_nominal_to_binary(load_dataset(uci_dir / "breast_cancer.arff"))
