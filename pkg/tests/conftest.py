import os

import pytest

from ic_extend.gf_core import load_mat
from ic_extend.problem import load_pattern

DATA_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "data")


def data_path(name: str) -> str:
    return os.path.join(DATA_DIR, name)


@pytest.fixture
def example1_fx():
    return load_pattern(data_path("example1.fx"))


@pytest.fixture
def example1_minimal_fx():
    return load_pattern(data_path("example1_minimal.fx"))


@pytest.fixture
def example1_code():
    return load_mat(data_path("example1.code"))


@pytest.fixture
def example1_bxx():
    return load_pattern(data_path("example1_bxx.fx"))
