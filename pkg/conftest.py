import json

import numpy as np
import pytest

from commutation.algebra import tensor_double
from commutation.contextuality import fixture_matrix, load_fixtures
from commutation.json_utils import matrix_to_json


@pytest.fixture
def fixtures():
    return load_fixtures()


@pytest.fixture
def mu1():
    return fixture_matrix("mu1")


@pytest.fixture
def mu2():
    return fixture_matrix("mu2")


@pytest.fixture
def mu3():
    return fixture_matrix("mu3")


@pytest.fixture
def pm_base():
    return fixture_matrix("peres_mermin_base")


@pytest.fixture
def pm_matrix(pm_base):
    return tensor_double(pm_base)


@pytest.fixture
def rng():
    return np.random.default_rng(20240517)


@pytest.fixture
def matrix_file(tmp_path):
    """Writes a matrix (or raw JSON object) to disk and returns the path."""
    def write(matrix, name="mu.json"):
        path = tmp_path / name
        obj = matrix if isinstance(matrix, dict) else matrix_to_json(matrix)
        path.write_text(json.dumps(obj), encoding="utf-8")
        return str(path)
    return write
