import json
from importlib import resources

import numpy as np
import pytest


def random_density_matrix(rng: np.random.Generator, dim: int = 4) -> np.ndarray:
    """Full-rank random density matrix from a Ginibre factor."""
    z = rng.standard_normal((2, dim, dim))
    g = z[0] + 1j * z[1]
    rho = g @ g.conj().T
    return rho / np.trace(rho)


def random_hermitian(rng: np.random.Generator, dim: int = 4,
                     scale: float = 1.0) -> np.ndarray:
    z = rng.standard_normal((2, dim, dim))
    g = (z[0] + 1j * z[1]) * scale
    return (g + g.conj().T) / 2.0


def random_state_vector(rng: np.random.Generator, dim: int = 4) -> np.ndarray:
    z = rng.standard_normal((2, dim))
    v = z[0] + 1j * z[1]
    return v / np.linalg.norm(v)


def load_schema(name: str) -> dict:
    path = resources.files("bellsym") / "schemas" / f"{name}.v1.schema.json"
    return json.loads(path.read_text(encoding="utf-8"))


def assert_valid_for_schema(doc: dict, schema_name: str) -> None:
    jsonschema = pytest.importorskip("jsonschema")
    jsonschema.validate(doc, load_schema(schema_name))


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
