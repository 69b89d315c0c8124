"""Shared fixtures: small graphs and models with closed-form answers."""

import pytest

from src.activation import build_activation
from src.config import reset_config
from src.graph import complete_graph, empty_graph, path_graph

CONSTANT_SPEC = {"family": "affine", "decomposition": {"a": 0.1, "b": 0.2, "c": 0.3, "d": 0.1}}


def affine_spec(a_slope: float = 0.0, a: float = 0.1, b: float = 0.2, c: float = 0.3, d: float = 0.1) -> dict:
    return {
        "family": "affine",
        "decomposition": {"a": {"base": a, "slope": a_slope}, "b": b, "c": c, "d": d},
    }


@pytest.fixture(autouse=True)
def fresh_config(tmp_path, monkeypatch):
    """Isolate every test from .env files and earlier config instances."""
    monkeypatch.setenv("MRT_OUT_DIR", str(tmp_path / "runs"))
    for key in ("MRT_WORKERS", "MRT_ORACLE_CAP", "MRT_MF_TOL", "MRT_ORACLE_TOL", "MRT_FORMAT"):
        monkeypatch.delenv(key, raising=False)
    reset_config()
    yield
    reset_config()


@pytest.fixture
def single():
    return empty_graph(1)


@pytest.fixture
def constant_single(single):
    return single, build_activation(CONSTANT_SPEC, single)


@pytest.fixture
def path2():
    return path_graph(2)


@pytest.fixture
def complete5():
    g = complete_graph(5)
    return g, build_activation(affine_spec(a_slope=0.01), g)
