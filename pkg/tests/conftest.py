# Copyright (C) 2025-2026 Kris Kirby, KE4AHR
# tests/conftest.py
# Shared fixtures; long-running acceptance runs are gated behind --runslow
import os

import networkx as nx
import pytest

from qaoatransfer.energy import EnergyModel
from qaoatransfer.graph import Graph


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run slow acceptance tests")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running acceptance test (needs --runslow)")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def ensemble_graph_count():
    """Full ensemble is 11 levels x 10 graphs; CI sets QAOATRANSFER_ENSEMBLE_GRAPHS=44."""
    return int(os.environ.get("QAOATRANSFER_ENSEMBLE_GRAPHS", "110"))


@pytest.fixture
def model():
    return EnergyModel()


@pytest.fixture
def single_edge():
    return Graph(2, [(0, 1)])


@pytest.fixture
def triangle():
    return Graph(3, [(0, 1), (0, 2), (1, 2)])


@pytest.fixture
def k4():
    return Graph.from_networkx(nx.complete_graph(4))


@pytest.fixture
def cycle5():
    return Graph.from_networkx(nx.cycle_graph(5))


@pytest.fixture
def cycle6():
    return Graph.from_networkx(nx.cycle_graph(6))


@pytest.fixture
def star5():
    """Center plus four leaves: only the center has even degree."""
    return Graph(5, [(0, 1), (0, 2), (0, 3), (0, 4)])


@pytest.fixture
def path4():
    return Graph(4, [(0, 1), (1, 2), (2, 3)])
