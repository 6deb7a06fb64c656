import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import config
from modules.blaschke import NodeSet


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture(autouse=True)
def reset_threads(monkeypatch):
    monkeypatch.delenv("BLASCHKE_LAB_THREADS", raising=False)
    config.set_threads(None)
    yield
    config.set_threads(None)


def random_nodes(rng, n, r_max=0.9, multiplicities=False) -> NodeSet:
    """Random node set with n nodes counted with multiplicity."""
    nodes = []
    remaining = n
    while remaining > 0:
        mult = int(rng.integers(1, min(3, remaining) + 1)) if multiplicities else 1
        lam = r_max * np.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform())
        nodes.append((lam, mult))
        remaining -= mult
    return NodeSet(tuple(nodes))


def separated_nodes(rng, n, r_min=0.1, r_max=0.7) -> NodeSet:
    """Distinct nodes on separate rays, well conditioned for Pick problems."""
    angles = 2 * np.pi * (np.arange(n) + 0.3 * rng.uniform(size=n)) / n
    moduli = rng.uniform(r_min, r_max, size=n)
    return NodeSet.from_points(moduli * np.exp(1j * angles))
