import pytest

from tokenfcm import cases
from tokenfcm.engine import SimulationConfig
from tokenfcm.linguistic import ExpertTally, LinguisticScale, RiskIndexWeights
from tokenfcm.model import CausalArc, RiskModel, RiskNode

# Head-counts of 20 experts, grades s_-2..s_2, per (O, S, D).
DIESEL_TALLIES = {
    1: ([3, 5, 10, 1, 1], [0, 2, 9, 6, 3], [0, 2, 6, 7, 5]),
    2: ([1, 2, 3, 9, 5], [0, 1, 5, 9, 5], [3, 8, 7, 2, 0]),
    3: ([1, 3, 10, 5, 1], [12, 7, 1, 0, 0], [4, 6, 8, 1, 1]),
    4: ([0, 4, 9, 7, 0], [13, 5, 1, 1, 0], [10, 6, 3, 1, 0]),
    5: ([9, 8, 2, 1, 0], [0, 10, 9, 1, 0], [2, 4, 8, 5, 1]),
    6: ([0, 5, 8, 4, 3], [0, 5, 8, 5, 2], [13, 4, 3, 0, 0]),
}

# (source, target, weight, delay in minutes)
DIESEL_ARCS = [
    (1, 2, 0.8, 2), (1, 5, 0.2, 10),
    (2, 1, 0.6, 2), (2, 4, 0.8, 4),
    (3, 2, 0.4, 4), (3, 4, 0.8, 2),
    (4, 3, 0.4, 4), (4, 5, 0.6, 4),
    (5, 4, 0.6, 4), (5, 6, 0.6, 4),
    (6, 1, 0.4, 4), (6, 2, 0.8, 4),
]

PUBLISHED_RPN = (-0.1118, 0.0417, -1.3390, -1.5745, -1.3381, -0.8696)

# Aggregated RPN term sets as printed (rounded; two do not sum to exactly 1).
PUBLISHED_RPN_PLTS = [
    [(-2, 0.08), (-0.59, 0.12), (0, 0.04), (0.13, 0.74), (1.14, 0.02)],
    [(-2, 0.09), (-0.73, 0.03), (0, 0.01), (0.21, 0.8), (1.26, 0.06)],
    [(-2, 0.62), (-0.59, 0.18), (0, 0.02), (0.04, 0.18)],
    [(-2, 0.76), (-0.59, 0.11), (0.08, 0.13)],
    [(-2, 0.53), (-0.89, 0.33), (0, 0.02), (0.13, 0.12)],
    [(-2, 0.43), (-1, 0.06), (0, 0.02), (0.08, 0.49), (1.12, 0.01)],
]

SCALE = LinguisticScale(2)
DIESEL_WEIGHTS = RiskIndexWeights(0.5, 0.35, 0.15)


def tally(counts):
    return ExpertTally(tuple(counts))


def diesel_model(initial=PUBLISHED_RPN):
    nodes = tuple(RiskNode(i, f"DR{i}", v) for i, v in zip(range(1, 7), initial))
    return RiskModel(nodes, tuple(CausalArc(*a) for a in DIESEL_ARCS))


@pytest.fixture
def scale():
    return SCALE


@pytest.fixture
def diesel():
    return diesel_model()


@pytest.fixture
def diesel_config():
    return SimulationConfig(step=2, horizon=50)


@pytest.fixture(scope="session")
def diesel_doc():
    return cases.diesel()


@pytest.fixture(scope="session")
def diesel_published_doc():
    return cases.diesel(published_rpn=True)
