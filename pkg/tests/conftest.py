import hypothesis
import numpy as np
import pytest

from swiptrelay import PlacementConfig, Scenario, sample_scenario
from swiptrelay import rng as rngmod

hypothesis.settings.register_profile("default", deadline=None, max_examples=60)
hypothesis.settings.register_profile("fast", deadline=None, max_examples=10)
hypothesis.settings.load_profile("default")


@pytest.fixture
def scenario5():
    return sample_scenario(PlacementConfig(k_pairs=5), rngmod.stream(1234, rngmod.SCENARIO, 5, 0))


@pytest.fixture
def mirrored_pair():
    # source and destination mirrored across the boresight
    return Scenario(3.0, np.array([[4.0, 1.5]]), np.array([[4.0, -1.5]]))
