import numpy as np
import pytest

from src.quantum.coherence import CoherenceMeasure
from src.quantum.mub import mubs_prime_power

SEED = 7


@pytest.fixture
def rng():
    return np.random.default_rng(SEED)


@pytest.fixture
def qubit_family():
    return mubs_prime_power(2)


@pytest.fixture(params=["l1", "relent"])
def measure(request):
    return CoherenceMeasure.l1() if request.param == "l1" else CoherenceMeasure.relent()
