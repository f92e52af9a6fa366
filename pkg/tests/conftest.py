import random

import pytest

from fatlab import fixtures


@pytest.fixture
def rng():
    return random.Random(0xF47)


@pytest.fixture(params=["flat-z2", "nonflat-cyclic2", "nonflat-pair2"])
def any_ruth(request):
    return fixtures.named_ruth(request.param)


@pytest.fixture
def nonflat():
    return fixtures.named_ruth("nonflat-pair2")
