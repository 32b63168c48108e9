import random

import pytest

from chainlen.fields import FieldConfig, Fp, Qp


@pytest.fixture
def config17():
    return FieldConfig(p=17, m=3, precision=16, seed=42)


@pytest.fixture
def f17():
    return Fp(17)


@pytest.fixture
def q17():
    return Qp(17, 16)


@pytest.fixture
def rng():
    return random.Random(1234)
