from functools import lru_cache

import pytest

from matroid_lab.named import u36_with_common_point, pg3, pg3_minus_point, uniform, vamos


@lru_cache(maxsize=None)
def pg(q):
    return pg3(q)


@lru_cache(maxsize=None)
def pg_minus(q):
    return pg3_minus_point(q)


@pytest.fixture
def U24():
    return uniform(2, 4)


@pytest.fixture
def U36():
    return uniform(3, 6)


@pytest.fixture
def V8():
    return vamos()


@pytest.fixture
def PG32():
    return pg(2)


@pytest.fixture
def N1():
    return u36_with_common_point()
