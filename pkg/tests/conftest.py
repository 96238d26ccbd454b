import pytest

from sepdeg.config import Config
from sepdeg.core.gf import default_field
from sepdeg.core.invariants import InvariantEngine
from sepdeg.core.reps import JordanDesc, KleinDesc, WModuleDesc, build

Config.STRICT_CHECKS = True

OMEGA = (0, 1)


@pytest.fixture(scope='session')
def f2():
    return default_field(2, 1)


@pytest.fixture(scope='session')
def f3():
    return default_field(3, 1)


@pytest.fixture(scope='session')
def f4():
    return default_field(2, 2)


@pytest.fixture
def engine():
    return InvariantEngine(cache_dir='')


@pytest.fixture(scope='session')
def v2(f2):
    """Z_2 on V_2 over F_2."""
    return build(JordanDesc(2, 1, 2), f2)


@pytest.fixture(scope='session')
def v3(f2):
    """Z_4 on V_3 over F_2."""
    return build(JordanDesc(2, 2, 3), f2)


@pytest.fixture(scope='session')
def w2_omega(f4):
    return build(WModuleDesc(2, 1, 3, 2, OMEGA), f4)


@pytest.fixture(scope='session')
def klein_v4(f2):
    return build(KleinDesc('v2m', 2, (0,)), f2)
