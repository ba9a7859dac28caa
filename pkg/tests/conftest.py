import pytest

from higgsdt.curve import CurveData
from higgsdt.ratfun import RFRing
from higgsdt.scalar import NumericField, SymbolicField


@pytest.fixture(scope="session")
def g0():
    return CurveData.symbolic(0)


@pytest.fixture(scope="session")
def g1():
    return CurveData.symbolic(1)


@pytest.fixture(scope="session")
def elliptic():
    """y^2 + y = x^3 over F_2: three rational points."""
    return CurveData.numeric(2, [3])


@pytest.fixture(scope="session")
def genus2():
    """y^2 = x^5 + 1 over F_3: N_1 = 4, N_2 = 10, so P(T) = 1 + 9 T^4."""
    return CurveData.numeric(3, [4, 10])


@pytest.fixture(scope="session")
def sym():
    return RFRing(SymbolicField(0))


@pytest.fixture(scope="session")
def zring():
    return RFRing(SymbolicField(0), ("z",))
