import pytest

from higgsdt.curve import CurveData, CurveError, SpecialPointError
from higgsdt.ratfun import RFRing


def zr(c):
    ring = RFRing(c.field, ("z",))
    return ring, ring.gen("z")


def test_genus0_zeta(g0):
    ring, z = zr(g0)
    v = ring.v()
    assert g0.at(1).zeta_at(z, ring) == 1 / ((1 - z) * (1 - v ** 2 * z))


def test_genus0_zeta_counts_symmetric_powers(g0):
    ring, z = zr(g0)
    coeffs = g0.at(1).zeta_at(z, ring).series_expand("z", 4)
    q = ring.q()
    for d, c in enumerate(coeffs):
        assert c == sum((q ** i for i in range(d + 1)), ring.zero)


def test_elliptic_zeta(elliptic):
    ring, z = zr(elliptic)
    assert elliptic.numerator_coefficients(1) == [1, 0, 2]
    assert elliptic.at(1).zeta_at(z, ring) == (1 + 2 * z ** 2) / ((1 - z) * (1 - 2 * z))


def test_elliptic_extension_counts(elliptic):
    # supersingular: Frobenius eigenvalues +-sqrt(-2), so N_2 = 4 + 1 + 4
    assert elliptic.points(2) == 9


def test_genus2_numerator(genus2):
    assert genus2.numerator_coefficients(1) == [1, 0, 0, 0, 9]
    assert genus2.points(1) == 4 and genus2.points(2) == 10


def test_zeta_tilde(g0, g1):
    ring, z = zr(g0)
    assert g0.at(1).zeta_tilde_at(z, ring) == z * g0.at(1).zeta_at(z, ring)
    ring1, z1 = zr(g1)
    assert g1.at(1).zeta_tilde_at(z1, ring1) == g1.at(1).zeta_at(z1, ring1)


def test_zeta_tilde_genus2(genus2):
    ring, z = zr(genus2)
    assert genus2.at(1).zeta_tilde_at(z, ring) == genus2.at(1).zeta_at(z, ring) / z


def test_residue_values(g0, elliptic):
    ring = RFRing(g0.field)
    v = ring.v()
    assert g0.at(1).residue_value() == v ** 2 / (v ** 2 - 1)
    assert elliptic.at(1).residue_value() == 3


def test_zstar(g0):
    ring, z = zr(g0)
    q = ring.q()
    cl = g0.at(1)
    assert cl.zstar_at(z, ring) == 1 / ((1 - z / q) * (1 - z))
    assert cl.zstar_at(ring.one, ring) == cl.residue_value(ring)
    with pytest.raises(SpecialPointError):
        cl.zstar_at(q, ring)


def test_weil_bound_enforced():
    with pytest.raises(CurveError):
        CurveData.numeric(2, [7])


def test_config_round_trip(elliptic, g1):
    for c in (elliptic, g1):
        assert CurveData.from_config(c.to_config()) == c
