import math

import pytest
from hypothesis import given, strategies as st

from hbondvib import units as u
from hbondvib.units import Dimension, UnitSystem


def test_hartree_to_wavenumber_examples():
    assert u.hartree_to_wavenumber(0.0) == 0.0
    assert u.hartree_to_wavenumber(1.0) == 219474.6313632
    assert u.hartree_to_wavenumber(0.00273) == pytest.approx(599.2, abs=0.05)


def test_hartree_to_wavenumber_rejects_nonfinite():
    with pytest.raises(ValueError):
        u.hartree_to_wavenumber(math.nan)


def test_constants_agree_with_scipy_codata():
    # independent constants table; scipy ships CODATA 2018 or newer
    from scipy import constants as sc
    hartree_cm = sc.physical_constants["hartree-inverse meter relationship"][0] / 100
    assert u.HARTREE_TO_WAVENUMBER == pytest.approx(hartree_cm, rel=1e-10)
    bohr_A = sc.physical_constants["Bohr radius"][0] * 1e10
    assert u.BOHR_RADIUS_ANGSTROM == pytest.approx(bohr_A, rel=1e-9)
    amu = sc.physical_constants["atomic mass constant"][0] / sc.m_e
    assert u.AMU_TO_ELECTRON_MASS == pytest.approx(amu, rel=1e-9)


@pytest.mark.parametrize("m, eps", [(16.0, 0.5), (1.0, 1.0)])
def test_epsilon_from_reference_mass(m, eps):
    assert u.epsilon_from_reference_mass(m) == eps


def test_epsilon_carbon12_nucleus():
    # 21868.7^(-1/4) = 0.082233; rounds to the commonly quoted 0.0821-0.0822
    assert u.CARBON12_NUCLEUS == pytest.approx(21868.66, abs=0.01)
    assert u.epsilon_from_reference_mass(21868.7) == pytest.approx(0.08223, abs=1e-5)
    assert u.epsilon_from_reference_mass(u.CARBON12_NUCLEUS) == pytest.approx(0.0821, abs=2e-4)


@pytest.mark.parametrize("m", [0.0, -1.0])
def test_epsilon_rejects_nonpositive(m):
    with pytest.raises(ValueError):
        u.epsilon_from_reference_mass(m)


@given(st.floats(1e-3, 1e8), st.floats(1e-3, 1e8))
def test_epsilon_strictly_decreasing(m1, m2):
    if m1 < m2:
        assert u.epsilon_from_reference_mass(m1) > u.epsilon_from_reference_mass(m2)


def test_to_atomic_examples():
    A = u.ANGSTROM_HARTREE
    # CODATA 2018 gives 1.8897261246; older tables quote 1.8897259886 (7e-8 apart)
    assert u.to_atomic(1.0, Dimension.LENGTH, A) == pytest.approx(1.8897261246, rel=1e-10)
    assert u.to_atomic(1.0, Dimension.LENGTH, A) == pytest.approx(1.8897259886, rel=1e-7)
    assert u.to_atomic(0.26, Dimension.ENERGY_PER_LENGTH2, A) == pytest.approx(0.0728, abs=1e-4)
    assert u.to_atomic(3.7, Dimension.LENGTH, u.ATOMIC) == 3.7


@given(st.floats(-1e6, 1e6), st.sampled_from(list(Dimension)),
       st.sampled_from(["bohr", "angstrom"]), st.sampled_from(["hartree", "ev"]),
       st.sampled_from(["electron_mass", "amu"]))
def test_round_trip(x, dim, length, energy, mass):
    us = UnitSystem.from_names(length, energy, mass)
    back = u.from_atomic(u.to_atomic(x, dim, us), dim, us)
    assert back == pytest.approx(x, rel=1e-14, abs=1e-300)


@given(st.floats(-1e3, 1e3), st.floats(-1e3, 1e3))
def test_wavenumber_linear(alpha, e):
    assert u.hartree_to_wavenumber(alpha * e) == pytest.approx(
        alpha * u.hartree_to_wavenumber(e), rel=1e-15, abs=1e-300)


def test_unit_system_validation():
    with pytest.raises(ValueError):
        UnitSystem(length_to_bohr=0.0)
    with pytest.raises(ValueError):
        UnitSystem(energy_to_hartree=math.inf)
    with pytest.raises(ValueError):
        UnitSystem.from_names(length="furlong")
    with pytest.raises(ValueError):
        u.to_atomic(1.0, "volume", u.ATOMIC)


def test_constants_table_lists_chain():
    t = u.constants_table()
    assert t["hartree_to_wavenumber"] == (219474.6313632, "cm^-1/hartree")
    assert set(t) >= {"angstrom_to_bohr", "proton_mass", "fluorine19_nucleus"}
