import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from nanofall.constants import CONSTANTS, PhysicalConstants
from nanofall.exceptions import DomainError
from nanofall.state import (
    EnvironmentSpec,
    GaussianState,
    NanosphereSpec,
    centre,
    make_gaussian,
    mean_momentum,
    mean_velocity,
    nucleon_count,
    spread,
)

hbar = CONSTANTS.hbar


def test_constants_positive_and_planck_masses():
    assert CONSTANTS.m_planck == pytest.approx(2.176434e-8, rel=1e-5)
    assert CONSTANTS.m_planck_reduced == pytest.approx(CONSTANTS.m_planck / math.sqrt(8 * math.pi))
    with pytest.raises(ValueError):
        PhysicalConstants(hbar=-1.0)


@pytest.mark.parametrize("s, A", [(1e-9, 7.5e17), (1e-7, 7.5e13), (1e-11, 7.5e21)])
def test_make_gaussian_width(s, A):
    g = make_gaussian(s)
    assert g.A.real == pytest.approx(A, rel=1e-14)
    assert g.A.imag == 0
    assert np.all(g.B_array == 0)
    assert spread(g) == pytest.approx(s, rel=1e-14)


def test_make_gaussian_rejects_bad_spread():
    with pytest.raises(DomainError):
        make_gaussian(0.0)
    with pytest.raises(DomainError):
        make_gaussian(1e-9, velocity=(1e-7, 0, 0))


def test_gaussian_rejects_nonpositive_width():
    with pytest.raises(DomainError):
        GaussianState(-1.0 + 2j)
    with pytest.raises(DomainError):
        GaussianState(1.0, B=(0, 0))


def test_centre_from_B():
    g = GaussianState(7.5e17, (2 * 7.5e17 * 1e-8, 0, 0))
    assert centre(g)[0] == pytest.approx(1e-8)


def test_velocity_example_against_momentum_integral():
    sphere = NanosphereSpec(1e-7, 20000)
    M = sphere.mass
    A = 7.5e17
    k = M / hbar * 2e-7
    g = GaussianState(A, (1j * k, 0, 0)).normalized()
    assert mean_velocity(g, sphere)[0] == pytest.approx(2e-7, rel=1e-12)
    # <p> = -i hbar int psi* psi' dx along one axis of the separable Gaussian
    sig = math.sqrt(1 / (4 * A))
    xs = np.linspace(-12 * sig, 12 * sig, 20001)
    psi = np.exp(-A * xs**2 + 1j * k * xs)
    dpsi = (-2 * A * xs + 1j * k) * psi
    num = integrate.simpson((np.conj(psi) * (-1j * hbar) * dpsi).real, x=xs)
    den = integrate.simpson(np.abs(psi) ** 2, x=xs)
    assert num / den / M == pytest.approx(2e-7, rel=1e-9)


def test_normalization_via_quadrature():
    g = make_gaussian(1e-9, centre=(3e-10, -1e-10, 0))
    # per-axis integrals of |psi|^2 multiply to one
    A = g.A.real
    total = math.exp(2 * g.C.real)
    for b in g.B_array.real:
        mu = b / (2 * A)
        sig = 1 / math.sqrt(4 * A)
        # substitute x = mu + sig u and integrate in u
        f = lambda u: math.exp(-2 * A * (mu + sig * u) ** 2 + 2 * b * (mu + sig * u))
        val, _ = integrate.quad(f, -40, 40, epsabs=0, epsrel=1e-13)
        total *= val * sig
    assert total == pytest.approx(1.0, rel=1e-10)


def test_nucleon_count_examples():
    s = NanosphereSpec(1e-7, 2600)
    assert s.mass == pytest.approx(1.0891e-17, rel=1e-4)
    assert nucleon_count(s) == pytest.approx(6.56e9, rel=1e-2)
    gold = NanosphereSpec(1e-7, 20000)
    assert gold.mass == pytest.approx(8.3776e-17, rel=1e-4)


def test_nanosphere_validation():
    for kwargs in ({"radius": 0.0, "density": 1.0}, {"radius": 1e-7, "density": -1.0},
                   {"radius": 1e-12, "density": 1.0}):
        with pytest.raises(DomainError):
            NanosphereSpec(**kwargs)


def test_environment_defaults():
    env = EnvironmentSpec()
    assert env.gas_number_density == pytest.approx(3e8)
    assert env.mean_gas_speed == pytest.approx(108.0, rel=1e-2)
    with pytest.raises(DomainError):
        EnvironmentSpec(gas_temperature=0.0, gas_pressure=1e-10)


@settings(max_examples=60, deadline=None)
@given(
    s=st.floats(1e-12, 1e-5),
    c=st.lists(st.floats(-1e-6, 1e-6), min_size=3, max_size=3),
    v=st.lists(st.floats(-1e-3, 1e-3), min_size=3, max_size=3),
)
def test_make_gaussian_roundtrip(s, c, v):
    sphere = NanosphereSpec(1e-7, 2600)
    g = make_gaussian(s, c, v, sphere)
    assert spread(g) == pytest.approx(s, rel=1e-12)
    np.testing.assert_allclose(centre(g), c, rtol=1e-12, atol=1e-12 * s)
    dv = hbar / (sphere.mass * s)
    np.testing.assert_allclose(mean_velocity(g, sphere), v, rtol=1e-12, atol=1e-10 * dv)
    assert g.log_norm() == pytest.approx(0.0, abs=1e-9)


@settings(max_examples=40, deadline=None)
@given(R=st.floats(1e-8, 1e-5), f=st.floats(1.1, 10.0))
def test_mass_scales_as_cube(R, f):
    a = NanosphereSpec(R, 2600)
    b = NanosphereSpec(R * f, 2600)
    assert b.mass / a.mass == pytest.approx(f**3, rel=1e-12)
    assert b.nucleon_count / a.nucleon_count == pytest.approx(f**3, rel=1e-12)


def test_mean_momentum_zero_for_real_gaussian():
    assert np.all(mean_momentum(make_gaussian(1e-9, (1e-9, 0, 0))) == 0)
