import cmath

import numpy as np
import pytest

from qcduality.duality.lax import char_poly, lax_build
from qcduality.duality.rs import (RootTrackingLostError, RSData, initial_velocity_check, rs_acceleration,
                                  rs_eom_check, rs_from_krichever, rs_from_record, rs_tau, rs_tau_core, rs_wave,
                                  track_zeros)
from qcduality.mkp.krichever import KricheverData, PoleError, adjoint_wave, random_krichever, tau, wave
from qcduality.quantum.spectrum import joint_spectrum

SAMPLES = [(0.37, (0.1, 0.05)), (1.3 + 0.2j, (0.02, -0.03, 0.01)), (-0.8, (0.0,))]


@pytest.fixture(scope="module")
def matched():
    data = KricheverData("1/3", ("2", "5"), (("1", "3/2"), ("1", "-1/2")))
    return data, rs_from_krichever(data)


def test_tau_at_zero_time():
    rs = RSData.from_velocities([0.0, 1.0, 2.5], [0.4, -0.3, 0.2], 1 / 3, [2.0, 5.0])
    for x in [0.3, 1.7 - 0.4j]:
        pref = cmath.exp((cmath.log(2.0) + cmath.log(5.0)) * x * 3)
        want = pref * np.prod([x - v for v in rs.X0])
        assert abs(rs_tau(rs, x, (0.0,)) - want) <= 1e-12 * abs(want)
    for v in rs.X0:
        assert abs(rs_tau_core(rs, v, (0.0,))) < 1e-14


def test_matched_lax_spectrum(matched):
    # the Lax matrix of the zeros has the Krichever points as its spectrum
    data, rs = matched
    c = np.poly(np.linalg.eigvals(rs.L0))
    assert np.allclose(c, np.poly([2.0, 5.0]), atol=1e-10)


def test_tau_matches_mkp(matched):
    data, rs = matched
    ratios = np.array([rs_tau(rs, x, t) / tau(data, x, t) for x, t in SAMPLES])
    assert np.max(np.abs(ratios - ratios[0])) <= 1e-9 * abs(ratios[0])


def test_wave_matches_mkp(matched):
    data, rs = matched
    for x, t in SAMPLES:
        for z in [2.7 + 0.4j, -1.9, 11.0]:
            psi, psi_star = rs_wave(rs, x, t, z)
            assert abs(psi - wave(data, x, t, z)) <= 1e-9 * abs(psi)
            assert abs(psi_star - adjoint_wave(data, x, t, z)) <= 1e-9 * abs(psi_star)


@pytest.mark.parametrize("M", [(2, 1), (1, 1, 1), (2, 2)])
def test_random_krichever_cross_module(M):
    data = random_krichever(np.random.default_rng(11), M)
    rs = rs_from_krichever(data)
    ratios = np.array([rs_tau(rs, x, t) / tau(data, x, t) for x, t in SAMPLES])
    assert np.max(np.abs(ratios - ratios[0])) <= 1e-9 * abs(ratios[0])
    psi, _ = rs_wave(rs, 0.37, (0.1,), 3.3)
    assert abs(psi - wave(data, 0.37, (0.1,), 3.3)) <= 1e-9 * abs(psi)


def test_wave_normalization_at_large_z(matched):
    _, rs = matched
    x = 0.37
    for z in [1e3, 1e4]:
        psi, psi_star = rs_wave(rs, x, (0.0,), z)
        plane = cmath.exp(cmath.log(z) * x / rs.eta)
        assert abs(psi / plane - 1) < 50 / z
        assert abs(psi * psi_star - 1) < 50 / z


def test_wave_poles(matched):
    _, rs = matched
    with pytest.raises(PoleError):
        rs_wave(rs, 0.3, (0.0,), 0.0)
    with pytest.raises(PoleError):
        rs_wave(rs, rs.X0[0], (0.0,), 3.0)


def test_single_particle_moves_freely():
    rs = RSData.from_velocities([0.5], [0.7], 0.25, [2.0])
    assert rs_acceleration(np.array([0.5]), np.array([0.7]), 0.25)[0] == 0
    grid = np.linspace(-0.02, 0.02, 9)
    X = track_zeros(rs, grid, 0.005)
    assert np.allclose(X[:, 0], 0.5 + 0.7 * grid, atol=1e-13)
    assert rs_eom_check(rs).passed


@pytest.mark.parametrize("M", [(1, 1), (2, 1), (1, 1, 1), (1, 2), (3,)])
def test_equations_of_motion(M):
    rs = rs_from_krichever(random_krichever(np.random.default_rng(0), M))
    res = rs_eom_check(rs, h=1e-3)
    assert res.residual < 1e-5
    assert res.details["integral_drift"] < 1e-6


def test_near_collision_converges_at_stencil_order():
    # two zeros 0.21 apart approach at relative speed ~7.5: h = 1e-3 is too coarse,
    # but the residual falls by ~2^4 per halving of h
    rs = rs_from_krichever(random_krichever(np.random.default_rng(3), (1, 1, 1)))
    r = [rs_eom_check(rs, h=h).residual for h in (1e-3, 5e-4, 2.5e-4)]
    assert r[0] > 1e-5
    assert r[0] / r[1] > 12 and r[1] / r[2] > 12


@pytest.mark.parametrize("fixture", ["spec_n2_N2", "spec_n2_N3"])
def test_equations_of_motion_from_eigenstates(fixture, request):
    s = request.getfixturevalue(fixture)
    for r in joint_spectrum(s, seed=0):
        rs = rs_from_record(s, r)
        res = rs_eom_check(rs, h=1e-3)
        assert res.residual < 1e-5 and res.details["integral_drift"] < 1e-6
        assert initial_velocity_check(rs).passed


def test_initial_velocity_from_tau():
    rs = rs_from_krichever(random_krichever(np.random.default_rng(8), (1, 2)))
    assert initial_velocity_check(rs).residual < 1e-4


def test_tracking_reports_collisions():
    # two slow particles closing in on each other
    rs = RSData.from_velocities([0.0, 0.01], [1.0, -1.0], 0.3, [2.0, 5.0])
    with pytest.raises(RootTrackingLostError):
        rs_eom_check(rs, h=1e-3)


def test_eigenstate_lax_from_record(spec_n2_N2):
    for r in joint_spectrum(spec_n2_N2, seed=0):
        rs = rs_from_record(spec_n2_N2, r)
        L = lax_build(list(rs.X0), list(rs.xdot0), rs.eta)
        assert np.allclose(L.matrix(), rs.L0)
        want = np.poly([complex(p) for p, m in zip(spec_n2_N2.p, r.weights) for _ in range(m)])
        assert np.allclose(char_poly(L), want, atol=1e-9)
