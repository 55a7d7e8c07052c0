import math

import numpy as np
import pytest

from su2control.errors import InvalidInput, MagnitudeMismatch
from su2control.extremal import (
    DriftControlLaw,
    FreeControlLaw,
    control_transform,
    drift_disk_traj,
    drift_propagator,
    free_disk_traj,
    free_partials,
    free_propagator,
    free_xy,
    match_phase,
    wrap_phase,
)
from su2control.oracle import ControlWaveform, integrate_drift, integrate_free, waveform_of
from su2control.su2 import IDENTITY, LieCoeffs, SU2Element, compose, disk_point, distance, exp_lie, swap_like


def test_time_zero_is_identity():
    assert distance(drift_propagator(0.0, 3.0, 1.0, 0.7), IDENTITY) == 0.0
    assert distance(free_propagator(0.0, -2.0, 0.2, 1.3), IDENTITY) == 0.0


@pytest.mark.parametrize("gamma", [0.3, 1.0, 2.0])
def test_resonant_swap(gamma):
    X = drift_propagator(math.pi / (2 * gamma), 1.0, 0.4, gamma)
    assert abs(X.alpha) < 1e-15 and abs(abs(X.beta) - 1.0) < 1e-15
    p = drift_disk_traj(math.pi / 2, 1.0, 1.0)
    assert abs(p.x) < 1e-15 and abs(p.y) < 1e-15


def test_drift_disk_traj_examples(rng):
    assert drift_disk_traj(0.0, 2.0, 0.5) == drift_disk_traj(0.0, -1.0, 3.0)
    p = drift_disk_traj(0.0, 2.0, 0.5)
    assert (p.x, p.y) == (1.0, 0.0)
    for _ in range(1000):
        t, w, phi, g = rng.uniform(0, 20), rng.uniform(-10, 10), rng.uniform(-4, 4), rng.uniform(0.05, 5)
        p = drift_disk_traj(t, w, g)
        q = disk_point(drift_propagator(t, w, phi, g))
        assert abs(p.x - q.x) < 1e-12 and abs(p.y - q.y) < 1e-12
        p = free_disk_traj(t, w, g)
        q = disk_point(free_propagator(t, w, phi, g))
        assert abs(p.x - q.x) < 1e-12 and abs(p.y - q.y) < 1e-12


def test_free_examples():
    g, t = 0.8, 1.7
    p = free_disk_traj(t, 0.0, g)
    assert abs(p.x - math.cos(g * t)) < 1e-15 and p.y == 0.0
    p = free_disk_traj(math.pi / g, 0.0, g)
    assert abs(p.x + 1.0) < 1e-15
    Om = math.sqrt(math.pi**2 / t**2 - g**2)
    up, down = free_disk_traj(t, -Om, g), free_disk_traj(t, Om, g)
    xe = -math.cos(math.sqrt(math.pi**2 - g**2 * t**2))
    assert abs(up.x - xe) < 1e-12 and abs(down.x - xe) < 1e-12
    assert abs(up.y + down.y) < 1e-15 and up.y > 0
    assert abs(up.radius - 1.0) < 1e-12


def test_symmetry_is_exact(rng):
    t = rng.uniform(0, 10, 200)
    w = rng.uniform(-20, 20, 200)
    g = rng.uniform(0.05, 5, 200)
    x1, y1 = free_xy(t, w, g)
    x2, y2 = free_xy(t, -w, g)
    assert np.array_equal(x1, x2) and np.array_equal(y1, -y2)


def test_radius_identity(rng):
    t = rng.uniform(0, 30, 500)
    w = rng.uniform(-30, 30, 500)
    g = rng.uniform(0.05, 20, 500)
    x, y = free_xy(t, w, g)
    a = np.hypot(w, g)
    assert np.allclose(x**2 + y**2, 1 - (g / a) ** 2 * np.sin(a * t) ** 2, atol=1e-12, rtol=0)
    x, y = drift_disk_traj(t, w, g)
    a = np.hypot(g, 1 - w)
    assert np.allclose(x**2 + y**2, 1 - (g / a) ** 2 * np.sin(a * t) ** 2, atol=1e-12, rtol=0)


def test_unitarity_over_documented_range(rng):
    for _ in range(2000):
        t, w, phi, g = rng.uniform(0, 50), rng.uniform(-50, 50), rng.uniform(-4, 4), rng.uniform(0.05, 20)
        for X in (drift_propagator(t, w, phi, g), free_propagator(t, w, phi, g)):
            assert abs(abs(X.alpha) ** 2 + abs(X.beta) ** 2 - 1) < 1e-12


def test_propagators_match_oracle(rng):
    for _ in range(10):
        g = rng.uniform(0.2, 3)
        w, phi, t = rng.uniform(-8, 8), rng.uniform(-3, 3), rng.uniform(0, math.pi / g)
        d = distance(drift_propagator(t, w, phi, g), integrate_drift(waveform_of(DriftControlLaw(g, w, phi, t)), t))
        f = distance(free_propagator(t, w, phi, g), integrate_free(waveform_of(FreeControlLaw(g, w, phi, t)), t))
        assert d < 1e-8 and f < 1e-8


def test_control_transform_norm_and_origin(rng):
    law = FreeControlLaw(0.9, -1.3, 0.4, 3.0)
    assert control_transform(law, 0.0) == pytest.approx(tuple(float(v) for v in law.control(0.0)), abs=0)
    t = rng.uniform(0, 5, 100)
    ux, uy = control_transform(law, t)
    assert np.allclose(np.hypot(ux, uy), 0.9, atol=1e-12, rtol=0)


def test_interaction_picture_through_oracle(rng):
    for _ in range(5):
        g, w, phi, t = rng.uniform(0.3, 2), rng.uniform(-4, 4), rng.uniform(-3, 3), rng.uniform(0.1, 4)
        free = FreeControlLaw(g, w, phi, t)
        rotated = compose(exp_lie(LieCoeffs(0, 0, 2 * t)), free_propagator(t, w, phi, g))
        wave = ControlWaveform(lambda tau: control_transform(free, np.asarray(tau) / 2.0), g)
        assert distance(integrate_drift(wave, t), rotated) < 1e-8
        # the transformed control is itself an extremal with frequency shifted by one
        assert distance(free.to_drift().propagator(), rotated) < 1e-12
        assert distance(integrate_drift(wave, t), compose(exp_lie(LieCoeffs(0, 0, 2 * t)), integrate_free(waveform_of(free), t))) < 1e-8


def test_match_phase_examples():
    assert match_phase(SU2Element(1 + 0j, 0j), 0.0, 3.0, 1.0) == 0.0
    target = drift_propagator(1.1, 0.3, 0.7, 0.9)
    assert match_phase(target, 1.1, 0.3, 0.9) == pytest.approx(0.7, abs=1e-12)
    phi0 = 2.5
    g = 0.6
    t = math.pi / (2 * g)
    phi = match_phase(swap_like(phi0), t, 1.0, g)
    assert -math.pi <= phi < math.pi
    assert abs(phi - wrap_phase(phi0 - t)) < 1e-12
    assert abs(drift_propagator(t, 1.0, phi, g).beta - swap_like(phi0).beta) < 1e-12
    free_target = free_propagator(2.0, -0.4, -2.9, 1.2)
    assert match_phase(free_target, 2.0, -0.4, 1.2, convention="free") == pytest.approx(-2.9, abs=1e-12)


def test_match_phase_negative_amplitude():
    # sin(at) < 0 flips the sign of the amplitude, absorbed by a pi shift
    g, w, t = 1.0, 1.0, 4.0
    target = drift_propagator(t, w, 0.3, g)
    phi = match_phase(target, t, w, g)
    assert distance(drift_propagator(t, w, phi, g), target) < 1e-12


def test_match_phase_errors():
    with pytest.raises(MagnitudeMismatch):
        match_phase(swap_like(), 0.1, 1.0, 1.0)
    with pytest.raises(InvalidInput):
        match_phase(swap_like(), 0.1, 1.0, 1.0, convention="other")


def test_free_partials_finite_difference(rng):
    h = 1e-6
    for _ in range(50):
        t, w, g = rng.uniform(0.1, 5), rng.uniform(-5, 5), rng.uniform(0.2, 3)
        d_t, d_w = free_partials(t, w, g)

        def z(tt, ww):
            x, y = free_xy(tt, ww, g)
            return complex(x, y)

        assert abs(d_t - (z(t + h, w) - z(t - h, w)) / (2 * h)) < 1e-7
        assert abs(d_w - (z(t, w + h) - z(t, w - h)) / (2 * h)) < 1e-7


def test_law_validation():
    with pytest.raises(InvalidInput):
        DriftControlLaw(0.0, 1.0, 0.0, 1.0)
    with pytest.raises(InvalidInput):
        FreeControlLaw(1.0, 1.0, 0.0, -1.0)
    law = DriftControlLaw(0.5, 2.0, 0.1, 1.0)
    ux, uy = law.control(np.linspace(0, 5, 50))
    assert np.allclose(np.hypot(ux, uy), 0.5, atol=1e-15, rtol=0)
