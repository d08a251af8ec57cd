import math
import warnings

import numpy as np
import pytest

from floquet_cavity import (
    WeakDriveParams,
    casimir_density,
    casimir_density_generic,
    casimir_energy,
    classical_energy_weak,
    constant_protocol,
    doppler_exponent,
    make_harmonic,
    map_once,
    sweep_estimates,
    weak_forward_x,
    weak_frame_shift,
    weak_g_prime,
    weak_inverse_g,
    weak_map_step,
)

PI = math.pi


def params_q(A=0.02, L0=1.0, q=1):
    return WeakDriveParams(A, L0, q)


def test_params_validation_and_warning():
    with pytest.raises(ValueError):
        WeakDriveParams(0.3, 1.0)  # A/L0 beyond the expansion's reach
    with pytest.warns(UserWarning):
        WeakDriveParams(0.1, 1.0)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        WeakDriveParams(0.04, 1.0)  # quiet below the warning threshold
    assert params_q(0.02).a_tilde == pytest.approx(0.02 * PI)


def test_weak_map_step_identity_for_zero_amplitude():
    pr = params_q(A=0.0)
    x = np.linspace(-0.9, 0.9, 7)
    assert np.allclose(weak_map_step(pr, 0.0, x), x, atol=1e-15)


def test_weak_map_step_matches_exact_map():
    pr = params_q(A=0.01)
    p = make_harmonic(1.0, 0.01, PI)
    x = np.linspace(-0.95, 0.95, 41)
    exact = map_once(p, 0.0, x).x1
    assert np.max(np.abs(weak_map_step(pr, 0.0, x) - exact)) <= 1e-3


def test_weak_map_step_scaled_form():
    # at the reference phase t0 = L0 the step is 2 a~ sin(x~) + O(a~^2)
    pr = params_q(A=0.01)
    x = np.linspace(-0.9, 0.9, 21)
    dx = weak_map_step(pr, pr.L0, x) - x
    dxt = PI * dx / pr.L0
    expect = 2.0 * pr.a_tilde * np.sin(PI * x / pr.L0)
    assert np.max(np.abs(dxt - expect)) <= 5.0 * pr.a_tilde ** 2


def test_weak_closed_forms_identity_at_n0():
    pr = params_q()
    xt = np.linspace(-3.0, 3.0, 41)
    assert np.allclose(weak_forward_x(xt, 0, pr), xt, atol=1e-12)
    assert np.allclose(weak_inverse_g(xt, 0, pr), xt, atol=1e-12)
    assert np.allclose(weak_g_prime(xt, 0, pr), 1.0, atol=1e-15)


def test_weak_inverse_reference_value():
    # q=1, a~=0.1, n=5, x~ = pi/2 -> 2 arctan(e^{-1})
    pr = WeakDriveParams(0.1 / PI, 1.0, 1)
    assert pr.a_tilde == pytest.approx(0.1)
    got = weak_inverse_g(PI / 2, 5, pr)
    assert got == pytest.approx(2.0 * math.atan(math.exp(-1.0)), abs=1e-12)


def test_weak_pole_is_stable_point():
    pr = params_q()
    for n in (1, 5, 20):
        assert weak_inverse_g(PI, n, pr) == pytest.approx(PI, abs=1e-12)
    pr2 = params_q(q=2)
    assert weak_inverse_g(PI / 2, 7, pr2) == pytest.approx(PI / 2, abs=1e-12)


def test_weak_forward_inverse_compose_to_identity():
    for q in (1, 2, 3):
        pr = params_q(q=q)
        xt = np.linspace(-2.8, 2.8, 113)
        n = 6
        assert np.max(np.abs(weak_inverse_g(weak_forward_x(xt, n, pr), n, pr) - xt)) < 1e-10


def test_weak_g_prime_levels_and_derivative_identity():
    pr = params_q(A=0.03)
    n = 4
    arg = 2.0 * pr.a_tilde * n
    assert weak_g_prime(PI, n, pr) == pytest.approx(math.exp(arg), rel=1e-12)
    assert weak_g_prime(0.0, n, pr) == pytest.approx(math.exp(-arg), rel=1e-12)
    h = 1e-6
    xt = np.linspace(-2.5, 2.5, 31)
    fd = (weak_inverse_g(xt + h, n, pr) - weak_inverse_g(xt - h, n, pr)) / (2 * h)
    assert np.max(np.abs(fd - weak_g_prime(xt, n, pr))) < 1e-6
    # peak height of (g')^2 is e^{4 a~ n}
    assert weak_g_prime(PI, n, pr) ** 2 == pytest.approx(math.exp(2 * arg), rel=1e-12)


def test_ode_limit_of_iterated_step():
    # iterating the discrete step converges to the closed form as A -> 0 at
    # fixed a~ n; halving A roughly halves the error
    target = 0.3
    errs = []
    for A in (0.02, 0.01):
        pr = params_q(A=A)
        n = round(target / pr.a_tilde)
        x = 0.4
        cur = x
        for _ in range(n):
            cur = weak_map_step(pr, pr.L0, cur)
        closed = weak_forward_x(PI * x / pr.L0, n, pr) / PI * pr.L0
        errs.append(abs(cur - closed))
    assert errs[1] < errs[0] / 1.5


def test_classical_energy_weak_values():
    with pytest.warns(UserWarning):
        pr = WeakDriveParams(0.1, 1.0, 1)
    assert classical_energy_weak(3.0, 0, pr) == 3.0
    assert classical_energy_weak(1.0, 4, pr) == pytest.approx(math.cosh(0.8 * PI), rel=1e-12)
    # cosh(0.8 pi) = 6.2131...
    assert classical_energy_weak(1.0, 4, pr) == pytest.approx(6.213, abs=1e-3)


def test_casimir_density_q1_uniform_static():
    pr = params_q(q=1)
    x = np.linspace(-1.0, 1.0, 17)
    for t in (0.0, 1.7, 12.0):
        d = casimir_density(x, t, pr)
        assert np.allclose(d, -PI / 48.0, atol=1e-15)
    # t = 0 is the static value for every order
    for q in (2, 5):
        d0 = casimir_density(x, 0.0, params_q(q=q))
        assert np.allclose(d0, -PI / 48.0, atol=1e-15)


def test_casimir_density_q2_far_field_limit():
    pr = params_q(A=0.02, q=2)
    # late times, away from the peaks: g' -> 0 and T00 -> -pi q^2 / 48 L^2
    d = casimir_density(0.0, 60.0, pr)  # cos(q x~) = +1 at x = 0: off-peak
    assert d == pytest.approx(-PI * 4.0 / 48.0, rel=1e-4)


def test_casimir_energy_values():
    for q in (1, 2, 3):
        assert casimir_energy(0.0, params_q(q=q)) == pytest.approx(-PI / 24.0, abs=1e-15)
    pr1 = params_q(q=1)
    for t in (0.5, 3.0, 20.0):
        assert casimir_energy(t, pr1) == pytest.approx(-PI / 24.0, abs=1e-15)
    # q=2, L=1, pi q A c t / L^2 = 1: E = (-4 + 3 cosh 1) pi / 24
    pr2 = params_q(A=0.02, q=2)
    t_unit = 1.0 / (PI * 2 * 0.02)
    expect = (-4.0 + 3.0 * math.cosh(1.0)) * PI / 24.0
    assert casimir_energy(t_unit, pr2) == pytest.approx(expect, rel=1e-12)
    assert expect == pytest.approx(0.0824, abs=2e-4)
    # attraction turns to repulsion at cosh = q^2/(q^2-1)
    t_star = math.acosh(4.0 / 3.0) / (PI * 2 * 0.02)
    assert casimir_energy(t_star * 0.999, pr2) < 0.0 < casimir_energy(t_star * 1.001, pr2)


def test_casimir_quadrature_matches_energy():
    for q in (1, 2, 3):
        pr = params_q(A=0.02, q=q)
        t = 1.3
        m = 8192
        x = -1.0 + 2.0 * (np.arange(m) + 0.5) / m
        quad = float(np.sum(casimir_density(x, t, pr)) * 2.0 / m)
        assert quad == pytest.approx(casimir_energy(t, pr), rel=1e-8)


def test_casimir_generic_static_cavity():
    p = constant_protocol(1.3)
    x = np.linspace(-1.2, 1.2, 9)
    d = casimir_density_generic(p, x, 2.5)
    assert np.allclose(d, -PI / (48.0 * 1.3 ** 2), rtol=1e-10)


def test_casimir_generic_warns_when_ill_conditioned():
    p = make_harmonic(1.0, 0.01, PI)
    with pytest.warns(UserWarning):
        casimir_density_generic(p, np.array([0.3]), 4.0, h=1e-7)


def test_doppler_exponent_limits():
    assert doppler_exponent(0.3, 0.0, 2.0) == 1.0
    assert doppler_exponent(0.0, 5.0, 2.0) == 1.0
    # small-v exponential form
    v, t, T = 1e-4, 8.0, 2.0
    assert doppler_exponent(v, t, T) == pytest.approx(math.exp(2 * v * t / T), rel=1e-7)


def test_sweep_estimates():
    est = sweep_estimates(100.0, 0.01, 1000.0)
    assert est.max_compression == pytest.approx(math.exp(2.0), rel=1e-12)
    assert est.gain_feasible
    assert est.noise_compression == pytest.approx(math.exp(20.0), rel=1e-12)
    assert not sweep_estimates(100.0, 0.0, 10.0).gain_feasible
    assert not sweep_estimates(50.0, 0.01, 10.0).gain_feasible  # 1/Q = 2v exactly


def test_frame_shift_aligns_weak_and_exact_maps():
    # the exact map at t0 = 0, phi = 0 has its stable point at x = 0 for
    # q = 1 and at +-L/2 for q = 2; the closed forms place stable points at
    # cos(q x~) = -1
    for q, x_exact in ((1, 0.0), (2, 0.5)):
        shift = weak_frame_shift(q)
        xt = PI * x_exact + shift
        assert math.cos(q * xt) == pytest.approx(-1.0, abs=1e-12)
