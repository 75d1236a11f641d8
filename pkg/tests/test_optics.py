import numpy as np
import pytest

from dilatonmodels.core import C, DilatonParams, GridError, PhysicalContext, PhysicsPreconditionError, dilaton_params
from dilatonmodels.optics import (
    WaveSpec,
    amplitude,
    amplitude_transport_residual,
    eikonal_phase,
    epsilon_scale,
    field_grid,
    field_point,
    gauge_residual,
    kappa,
    light_cone,
    light_cone_cut,
    null_residual,
    polarization,
    spacetime_figure_parameters,
    two_photon_effective,
    wave_spec,
    wave_vector,
)
from dilatonmodels.oracle import finite_difference_gradient

SLOW = PhysicalContext(c=10.0, g=9.81)


def test_wave_spec_validation():
    w = wave_spec(3.0, q=(4.0, 0.0))
    assert w.k0 == 5.0
    with pytest.raises(PhysicsPreconditionError):
        wave_spec(0.0)
    with pytest.raises(PhysicsPreconditionError):
        WaveSpec(6.0, (0.0, 0.0), 5.0)
    with pytest.raises(PhysicsPreconditionError):
        wave_spec(1.0, a_in=0.0)
    with pytest.raises(PhysicsPreconditionError):
        wave_spec(1.0, e_in=(0.0, 0.5, 0.0, 0.0))


def test_phase_origin():
    w = wave_spec(2 * np.pi, q=(1.0, 2.0))
    assert eikonal_phase(0.0, (0.0, 0.0), 0.0, w) == 0.0
    assert kappa(0.0, w) == 0.0


def test_flat_spacetime_plane_wave():
    ctx = PhysicalContext(g=0.0)
    w = wave_spec(3.0, q=(1.0, -2.0))
    t, x, y, z = 0.2 / C, 0.3, -0.4, 1.7
    expected = C * w.k0 * t - 1.0 * x + 2.0 * y - 3.0 * z
    assert eikonal_phase(t, (x, y), z, w, ctx) == pytest.approx(expected, rel=1e-14)


def test_kappa_quadratic_coefficient():
    w = wave_spec(2 * np.pi, q=(1.0, 0.0))
    rng = np.random.default_rng(2)
    expected = -SLOW.g * w.k0**2 / (2 * SLOW.c**2 * w.k_z)
    for z in rng.uniform(0.1, 1.0, 10):
        assert (kappa(z, w, SLOW) - w.k_z * z) / z**2 == pytest.approx(expected, rel=1e-10)


def test_wave_vector_at_origin():
    w = wave_spec(5.0, q=(1.0, 2.0))
    K = wave_vector(0.0, (0.0, 0.0), 0.0, w)
    assert np.array_equal(K, [w.k0, -1.0, -2.0, -5.0])


def test_wave_vector_shape():
    w = wave_spec(5.0)
    z = np.zeros((3, 4))
    assert wave_vector(z, (0.0, 0.0), z, w).shape == (4, 3, 4)


def test_wave_vector_is_phase_gradient():
    w = wave_spec(5.0, q=(1.0, 2.0))

    def phase(t, x, y, z):
        return eikonal_phase(t, (x, y), z, w, SLOW)

    point = (0.1, 0.2, -0.3, 0.7)
    numeric = finite_difference_gradient(phase, point, 1e-2, c=SLOW.c)
    analytic = wave_vector(point[0], point[1:3], point[3], w, SLOW)
    assert np.allclose(numeric, analytic, rtol=1e-9, atol=1e-9 * w.k0)


def test_null_residual_bound():
    ctx = PhysicalContext()
    w = wave_spec(1.6e7)
    z = 1e-4 * ctx.c**2 / ctx.g
    assert abs(null_residual(z, w, ctx)) <= 1e-7


def test_null_residual_exponent():
    ctx = PhysicalContext()
    w = wave_spec(1.6e7, q=(1.2e7, 0.0))
    z = np.array([1.0, 10.0, 100.0, 1000.0])
    r = np.abs(null_residual(z, w, ctx))
    slope = np.polyfit(np.log(ctx.g * z / ctx.c**2), np.log(r), 1)[0]
    assert slope == pytest.approx(2.0, abs=0.05)


def test_null_residual_halving_g():
    w = wave_spec(1.0)
    full = null_residual(1e3, w, PhysicalContext(g=9.81))
    half = null_residual(1e3, w, PhysicalContext(g=9.81 / 2))
    assert full / half == pytest.approx(4.0, rel=1e-6)


def test_polarization_flat():
    w = wave_spec(1.0, e_in=(0.3, 1.0, 0.0, 0.3))
    e = polarization(5.0, w, PhysicalContext(g=0.0))
    assert np.array_equal(e, np.array(w.e_in, dtype=complex))


def test_polarization_transverse_is_constant():
    w = wave_spec(2.0, e_in=(0.0, 1 / np.sqrt(2), 1j / np.sqrt(2), 0.0))
    z = np.linspace(0, 1e5, 7)
    e = polarization(z, w)
    assert np.all(e[0] == 0) and np.all(e[3] == 0)
    assert np.all(e[1] == w.e_in[1]) and np.all(e[2] == w.e_in[2])


def test_gauge_residual_second_order():
    ctx = PhysicalContext()
    w = wave_spec(1.6e7, e_in=(0.3, 1.0, 0.0, 0.3))
    assert gauge_residual(0.0, w, ctx) == 0.0
    z = 1e-6 * ctx.c**2 / ctx.g
    assert gauge_residual(z, w, ctx) <= 1e-11
    w = wave_spec(1.0, e_in=(0.3, 1.0, 0.0, 0.3))
    z = 1e-3 * ctx.c**2 / ctx.g
    assert gauge_residual(z, w, ctx) / gauge_residual(z / 2, w, ctx) == pytest.approx(4.0, rel=1e-4)


def test_amplitude_flat_without_coupling():
    w = wave_spec(2.0, a_in=2.5)
    p = DilatonParams(rho0_bar=1e-3, k_rho=1.0, omega_rho=3.0)
    z, t = np.meshgrid(np.linspace(0, 2, 5), np.linspace(0, 1, 5))
    assert np.all(amplitude(z, t, w, p, PhysicalContext(g=0.0)) == 2.5)


def test_amplitude_massless_vertical_beam():
    ctx = PhysicalContext()
    p = dilaton_params(rho0_bar=1e-3, k_rho=3.0, beta_S_bar=0.4, d_e=1.0, ctx=ctx)
    w = wave_spec(1e3)
    z = 0.37
    for t in (0.0, 1e-9, 2.5e-9):
        expected = 1.0 + ctx.g * z * 0.4 / (2 * ctx.c**2)
        assert amplitude(z, t, w, p, ctx) == pytest.approx(expected, rel=1e-14)


def test_amplitude_zero_dilaton_wave_number():
    ctx = PhysicalContext(g=0.0)
    w = wave_spec(2.0)
    p = DilatonParams(rho0_bar=1e-3, omega_rho=3.0, d_e=1.0)
    z, t = 0.5, 0.1
    expected = 1.0 - (3.0 * w.k0 / (ctx.c * w.k_z)) * 0.5 * z * 1e-3 * np.sin(3.0 * t)
    assert amplitude(z, t, w, p, ctx) == pytest.approx(expected, rel=1e-15)


def test_amplitude_figure_origin():
    w, p, ctx = spacetime_figure_parameters()
    assert amplitude(0.0, 0.0, w, p, ctx) / w.a_in - 1.0 == 0.0


def test_field_point():
    w = wave_spec(5.0, q=(0.0, 1.0))
    p = DilatonParams(rho0_bar=1e-3, k_rho=1.0, omega_rho=2 * C, d_e=0.5)
    fp = field_point(0.0, (0.0, 0.0), 0.5, w, p)
    assert fp.phase == eikonal_phase(0.0, (0.0, 0.0), 0.5, w)
    assert fp.K.shape == (4,)
    assert fp.e.shape == (4,)
    assert fp.a == amplitude(0.5, 0.0, w, p)


def test_phase_independent_of_dilaton():
    w = wave_spec(5.0, q=(0.0, 1.0))
    a = field_point(0.3, (0.1, 0.2), 0.5, w, DilatonParams())
    b = field_point(0.3, (0.1, 0.2), 0.5, w, DilatonParams(rho0_bar=0.1, k_rho=2.0, omega_rho=7.0, d_e=1.0))
    assert a.phase == b.phase
    assert np.array_equal(a.K, b.K)


def test_two_photon_degenerate():
    tp = two_photon_effective(8e6, 8e6, 0.0, 0.0)
    assert tp.delta_omega == 0.0
    assert tp.k == 1.6e7


def test_two_photon_flat():
    ctx = PhysicalContext(g=0.0)
    tp = two_photon_effective(8e6, 8.1e6, 0.3, 2.0, ctx)
    assert tp.phase == pytest.approx(tp.delta_omega * 0.3 - tp.k * 2.0, rel=1e-15)


def test_two_photon_composition():
    kR, kB = 1.0, 1.3
    blue = wave_spec(kB)
    red = wave_spec(-kR)
    t = np.linspace(0.0, 0.5, 4)
    z = np.linspace(0.0, 1.0, 4)
    tp = two_photon_effective(kR, kB, t, z, SLOW)
    composed = eikonal_phase(t, (0.0, 0.0), z, blue, SLOW) - eikonal_phase(t, (0.0, 0.0), z, red, SLOW)
    assert np.allclose(tp.phase, composed, rtol=1e-12, atol=1e-12)


def test_two_photon_domain():
    with pytest.raises(PhysicsPreconditionError):
        two_photon_effective(0.0, 1.0, 0.0, 0.0)
    with pytest.raises(PhysicsPreconditionError):
        two_photon_effective(1.0, -1.0, 0.0, 0.0)


def test_epsilon_scale():
    eps = epsilon_scale(700e-9, 1e-3)
    assert eps.value == pytest.approx(7e-4, rel=1e-15)
    assert eps.valid
    assert epsilon_scale(1.0, 1.0) == (1.0, False)
    assert epsilon_scale(1064e-9, 1.0).value == pytest.approx(1.064e-6, rel=1e-15)
    with pytest.raises(PhysicsPreconditionError):
        epsilon_scale(0.0, 1.0)


def test_grid_flat_two_by_two():
    ctx = PhysicalContext(g=0.0)
    grid = field_grid((0.0, 1.0), (0.0, 1.0), 2, 2, wave_spec(1.0), DilatonParams(), ctx)
    assert grid.amplitude_dev.shape == (2, 2)
    assert np.all(grid.amplitude_dev == 0.0)


def test_grid_errors():
    w, p = wave_spec(1.0), DilatonParams()
    with pytest.raises(GridError):
        field_grid((0.0, 1.0), (0.0, 1.0), 1, 5, w, p)
    with pytest.raises(GridError):
        field_grid((0.0, 0.0), (0.0, 1.0), 5, 5, w, p)


def test_grid_matches_pointwise_phase():
    w, p, ctx = spacetime_figure_parameters()
    grid = field_grid((0.0, 1.0 / ctx.c), (0.0, 1.0), 7, 9, w, p, ctx)
    for i, t in enumerate(grid.t):
        for j, z in enumerate(grid.z):
            assert grid.scaled_phase[i, j] == pytest.approx(eikonal_phase(t, (0.0, 0.0), z, w, ctx) / w.k_z, rel=1e-14, abs=1e-15)
    assert grid.scaled_phase[0, 0] == 0.0


def test_grid_phase_identical_without_dilaton():
    w, p, ctx = spacetime_figure_parameters()
    with_field = field_grid((0.0, 1.0 / ctx.c), (0.0, 1.0), 20, 20, w, p, ctx)
    without = field_grid((0.0, 1.0 / ctx.c), (0.0, 1.0), 20, 20, w, DilatonParams(), ctx)
    assert np.array_equal(with_field.scaled_phase, without.scaled_phase)
    assert np.array_equal(with_field.Kz_scaled, without.Kz_scaled)
    assert not np.array_equal(with_field.amplitude_dev, without.amplitude_dev)


def test_figure_light_cone():
    w, p, ctx = spacetime_figure_parameters()
    z = np.linspace(0.0, 1.0, 200)
    cut = light_cone_cut(z, 0.0, w, p, ctx)
    assert np.all(np.diff(cut["minus_Kz_scaled"]) < 0)
    assert np.ptp(cut["amplitude_dev"]) > 0
    assert np.all(np.diff(light_cone(z, 0.0, w, ctx)) > 0)


def test_grid_csv(tmp_path):
    w, p, ctx = spacetime_figure_parameters()
    grid = field_grid((0.0, 1.0 / ctx.c), (0.0, 1.0), 3, 4, w, p, ctx)
    fn = tmp_path / "grid.csv"
    assert grid.to_csv(str(fn)) == 12
    lines = fn.read_text().splitlines()
    assert lines[0] == "t,z,scaled_phase,amplitude_dev,K0_scaled,Kz_scaled"
    assert len(lines) == 13
    assert lines[1].split(",")[2] == "0"


def _transport_setup(s):
    ctx = PhysicalContext(g=s * C**2)
    p = dilaton_params(rho0_bar=s, k_rho=1.0, lambda_rho=1 / np.sqrt(3), beta_S_bar=0.3, d_e=1.0, ctx=ctx)
    w = wave_spec(2 * np.pi, q=(1.0, 0.5))
    return w, p, ctx


def test_transport_residual_second_order_in_perturbations():
    t, z = 0.37 / C, 0.61
    residuals = []
    for s in (1e-3, 5e-4):
        w, p, ctx = _transport_setup(s)
        residuals.append(abs(amplitude_transport_residual(t, z, w, p, ctx)))
    assert residuals[0] / residuals[1] == pytest.approx(4.0, rel=0.1)


def test_transport_residual_converges_in_step():
    t, z = 0.37 / C, 0.61
    w, p, ctx = _transport_setup(1e-2)
    r = [amplitude_transport_residual(t, z, w, p, ctx, h=h, richardson=False) for h in (0.04, 0.02, 0.01)]
    assert (r[0] - r[1]) / (r[1] - r[2]) == pytest.approx(4.0, rel=0.1)


def test_transport_residual_time_derivative():
    t, z = 0.37 / C, 0.61
    w, p, ctx = _transport_setup(1e-3)
    spatial = amplitude_transport_residual(t, z, w, p, ctx)
    full = amplitude_transport_residual(t, z, w, p, ctx, include_time_derivative=True)
    assert full != spatial
