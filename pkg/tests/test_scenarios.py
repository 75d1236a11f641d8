import numpy as np
import pytest

from dilatonmodels import (
    DarkMatterScenario,
    EepScenario,
    GradiometerScenario,
    OpticsGridScenario,
    PhaseScenario,
    ValidateScenario,
)
from dilatonmodels.base import write_csv
from dilatonmodels.core import C, G_EARTH


def test_defaults_and_update():
    model = PhaseScenario(T_s=0.2)
    assert model.T_s == 0.2
    assert model.parameters["geometry"] == "mach_zehnder"
    model.update(beta=1e-7)
    assert model.parameters["beta"] == 1e-7
    assert model.warnings(**model.parameters) == []


def test_phase_scenario_mach_zehnder():
    model = PhaseScenario()
    row = model.row({"T_s": 0.2})
    assert row["T_s"] == 0.2
    assert row["phi0_rad"] == pytest.approx(-model.k_per_m * 9.81 * 0.2**2, rel=1e-12)
    assert row["dev_engine_closed"] < 1e-9
    assert row["total_rad"] == pytest.approx(row["closed_total_rad"], rel=1e-9)


def test_phase_scenario_ramsey_borde():
    model = PhaseScenario(geometry="ramsey_borde", T_prime_s=0.05, terms=["wave_vector_mod", "dilaton_linear"])
    out = model.evaluate(**model.parameters)
    assert out["phi_fsl_rad"] == 0.0
    assert np.isnan(out["closed_total_rad"])
    assert np.isnan(out["dev_engine_closed"])


def test_phase_scenario_ramsey_borde_defaults():
    model = PhaseScenario(geometry="ramsey_borde", beta=1e-7)
    assert "fsl" in model.parameters["terms"]
    out = model.evaluate(**model.parameters)
    assert out["phi_fsl_rad"] == 0.0
    assert out["dilaton_linear_rad"] != 0.0


def test_phase_scenario_single_term():
    model = PhaseScenario(terms="fsl")
    out = model.evaluate(**model.parameters)
    assert out["phi_fsl_rad"] != 0.0
    assert out["dilaton_linear_rad"] == 0.0
    assert out["wave_vector_mod_rad"] == 0.0


def test_phase_scenario_unknown_geometry():
    model = PhaseScenario(geometry="butterfly")
    with pytest.raises(ValueError):
        model.evaluate(**model.parameters)


def test_phase_scenario_oscillation_term():
    model = PhaseScenario(
        g_m_per_s2=0.0,
        rho0=1e-15,
        omega_rho_rad_per_s=2.0,
        k_rho_per_m=1e-9,
        phi_rho_rad=0.4,
        terms=["dilaton_oscillation"],
    )
    out = model.evaluate(**model.parameters)
    assert out["dilaton_oscillation_rad"] != 0.0
    assert out["dev_engine_closed"] == 0.0


def test_phase_scenario_save(tmp_path):
    model = PhaseScenario()
    points = [{"T_s": T} for T in (0.05, 0.1, 0.2)]
    serial = tmp_path / "serial.csv"
    parallel = tmp_path / "parallel.csv"
    assert model.evaluate_and_save(str(serial), points) == 3
    assert model.evaluate_and_save(str(parallel), points, jobs=2) == 3
    assert serial.read_text() == parallel.read_text()
    header = serial.read_text().splitlines()[0].split(",")
    assert header[0] == "geometry"
    assert "total_rad" in header and "dev_engine_closed" in header


def test_gradiometer_scenario():
    model = GradiometerScenario(delta_g_m_per_s2=-3.1e-3, T_s=0.1)
    out = model.evaluate(**model.parameters)
    assert out["g_ell_over_c2"] == pytest.approx(9.81 * 1000 / C**2, rel=1e-15)
    assert out["dev_closed_single"] < 1e-8
    assert out["delta_phi_scaled"] == pytest.approx(out["delta_phi_rad"] / (model.k_per_m * 9.81 * 0.01), rel=1e-14)
    assert out["delta_phi_rad"] > 0


def test_eep_scenario_identical_species():
    model = EepScenario()
    out = model.evaluate(**model.parameters)
    assert out["chi"] == 1.0
    assert out["theta_plus"] == 0.0 and out["theta_minus"] == 0.0
    assert out["theta_plus_from_phases"] == pytest.approx(0.0, abs=1e-20)


def test_eep_scenario_violation():
    model = EepScenario(beta_b=1e-10, dm_kg=-3.3e-27, dk_per_m=1e3)
    out = model.evaluate(**model.parameters)
    assert out["k_reversal"] == pytest.approx(1e-10, rel=1e-9)
    assert out["dev_k_reversal"] < 1e-9
    assert out["theta_plus"] != out["theta_minus"]
    assert out["theta_plus_from_phases"] == pytest.approx(out["theta_plus"], rel=1e-9)


def test_eep_scenario_without_gravity():
    model = EepScenario(g_m_per_s2=0.0, beta_b=1e-10)
    out = model.evaluate(**model.parameters)
    assert "theta_plus_from_phases" not in out
    assert out["k_reversal"] == pytest.approx(1e-10, rel=1e-12)


def test_darkmatter_scenario():
    model = DarkMatterScenario(samples=256)
    out = model.evaluate(**model.parameters)
    assert out["phi_sa_numeric_rad"] == pytest.approx(out["phi_sa_rad"], rel=1e-10)
    assert abs(out["phi_sa_signed_rad"]) == out["phi_sa_rad"]
    assert out["dev_engine_closed"] < 1e-8
    assert out["resonance_x0"] == 0.5
    assert abs(out["delta_phi_rad"]) <= out["phi_sa_rad"]


def test_darkmatter_scenario_optional_columns():
    model = DarkMatterScenario(samples=0, engine=False)
    out = model.evaluate(**model.parameters)
    assert "phi_sa_numeric_rad" not in out
    assert "engine_delta_phi_rad" not in out


def test_darkmatter_scenario_sweep(tmp_path):
    model = DarkMatterScenario(samples=0, engine=False)
    points = [{"omega_rho_rad_per_s": w} for w in np.linspace(1.0, 12.0, 12)]
    fn = tmp_path / "resonance.csv"
    assert model.evaluate_and_save(str(fn), points) == 12
    assert len(fn.read_text().splitlines()) == 13


def test_optics_grid_warnings():
    figure = OpticsGridScenario()
    messages = figure.warnings(**figure.parameters)
    assert len(messages) == 2
    assert "geometrical optics" in messages[0]
    laser = OpticsGridScenario(figure=False)
    assert laser.warnings(**laser.parameters) == []


def test_optics_grid_evaluate():
    model = OpticsGridScenario(n_t=20, n_z=30)
    out = model.evaluate(**model.parameters)
    assert out["epsilon"] == pytest.approx(1.0)
    assert out["scaled_phase_max"] > out["scaled_phase_min"]
    assert out["amplitude_dev_max"] > out["amplitude_dev_min"]
    assert out["cone_amplitude_range"] > 0
    assert np.isfinite(out["null_residual_max"])


def test_optics_grid_save(tmp_path):
    model = OpticsGridScenario(n_t=5, n_z=4)
    fn = tmp_path / "grid.csv"
    assert model.evaluate_and_save(str(fn), [{}]) == 20
    assert fn.read_text().splitlines()[0] == "t,z,scaled_phase,amplitude_dev,K0_scaled,Kz_scaled"
    with pytest.raises(ValueError):
        model.evaluate_and_save(str(fn), [{"L_m": 1.0}, {"L_m": 2.0}])


def test_optics_grid_explicit_fields():
    model = OpticsGridScenario(
        figure=False, g_m_per_s2=G_EARTH, rho0_bar=1e-3, k_rho_per_m=1.0, lambda_rho_m=0.5, d_e=1.0, n_t=4, n_z=4
    )
    out = model.evaluate(**model.parameters)
    assert out["epsilon"] == pytest.approx(1.064e-6, rel=1e-12)
    assert out["amplitude_dev_max"] > 0


def test_validate_scenario(tmp_path):
    model = ValidateScenario(draws=2)
    fn = tmp_path / "validate.csv"
    assert model.evaluate_and_save(str(fn), [{}]) == 10
    assert model.failures == 0
    summary = model.evaluate(**model.parameters)
    assert summary == {**summary, "rows": 10, "failed": 0}
    with pytest.raises(ValueError):
        model.evaluate_and_save(str(fn), [{}, {}])


def test_write_csv_formats(tmp_path):
    fn = tmp_path / "rows.csv"
    assert write_csv(str(fn), [{"a": 0.1, "b": True, "c": [1.0, 2.0], "d": 3}]) == 1
    assert fn.read_text() == "a,b,c,d\n0.10000000000000001,true,1;2,3\n"
