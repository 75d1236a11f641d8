"""
Runnable scenarios, resolved by name from the `dilatonai` CLI. Parameter
names carry their units.
"""
import numpy as np

from .base import Scenario, write_csv
from .closed_forms import (
    DarkMatterPair,
    EepPair,
    GradiometerPair,
    dm_differential_phase,
    dm_pair_specs,
    dm_signal_amplitude,
    eep_theta,
    eep_theta_from_phases,
    gradiometer_from_single,
    gradiometer_phase,
    k_reversal,
    k_reversal_closed,
    single_phase_terms,
)
from .core import DilatonParams, PhysicalContext, dilaton_params, dilaton_value
from .engine import PerturbationTerm, TermKind, term_phase, terms, total_phase
from .geometry import Species, mach_zehnder, ramsey_borde
from .optics import epsilon_scale, field_grid, light_cone_cut, null_residual, spacetime_figure_parameters, wave_spec
from .oracle import QuadratureConfig, phi_sa_numeric, validation_report

__all__ = [
    "PhaseScenario",
    "GradiometerScenario",
    "EepScenario",
    "DarkMatterScenario",
    "OpticsGridScenario",
    "ValidateScenario",
]

RB87_MASS = 1.443160648e-25
RB87_K = 1.61e7


def relative_deviation(a: float, b: float, floor: float = 1e-30) -> float:
    return abs(a - b) / max(abs(b), floor)


class PhaseScenario(Scenario):

    """
    Single interferometer phase, term by term, next to the closed form.
    `terms` is a list of term names or a single name. The finite speed of
    light term only exists for Mach-Zehnder sequences and is skipped for
    Ramsey-Bordé.
    """

    defaults = {
        "geometry": "mach_zehnder",
        "T_s": 0.1,
        "T_prime_s": 0.05,
        "k_per_m": RB87_K,
        "m_kg": RB87_MASS,
        "z0_m": 0.0,
        "v0_m_per_s": 0.0,
        "beta": 0.0,
        "rho0": 0.0,
        "omega_rho_rad_per_s": 0.0,
        "k_rho_per_m": 0.0,
        "phi_rho_rad": 0.0,
        "g_m_per_s2": 9.81,
        "terms": ["wave_vector_mod", "dilaton_linear", "fsl"],
    }

    def spec(self, **p):
        ctx = PhysicalContext(g=p["g_m_per_s2"])
        species = Species(p["m_kg"], p["beta"], p["rho0"])
        dilaton = DilatonParams(k_rho=p["k_rho_per_m"], omega_rho=p["omega_rho_rad_per_s"], phi_rho=p["phi_rho_rad"])
        if p["geometry"] == "mach_zehnder":
            return mach_zehnder(p["T_s"], p["k_per_m"], species, p["z0_m"], p["v0_m_per_s"], dilaton, ctx)
        if p["geometry"] == "ramsey_borde":
            return ramsey_borde(
                p["T_s"], p["T_prime_s"], p["k_per_m"], species, p["z0_m"], p["v0_m_per_s"], dilaton, ctx
            )
        raise ValueError(f"unknown geometry '{p['geometry']}'")

    def evaluate(self, **p) -> dict:
        spec = self.spec(**p)
        requested = p["terms"]
        selected = terms(*([requested] if isinstance(requested, str) else requested))
        if p["geometry"] != "mach_zehnder":
            selected = [t for t in selected if t.kind is not TermKind.FSL]
        record = total_phase(spec, selected).as_record()
        out = {f"{name}_rad": value for name, value in record.items()}

        if p["geometry"] == "mach_zehnder":
            closed = single_phase_terms(
                p["k_per_m"], p["T_s"], p["m_kg"], p["z0_m"], p["v0_m_per_s"], p["beta"], spec.ctx
            )
            names = ["phi0"] + ["phi_fsl" if t.kind is TermKind.FSL else t.name for t in selected]
            # no closed form exists for the oscillating term at g != 0
            names = [n for n in names if n != TermKind.DILATON_OSCILLATION.value]
            closed_total = sum(closed[n] for n in names)
            engine_total = sum(record[n] for n in names)
            out["closed_total_rad"] = closed_total
            out["dev_engine_closed"] = relative_deviation(engine_total, closed_total)
        else:
            out["closed_total_rad"] = np.nan
            out["dev_engine_closed"] = np.nan

        return out


class GradiometerScenario(Scenario):
    defaults = {
        "ell_m": 1000.0,
        "g_m_per_s2": 9.81,
        "delta_g_m_per_s2": 0.0,
        "T_s": 0.1,
        "k_per_m": RB87_K,
        "m_kg": RB87_MASS,
        "v0_m_per_s": 0.0,
        "z0_m": 0.0,
        "beta": 0.0,
    }

    def evaluate(self, **p) -> dict:
        ctx = PhysicalContext(g=p["g_m_per_s2"])
        pair = GradiometerPair(
            ell=p["ell_m"],
            g=p["g_m_per_s2"],
            delta_g=p["delta_g_m_per_s2"],
            T=p["T_s"],
            k=p["k_per_m"],
            m=p["m_kg"],
            v0=p["v0_m_per_s"],
            z0=p["z0_m"],
        )
        delta = gradiometer_phase(pair, p["beta"], ctx)
        composed = gradiometer_from_single(pair, p["beta"], ctx)
        scale = pair.k * pair.g * pair.T**2
        return {
            "delta_phi_rad": delta,
            "delta_phi_scaled": delta / scale,
            "g_ell_over_c2": pair.g * pair.ell / ctx.c**2,
            "from_single_rad": composed,
            "dev_closed_single": relative_deviation(composed, delta),
        }


class EepScenario(Scenario):

    """
    Two species differential phase theta_{+-k} and its k-reversal.
    """

    defaults = {
        "m_kg": RB87_MASS,
        "dm_kg": 0.0,
        "k_per_m": RB87_K,
        "dk_per_m": 0.0,
        "beta_a": 0.0,
        "beta_b": 0.0,
        "v0_m_per_s": 0.0,
        "dv0_m_per_s": 0.0,
        "z0_m": 0.0,
        "dz0_m": 0.0,
        "g_m_per_s2": 9.81,
        "T_s": 0.1,
    }

    def evaluate(self, **p) -> dict:
        ctx = PhysicalContext()
        pair = EepPair(
            m=p["m_kg"],
            dm=p["dm_kg"],
            k=p["k_per_m"],
            dk=p["dk_per_m"],
            beta_a=p["beta_a"],
            beta_b=p["beta_b"],
            v0=p["v0_m_per_s"],
            dv0=p["dv0_m_per_s"],
            z0=p["z0_m"],
            dz0=p["dz0_m"],
        )
        g, T = p["g_m_per_s2"], p["T_s"]
        reversal = k_reversal(pair, g, T, ctx)
        closed = k_reversal_closed(pair, g, T, ctx)
        out = {
            "chi": pair.chi,
            "theta_plus": eep_theta(pair, 1, g, T, ctx),
            "theta_minus": eep_theta(pair, -1, g, T, ctx),
            "k_reversal": reversal,
            "k_reversal_closed": closed,
            "dev_k_reversal": relative_deviation(reversal, closed),
        }
        if g > 0:
            out["theta_plus_from_phases"] = eep_theta_from_phases(pair, 1, g, T, ctx)
            out["theta_minus_from_phases"] = eep_theta_from_phases(pair, -1, g, T, ctx)
        return out


class DarkMatterScenario(Scenario):

    """
    Differential phase and signal amplitude of the spaceborne gradiometer in
    an oscillating dilaton background. The engine columns integrate the
    oscillating term along both devices' branches. Set `samples` to 0 to skip
    the numerical phi_rho average.
    """

    defaults = {
        "ell_m": 1.0e4,
        "T_s": 1.0,
        "k_per_m": RB87_K,
        "m_kg": RB87_MASS,
        "v0_m_per_s": 0.0,
        "rho0": 1.0e-15,
        "omega_rho_rad_per_s": 1.0,
        "k_rho_per_m": 1.6e-9,
        "phi_rho_rad": 0.0,
        "samples": 10000,
        "engine": True,
    }

    def evaluate(self, **p) -> dict:
        ctx = PhysicalContext(g=0.0)
        pair = DarkMatterPair(
            ell=p["ell_m"],
            T=p["T_s"],
            k=p["k_per_m"],
            m=p["m_kg"],
            v0=p["v0_m_per_s"],
            rho0=p["rho0"],
            omega_rho=p["omega_rho_rad_per_s"],
            k_rho=p["k_rho_per_m"],
            phi_rho=p["phi_rho_rad"],
        )
        delta = dm_differential_phase(pair, ctx)
        out = {
            "resonance_x0": 0.5 * pair.T * (pair.omega_rho - pair.v0 * pair.k_rho),
            "resonance_xT": 0.5 * pair.T * (pair.omega_rho - pair.v_T(ctx) * pair.k_rho),
            "delta_phi_rad": delta,
            "phi_sa_rad": dm_signal_amplitude(pair, ctx),
            "phi_sa_signed_rad": dm_signal_amplitude(pair, ctx, signed=True),
        }
        if p["samples"]:
            out["phi_sa_numeric_rad"] = phi_sa_numeric(pair, int(p["samples"]), ctx)
        if p["engine"]:
            term = PerturbationTerm(TermKind.DILATON_OSCILLATION)
            upper, lower = dm_pair_specs(pair, ctx)
            engine = term_phase(upper, term) - term_phase(lower, term)
            envelope = abs(pair.rho0 * (ctx.c * pair.k * pair.T) ** 2 * pair.k_rho / pair.k)
            out["engine_delta_phi_rad"] = engine
            out["dev_engine_closed"] = abs(engine - delta) / max(envelope, 1e-30)
        return out


class OpticsGridScenario(Scenario):

    """
    Spacetime grid of the scaled phase, amplitude and wave vector. Axes are
    given in units of L (z) and L/c (t). With `figure` set the exaggerated
    figure parameters are used, otherwise the explicit field parameters.
    """

    defaults = {
        "figure": True,
        "L_m": 1.0,
        "ct_min_over_L": 0.0,
        "ct_max_over_L": 1.0,
        "z_min_over_L": 0.0,
        "z_max_over_L": 1.0,
        "n_t": 200,
        "n_z": 200,
        "g_m_per_s2": 9.81,
        "k_z_per_m": 2 * np.pi / 1064e-9,
        "q_per_m": [0.0, 0.0],
        "rho0_bar": 0.0,
        "k_rho_per_m": 0.0,
        "lambda_rho_m": np.inf,
        "phi_rho_rad": 0.0,
        "beta_S_bar": 0.0,
        "d_e": 0.0,
    }

    def fields(self, **p) -> tuple:
        L = p["L_m"]
        if p["figure"]:
            return spacetime_figure_parameters(L)
        ctx = PhysicalContext(g=p["g_m_per_s2"])
        w = wave_spec(p["k_z_per_m"], tuple(p["q_per_m"]))
        dp = dilaton_params(
            p["rho0_bar"], p["k_rho_per_m"], float(p["lambda_rho_m"]), p["phi_rho_rad"], p["beta_S_bar"], p["d_e"], ctx
        )
        return w, dp, ctx

    def warnings(self, **p) -> list:
        w, dp, ctx = self.fields(**p)
        L = p["L_m"]
        messages = []
        eps = epsilon_scale(2 * np.pi / abs(w.k_z), L)
        if not eps.valid:
            messages.append(f"wavelength over L = {eps.value:.3g}, geometrical optics does not apply")
        z_max = max(abs(p["z_min_over_L"]), abs(p["z_max_over_L"])) * L
        if not dilaton_value(0.0, z_max, dp, ctx).light_dilaton_valid:
            messages.append(f"Compton wavelength {dp.lambda_rho:.3g} m is not large against z = {z_max:.3g} m")
        return messages

    def grid(self, **p):
        w, dp, ctx = self.fields(**p)
        L = p["L_m"]
        t_range = (p["ct_min_over_L"] * L / ctx.c, p["ct_max_over_L"] * L / ctx.c)
        z_range = (p["z_min_over_L"] * L, p["z_max_over_L"] * L)
        return field_grid(t_range, z_range, int(p["n_t"]), int(p["n_z"]), w, dp, ctx, L)

    def evaluate(self, **p) -> dict:
        w, dp, ctx = self.fields(**p)
        grid = self.grid(**p)
        L = p["L_m"]
        z = np.linspace(p["z_min_over_L"] * L, p["z_max_over_L"] * L, int(p["n_z"]))
        cut = light_cone_cut(z, 0.0, w, dp, ctx)
        return {
            "epsilon": epsilon_scale(2 * np.pi / abs(w.k_z), L).value,
            "scaled_phase_min": float(np.min(grid.scaled_phase)),
            "scaled_phase_max": float(np.max(grid.scaled_phase)),
            "amplitude_dev_min": float(np.min(grid.amplitude_dev)),
            "amplitude_dev_max": float(np.max(grid.amplitude_dev)),
            "cone_amplitude_range": float(np.ptp(cut["amplitude_dev"])),
            "null_residual_max": float(np.max(np.abs(null_residual(z, w, ctx)))),
        }

    def evaluate_and_save(self, fn: str, points: list, jobs: int = 1) -> int:
        if len(points) != 1:
            raise ValueError("optics grids do not sweep, remove the sweep axes")
        params = {**self.parameters, **points[0]}
        grid = self.grid(**params)
        self.log(f"Writing {grid.scaled_phase.size} grid nodes to {fn}")
        return grid.to_csv(fn)


class ValidateScenario(Scenario):

    """
    Engine against closed forms against the quadrature oracle on random
    draws. `failures` holds the number of rows outside the tolerance after
    `evaluate_and_save`.
    """

    defaults = {
        "draws": 50,
        "seed": 0,
        "tol": 1e-8,
        "abs_tol_rad": 1e-30,
        "rel_tol": 1e-10,
        "max_subdivisions": 2000,
    }

    failures = 0

    def report(self, **p) -> list:
        cfg = QuadratureConfig(p["abs_tol_rad"], p["rel_tol"], int(p["max_subdivisions"]))
        return validation_report(int(p["draws"]), int(p["seed"]), p["tol"], cfg)

    def evaluate(self, **p) -> dict:
        rows = self.report(**p)
        failed = sum(not r["passed"] for r in rows)
        return {
            "rows": len(rows),
            "failed": failed,
            "max_dev_engine_closed": max(r["dev_engine_closed"] for r in rows),
            "max_dev_engine_oracle": max(r["dev_engine_oracle"] for r in rows),
        }

    def evaluate_and_save(self, fn: str, points: list, jobs: int = 1) -> int:
        if len(points) != 1:
            raise ValueError("validation does not sweep, remove the sweep axes")
        rows = self.report(**{**self.parameters, **points[0]})
        self.failures = sum(not r["passed"] for r in rows)
        self.log(f"Writing {len(rows)} validation rows to {fn}")
        for r in rows:
            if not r["passed"]:
                self.log(f"draw {r['draw']} term {r['term']}: closed {r['dev_engine_closed']:.3e}, oracle {r['dev_engine_oracle']:.3e}")
        return write_csv(fn, rows)
