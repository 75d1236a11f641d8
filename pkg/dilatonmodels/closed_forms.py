"""
Analytic interferometer phases to lowest order in all perturbations: the
single Mach-Zehnder phase, the gradiometer, the two-species differential
phase and its k-reversal, and the oscillating dilaton detector.
"""
import numpy as np

from dataclasses import dataclass

from .core import DilatonParams, PhysicalContext, PhysicsPreconditionError, dispersion, sinc
from .geometry import Species, mach_zehnder


def _out(x):
    x = np.asarray(x)
    return float(x) if x.ndim == 0 else x


def single_phase_terms(
    k: float,
    T: float,
    m: float,
    z0: float = 0.0,
    v0: float = 0.0,
    beta: float = 0.0,
    ctx: PhysicalContext = PhysicalContext(),
) -> dict:
    """
    Mach-Zehnder phase split like `PhaseBreakdown.as_record`:

        -phi / (kgT^2) = 1 + beta + 3 v_T/c + v0 v_T/c^2 - g z_T/c^2
                         - (gT/c^2)(v0 + hbar k/2m - gT) + g^2 T^2/(4c^2)

    with v_T = v0 - gT + hbar k/m and z_T = z0 + v0 T - gT^2/2 + hbar k T/m on
    the upper branch at the central pulse. The terms in 1/c^2 come from the
    modified wave vector.
    """
    c, g = ctx.c, ctx.g
    v_r = ctx.hbar * k / m
    v_T = v0 - g * T + v_r
    z_T = z0 + v0 * T - 0.5 * g * T**2 + v_r * T
    scale = -k * g * T**2

    wave = (v0 * v_T - g * z_T - g * T * (v0 + 0.5 * v_r - g * T) + 0.25 * g**2 * T**2) / c**2
    terms = {
        "phi0": scale,
        "wave_vector_mod": scale * wave,
        "dilaton_linear": scale * beta,
        "dilaton_oscillation": 0.0,
        "phi_fsl": scale * 3 * v_T / c,
    }
    terms["total"] = sum(terms.values())
    return terms


def single_phase(k, T, m, z0=0.0, v0=0.0, beta=0.0, ctx: PhysicalContext = PhysicalContext()) -> float:
    return single_phase_terms(k, T, m, z0, v0, beta, ctx)["total"]


@dataclass(frozen=True)
class GradiometerPair:
    ell: float
    g: float
    delta_g: float
    T: float
    k: float
    m: float
    v0: float = 0.0
    z0: float = 0.0

    def __post_init__(self):
        if not self.ell > 0:
            raise PhysicsPreconditionError(f"separation must be positive (ell = {self.ell})")
        if not self.m > 0:
            raise PhysicsPreconditionError(f"atomic mass must be positive (m = {self.m})")

    def v_T(self, ctx: PhysicalContext = PhysicalContext()) -> float:
        """
        Upper branch velocity at the central pulse, shared by both devices.
        """
        return self.v0 - self.g * self.T + ctx.hbar * self.k / self.m


def gradiometer_phase(pair: GradiometerPair, beta: float = 0.0, ctx: PhysicalContext = PhysicalContext()) -> float:
    """
    delta_phi = phi_1 - phi_2 of two devices a height ell apart (device 1 on
    top) with local accelerations g +- delta_g/2:

        delta_phi / (kgT^2) = -(delta_g/g)(1 + beta + 3(v_T - gT)/c) + g ell/c^2
    """
    if pair.g == 0:
        raise PhysicsPreconditionError("gradiometer phase is normalised by g, which must be non-zero")
    c, g = ctx.c, pair.g
    v_T = pair.v_T(ctx)
    ratio = -(pair.delta_g / g) * (1 + beta + 3 * (v_T - g * pair.T) / c) + g * pair.ell / c**2
    return pair.k * g * pair.T**2 * ratio


def gradiometer_from_single(pair: GradiometerPair, beta: float = 0.0, ctx: PhysicalContext = PhysicalContext()) -> float:
    """
    The same difference composed from two `single_phase` evaluations. Agrees
    with `gradiometer_phase` up to the delta_g/c^2 cross terms.
    """
    upper = single_phase(pair.k, pair.T, pair.m, pair.z0 + pair.ell, pair.v0, beta, ctx.with_g(pair.g + 0.5 * pair.delta_g))
    lower = single_phase(pair.k, pair.T, pair.m, pair.z0, pair.v0, beta, ctx.with_g(pair.g - 0.5 * pair.delta_g))
    return upper - lower


@dataclass(frozen=True)
class EepPair:
    """
    Two species (or internal states) a and b with m_j = m + lambda_j dm/2,
    k_j = k + lambda_j dk/2, v0_j = v0 + lambda_j dv0/2 and z0_j = z0 + lambda_j dz0,
    lambda_a = -1 and lambda_b = +1. Heights carry no factor 1/2, so
    z0_b - z0_a = 2 dz0.
    """

    m: float
    dm: float = 0.0
    k: float = 1.0
    dk: float = 0.0
    beta_a: float = 0.0
    beta_b: float = 0.0
    v0: float = 0.0
    dv0: float = 0.0
    z0: float = 0.0
    dz0: float = 0.0

    def __post_init__(self):
        if not self.m > 0:
            raise PhysicsPreconditionError(f"mean mass must be positive (m = {self.m})")
        if not abs(self.dm) < 2 * self.m:
            raise PhysicsPreconditionError(f"mass difference must satisfy |dm| < 2m (dm = {self.dm}, m = {self.m})")
        if not self.k - 0.5 * abs(self.dk) > 0:
            raise PhysicsPreconditionError(f"both wave numbers must be positive (k = {self.k}, dk = {self.dk})")

    @property
    def mass_ratio(self) -> float:
        """
        Omega / omega_C = dm / m.
        """
        return self.dm / self.m

    @property
    def chi(self) -> float:
        return 1.0 / (1.0 - (0.5 * self.mass_ratio) ** 2)

    @property
    def delta_beta(self) -> float:
        return self.beta_b - self.beta_a

    def v_r(self, ctx: PhysicalContext = PhysicalContext()) -> float:
        return ctx.hbar * self.k / self.m

    def species(self, j: str) -> dict:
        lam = -1.0 if j == "a" else 1.0
        return {
            "m": self.m + 0.5 * lam * self.dm,
            "k": self.k + 0.5 * lam * self.dk,
            "beta": self.beta_a if j == "a" else self.beta_b,
            "v0": self.v0 + 0.5 * lam * self.dv0,
            "z0": self.z0 + lam * self.dz0,
        }


def _eep_parts(pair: EepPair, g: float, T: float, ctx: PhysicalContext) -> tuple:
    """
    (kick independent, kick linear) parts of theta_k.
    """
    c = ctx.c
    dv0 = pair.dv0
    free = (
        pair.delta_beta
        + 3 * dv0 / c
        - g / c**2 * (pair.dz0 + 3 * dv0 * T)
        + 2 * pair.v0 * dv0 / c**2
    )
    v_r = pair.v_r(ctx)
    dk_k = pair.dk / pair.k
    linear = pair.chi * (v_r / c) * (3 - 1.5 * g * T / c + pair.v0 / c) * (dk_k - pair.mass_ratio)
    linear += pair.chi * (v_r * dv0 / c**2) * (1 - 0.25 * dk_k * pair.mass_ratio)
    return free, linear


def _check_sign(sign):
    if sign not in (1, -1):
        raise ValueError(f"kick direction must be +1 or -1 (got {sign})")


def eep_theta(pair: EepPair, sign: int, g: float, T: float, ctx: PhysicalContext = PhysicalContext()) -> float:
    """
    theta_{+-k} = phi_a/(|k_a| g T^2) - phi_b/(|k_b| g T^2). Reversing the
    kicks negates every term that does not scale with them.
    """
    _check_sign(sign)
    free, linear = _eep_parts(pair, g, T, ctx)
    return sign * free + linear


def eep_theta_from_phases(pair: EepPair, sign: int, g: float, T: float, ctx: PhysicalContext = PhysicalContext()) -> float:
    """
    theta_{+-k} composed term by term from `single_phase_terms` of both
    species. The heights z0 +- dz0 are 2 dz0 apart, so the height term comes
    out as -2 g dz0/c^2 (times the kick direction) where `eep_theta` has
    -g dz0/c^2.
    """
    _check_sign(sign)
    if not g > 0:
        raise PhysicsPreconditionError("theta is normalised by g, which must be positive")
    gctx = ctx.with_g(g)
    norm, phases = {}, {}
    for j in ("a", "b"):
        s = pair.species(j)
        k = sign * s["k"]
        phases[j] = single_phase_terms(k, T, s["m"], s["z0"], s["v0"], s["beta"], gctx)
        norm[j] = abs(k) * g * T**2
    names = [n for n in phases["a"] if n != "total"]
    return sum(phases["a"][n] / norm["a"] - phases["b"][n] / norm["b"] for n in names)


def k_reversal(pair: EepPair, g: float, T: float, ctx: PhysicalContext = PhysicalContext()) -> float:
    """
    (theta_k - theta_{-k}) / 2, where all kick linear effects cancel.
    """
    return 0.5 * (eep_theta(pair, 1, g, T, ctx) - eep_theta(pair, -1, g, T, ctx))


def k_reversal_closed(pair: EepPair, g: float, T: float, ctx: PhysicalContext = PhysicalContext()) -> float:
    c = ctx.c
    dv0 = pair.dv0
    return (
        pair.delta_beta
        + 3 * dv0 / c
        + 2 * pair.v0 * dv0 / c**2
        - g * pair.dz0 / c**2
        - 3 * g * dv0 * T / c**2
    )


@dataclass(frozen=True)
class DarkMatterPair:
    """
    Two identical g = 0 Mach-Zehnder devices a distance ell apart whose pulses
    reach them ell/c apart. `rho0` is the atom coupling; omega_rho, k_rho and
    phi_rho describe the oscillating background.

    `lambda_rho` is the Compton wavelength when the pair is built by
    `dark_matter_pair`, which derives omega_rho from it.
    """

    ell: float
    T: float
    k: float
    m: float
    v0: float = 0.0
    rho0: float = 0.0
    omega_rho: float = 0.0
    k_rho: float = 0.0
    phi_rho: float = 0.0
    g: float = 0.0
    lambda_rho: float = None

    def __post_init__(self):
        if self.g != 0:
            raise PhysicsPreconditionError(f"dark matter detector requires microgravity, g = 0 (g = {self.g})")
        if not self.ell >= 0:
            raise PhysicsPreconditionError(f"separation must be non-negative (ell = {self.ell})")
        if not self.T > 0:
            raise PhysicsPreconditionError(f"interrogation time must be positive (T = {self.T})")
        if self.k == 0:
            raise PhysicsPreconditionError("effective wave number must be non-zero")
        if not self.m > 0:
            raise PhysicsPreconditionError(f"atomic mass must be positive (m = {self.m})")

    def v_T(self, ctx: PhysicalContext = PhysicalContext()) -> float:
        return self.v0 + ctx.hbar * self.k / self.m

    def z_bar(self, ctx: PhysicalContext = PhysicalContext()) -> float:
        """
        Mean upper branch position of both devices at their central pulses.
        """
        return self.ell + self.v0 * self.T + 0.5 * ctx.hbar * self.k * self.T / self.m


def dark_matter_pair(
    ell: float,
    T: float,
    k: float,
    m: float,
    v0: float = 0.0,
    rho0: float = 0.0,
    k_rho: float = 0.0,
    lambda_rho: float = np.inf,
    phi_rho: float = 0.0,
    ctx: PhysicalContext = PhysicalContext(),
) -> DarkMatterPair:
    """
    Detector in a background of Compton wavelength `lambda_rho`, with
    omega_rho from the dispersion relation.
    """
    omega = dispersion(k_rho, lambda_rho, ctx)
    return DarkMatterPair(ell, T, k, m, v0, rho0, omega, k_rho, phi_rho, 0.0, lambda_rho)


def frequency_mismatch(pair: DarkMatterPair, ctx: PhysicalContext = PhysicalContext()) -> float:
    """
    omega_rho - c k_rho. From the Compton wavelength this is

        (c / lambda^2) / (k_rho + sqrt(k_rho^2 + 1/lambda^2))

    which vanishes exactly for a massless dilaton.
    """
    c = ctx.c
    if pair.lambda_rho is None:
        return pair.omega_rho - c * pair.k_rho
    inv = 1.0 / pair.lambda_rho
    if inv == 0:
        return 0.0
    return c * inv**2 / (pair.k_rho + np.hypot(pair.k_rho, inv))


def _dm_factors(pair: DarkMatterPair, ctx: PhysicalContext) -> tuple:
    """
    rho0 (ckT)^2 k_rho/k, the two sinc envelopes and the mismatch
    sin((omega ell / 2c)(1 - c k_rho / omega)).
    """
    c = ctx.c
    prefactor = pair.rho0 * (c * pair.k * pair.T) ** 2 * pair.k_rho / pair.k
    s0 = sinc(0.5 * pair.T * (pair.omega_rho - pair.v0 * pair.k_rho))
    s1 = sinc(0.5 * pair.T * (pair.omega_rho - pair.v_T(ctx) * pair.k_rho))
    mismatch = np.sin(pair.ell * frequency_mismatch(pair, ctx) / (2 * c))
    return prefactor, s0, s1, mismatch


def dm_differential_phase(pair: DarkMatterPair, ctx: PhysicalContext = PhysicalContext()):
    """
    delta_phi = phi_upper - phi_lower of the detector.
    """
    prefactor, s0, s1, mismatch = _dm_factors(pair, ctx)
    mean = (
        pair.omega_rho * pair.T
        - pair.k_rho * pair.z_bar(ctx)
        + pair.omega_rho * pair.ell / (2 * ctx.c)
        + np.asarray(pair.phi_rho)
    )
    return _out(-2 * prefactor * np.cos(mean) * mismatch * s0 * s1)


def dm_signal_amplitude(pair: DarkMatterPair, ctx: PhysicalContext = PhysicalContext(), signed: bool = False) -> float:
    """
    Standard deviation of delta_phi over the unknown phi_rho. With `signed`
    the raw product is returned instead of its magnitude.
    """
    prefactor, s0, s1, mismatch = _dm_factors(pair, ctx)
    value = float(2 * prefactor * mismatch * s0 * s1)
    return value if signed else abs(value)


def dm_single_phase(pair: DarkMatterPair, z0: float, t_start: float, ctx: PhysicalContext = PhysicalContext()):
    """
    Phase of one device starting at height z0 at time t_start:

        -rho0 (ckT)^2 (k_rho/k) sinc_0 sinc_T sin(omega (t_s + T) - k_rho z_bar + phi_rho)

    with z_bar = z0 + v0 T + hbar k T / 2m.
    """
    prefactor, s0, s1, _ = _dm_factors(pair, ctx)
    z_bar = z0 + pair.v0 * pair.T + 0.5 * ctx.hbar * pair.k * pair.T / pair.m
    phase = pair.omega_rho * (t_start + pair.T) - pair.k_rho * z_bar + np.asarray(pair.phi_rho)
    return _out(-prefactor * s0 * s1 * np.sin(phase))


def dm_pair_specs(pair: DarkMatterPair, ctx: PhysicalContext = PhysicalContext()) -> tuple:
    """
    (upper, lower) geometries of the detector: the lower device at ell/2
    starting at t = 0 and the upper one at 3 ell/2 starting at ell/c, so the
    mean height is ell.
    """
    c = ctx.c
    lambda_rho = pair.lambda_rho
    if lambda_rho is None:
        mass_term = (pair.omega_rho / c) ** 2 - pair.k_rho**2
        if mass_term < -1e-12 * pair.k_rho**2:
            raise PhysicsPreconditionError("dispersion requires omega_rho >= c k_rho")
        lambda_rho = 1.0 / np.sqrt(mass_term) if mass_term > 0 else np.inf
    dilaton = DilatonParams(
        k_rho=pair.k_rho, omega_rho=pair.omega_rho, phi_rho=pair.phi_rho, lambda_rho=lambda_rho
    )
    species = Species(pair.m, 0.0, pair.rho0)
    zctx = ctx.with_g(0.0)
    upper = mach_zehnder(pair.T, pair.k, species, 1.5 * pair.ell, pair.v0, dilaton, zctx, t0=pair.ell / c)
    lower = mach_zehnder(pair.T, pair.k, species, 0.5 * pair.ell, pair.v0, dilaton, zctx, t0=0.0)
    return upper, lower
