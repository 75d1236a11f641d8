"""
Physical constants, the dilaton background field and residual checks of the
field equations it solves.

Sign and unit conventions used across the package:

    metric      g_mn = diag(1 + 2gz/c^2, -1, -1, -1), coordinates x^m = (ct, x, y, z)
    gradient    K_m = d_m Phi with d_0 = (1/c) d/dt
    units       SI at every interface; perturbative phases are assembled from
                dimensionless ratios (gz/c^2, v/c, rho0, ...) times kgT^2
"""
import numpy as np

from dataclasses import dataclass, replace
from typing import NamedTuple

C = 299792458.0
HBAR = 1.054571817e-34
G_EARTH = 9.81

# light-dilaton limit is flagged once the Compton wavelength drops below this
# multiple of the height
LIGHT_DILATON_FACTOR = 10.0


class PhysicsPreconditionError(ValueError):
    """
    Raised if a physical precondition or invariant is violated.
    """


class OpenInterferometerError(PhysicsPreconditionError):
    """
    Raised if an interferometer is not closed in phase space.
    """


class TrajectoryDomainError(PhysicsPreconditionError):
    """
    Raised if a trajectory is queried outside of its time domain.
    """


class GridError(ValueError):
    """
    Raised if a sampling grid is malformed.
    """


class QuadratureError(RuntimeError):
    """
    Raised if an adaptive quadrature does not reach its tolerance. The best
    estimate and its error are kept on the exception.
    """

    def __init__(self, msg: str, estimate: float = np.nan, error: float = np.inf):
        super().__init__(msg)
        self.estimate = estimate
        self.error = error


@dataclass(frozen=True)
class PhysicalContext:
    c: float = C
    hbar: float = HBAR
    g: float = G_EARTH

    def __post_init__(self):
        if not self.c > 0:
            raise PhysicsPreconditionError(f"speed of light must be positive (c = {self.c})")
        if not self.hbar > 0:
            raise PhysicsPreconditionError(f"hbar must be positive (hbar = {self.hbar})")
        if not self.g >= 0:
            raise PhysicsPreconditionError(f"gravitational acceleration must be non-negative (g = {self.g})")

    def with_g(self, g: float) -> "PhysicalContext":
        return replace(self, g=g)


@dataclass(frozen=True)
class DilatonParams:
    rho0_bar: float = 0.0
    k_rho: float = 0.0
    omega_rho: float = 0.0
    phi_rho: float = 0.0
    lambda_rho: float = np.inf
    beta_S_bar: float = 0.0
    d_e: float = 0.0

    def __post_init__(self):
        if not self.rho0_bar >= 0:
            raise PhysicsPreconditionError(f"dilaton amplitude must be non-negative (rho0_bar = {self.rho0_bar})")
        if not self.lambda_rho > 0:
            raise PhysicsPreconditionError(f"Compton wavelength must be positive (lambda_rho = {self.lambda_rho})")

    @property
    def massless(self) -> bool:
        return np.isinf(self.lambda_rho)


class FieldValue(NamedTuple):
    value: float
    light_dilaton_valid: bool


def sinc(x):
    """
    Unnormalised sinc, sin(x)/x with sinc(0) = 1.
    """
    return np.sinc(np.asarray(x) / np.pi)


def compton_wavelength(m_rho: float, ctx: PhysicalContext = PhysicalContext()) -> float:
    """
    Reduced Compton wavelength hbar/(c m_rho). A massless dilaton has an
    infinite wavelength.
    """
    if m_rho < 0:
        raise PhysicsPreconditionError(f"dilaton mass must be non-negative (m_rho = {m_rho})")
    if m_rho == 0:
        return np.inf
    return ctx.hbar / (ctx.c * m_rho)


def dispersion(k_rho: float, lambda_rho: float, ctx: PhysicalContext = PhysicalContext()) -> float:
    """
    Angular frequency of the dilaton plane wave, c sqrt(k^2 + 1/lambda^2).
    """
    if k_rho < 0:
        raise PhysicsPreconditionError(f"dilaton wave number must be non-negative (k_rho = {k_rho})")
    if not lambda_rho > 0:
        raise PhysicsPreconditionError(f"Compton wavelength must be positive (lambda_rho = {lambda_rho})")
    if np.isinf(lambda_rho):
        return ctx.c * k_rho
    return ctx.c * np.hypot(k_rho, 1.0 / lambda_rho)


def dilaton_params(
    rho0_bar: float = 0.0,
    k_rho: float = 0.0,
    lambda_rho: float = np.inf,
    phi_rho: float = 0.0,
    beta_S_bar: float = 0.0,
    d_e: float = 0.0,
    ctx: PhysicalContext = PhysicalContext(),
) -> DilatonParams:
    """
    Build dilaton parameters whose frequency satisfies the dispersion relation.
    """
    omega = dispersion(k_rho, lambda_rho, ctx)
    return DilatonParams(rho0_bar, k_rho, omega, phi_rho, lambda_rho, beta_S_bar, d_e)


def dispersion_residual(p: DilatonParams, ctx: PhysicalContext = PhysicalContext()) -> float:
    """
    (omega^2 - (ck)^2 - (c/lambda)^2) / omega^2, zero for parameters built by
    `dilaton_params`.
    """
    mass = 0.0 if p.massless else (ctx.c / p.lambda_rho) ** 2
    omega2 = p.omega_rho**2
    if omega2 == 0:
        return 0.0 if (ctx.c * p.k_rho) ** 2 + mass == 0 else -np.inf
    return (omega2 - (ctx.c * p.k_rho) ** 2 - mass) / omega2


def dilaton_value(t, z, p: DilatonParams, ctx: PhysicalContext = PhysicalContext()) -> FieldValue:
    """
    Light-dilaton field rho0 cos(omega t - k z + phi) + beta_S g z / c^2.

    The flag is False where the Compton wavelength is below ten times the
    height; `dilaton_gravitational_exact` is the appropriate form there.
    """
    t = np.asarray(t, dtype=float)
    z = np.asarray(z, dtype=float)
    value = p.rho0_bar * np.cos(p.omega_rho * t - p.k_rho * z + p.phi_rho) + p.beta_S_bar * ctx.g * z / ctx.c**2
    valid = bool(np.all(p.lambda_rho >= LIGHT_DILATON_FACTOR * np.abs(z)))
    if value.ndim == 0:
        value = float(value)
    return FieldValue(value, valid)


def dilaton_gravitational_exact(z, p: DilatonParams, ctx: PhysicalContext = PhysicalContext()):
    """
    Gravitational part of the dilaton before the light-dilaton limit,
    beta_S g lambda sin([1 - gz/(2c^2)] z / lambda) / c^2.
    """
    z = np.asarray(z, dtype=float)
    if np.any(z < 0):
        raise PhysicsPreconditionError("height above the source plane must be non-negative")
    eps = ctx.g / ctx.c**2
    arg = (1.0 - 0.5 * eps * z) * z
    if p.massless:
        value = p.beta_S_bar * eps * arg
    else:
        value = p.beta_S_bar * eps * p.lambda_rho * np.sin(arg / p.lambda_rho)
    return float(value) if value.ndim == 0 else value


def dilaton_field(t, z, p: DilatonParams, ctx: PhysicalContext = PhysicalContext(), exact_gravity: bool = False):
    """
    Oscillating background plus the source-mass part of the field; the latter
    in its light-dilaton or its pre-limit form.
    """
    t = np.asarray(t, dtype=float)
    z = np.asarray(z, dtype=float)
    background = p.rho0_bar * np.cos(p.omega_rho * t - p.k_rho * z + p.phi_rho)
    if exact_gravity:
        return background + dilaton_gravitational_exact(z, p, ctx)
    return background + p.beta_S_bar * ctx.g * z / ctx.c**2


def _axis(x, name):
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size < 3:
        raise GridError(f"'{name}' axis needs at least 3 points")
    h = np.diff(x)
    if not np.all(h > 0) or not np.allclose(h, h[0], rtol=1e-9, atol=0):
        raise GridError(f"'{name}' axis must be uniformly spaced and increasing")
    return x, h[0]


def klein_gordon_residual(p: DilatonParams, ctx: PhysicalContext, t, z) -> float:
    """
    Maximum of |(d_0^2 - d_z^2) rho_h + rho_h / lambda^2| over the interior of
    the (t, z) grid, by second order central differences [1/m^2]. Only the
    homogeneous (oscillating) part of the field is checked.
    """
    t, ht = _axis(t, "t")
    z, hz = _axis(z, "z")

    tt, zz = np.meshgrid(t, z, indexing="ij")
    rho = p.rho0_bar * np.cos(p.omega_rho * tt - p.k_rho * zz + p.phi_rho)

    h0 = ctx.c * ht
    d00 = (rho[2:, 1:-1] - 2 * rho[1:-1, 1:-1] + rho[:-2, 1:-1]) / h0**2
    dzz = (rho[1:-1, 2:] - 2 * rho[1:-1, 1:-1] + rho[1:-1, :-2]) / hz**2
    mass = 0.0 if p.massless else 1.0 / p.lambda_rho**2

    residual = d00 - dzz + mass * rho[1:-1, 1:-1]
    return float(np.max(np.abs(residual)))
