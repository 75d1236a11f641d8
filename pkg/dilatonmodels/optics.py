"""
Geometrical optics in the linear metric g_mn = diag(1 + 2gz/c^2, -1, -1, -1)
with a dilaton background.

The phase and wave vector do not depend on the dilaton; it enters only through
the real amplitude. Components of K are covariant, K_m = d_m Phi:

    K_0 = k0,  K_x = -k_x,  K_y = -k_y,  K_z = -k_z [1 - g k0^2 z / (c^2 k_z^2)]

Polarization components e^m are contravariant.
"""
import numpy as np

from dataclasses import dataclass
from typing import NamedTuple

from .base import write_csv
from .core import (
    C,
    DilatonParams,
    GridError,
    PhysicalContext,
    PhysicsPreconditionError,
    dilaton_field,
    sinc,
)

# geometrical optics holds below this ratio of wavelength to propagation scale
EPSILON_VALID = 1e-2


@dataclass(frozen=True)
class WaveSpec:
    k0: float
    q: tuple
    k_z: float
    a_in: float = 1.0
    e_in: tuple = (0.0, 1.0, 0.0, 0.0)

    def __post_init__(self):
        if self.k_z == 0:
            raise PhysicsPreconditionError("vertical wave number must be non-zero (k_z = 0)")
        if not self.a_in > 0:
            raise PhysicsPreconditionError(f"initial amplitude must be positive (a_in = {self.a_in})")
        shell = self.k0**2 - self.q[0] ** 2 - self.q[1] ** 2 - self.k_z**2
        if abs(shell) > 1e-12 * self.k0**2:
            raise PhysicsPreconditionError(f"k0^2 = q^2 + k_z^2 violated by {shell:.3e}")
        e = np.asarray(self.e_in, dtype=complex)
        if e.shape != (4,):
            raise PhysicsPreconditionError("polarization must have 4 components")
        if abs(abs(minkowski(e.conj(), e)) - 1.0) > 1e-12:
            raise PhysicsPreconditionError("polarization must be normalised, |e*_m e^m| = 1")

    @property
    def kx(self) -> float:
        return self.q[0]

    @property
    def ky(self) -> float:
        return self.q[1]


class FieldPoint(NamedTuple):
    phase: float
    K: np.ndarray
    a: float
    e: np.ndarray


class Epsilon(NamedTuple):
    value: float
    valid: bool


class TwoPhoton(NamedTuple):
    delta_omega: float
    k: float
    phase: float


def minkowski(u, v):
    return u[0] * v[0] - u[1] * v[1] - u[2] * v[2] - u[3] * v[3]


def wave_spec(k_z: float, q=(0.0, 0.0), a_in: float = 1.0, e_in=(0.0, 1.0, 0.0, 0.0)) -> WaveSpec:
    """
    Wave constants with k0 fixed by k0^2 = q^2 + k_z^2. The default
    polarization is linear along x.
    """
    q = (float(q[0]), float(q[1]))
    k0 = float(np.sqrt(q[0] ** 2 + q[1] ** 2 + k_z**2))
    return WaveSpec(k0, q, float(k_z), a_in, tuple(e_in))


def kappa(z, w: WaveSpec, ctx: PhysicalContext = PhysicalContext()):
    """
    Vertical part of the phase, k_z [1 - g k0^2 z / (2 c^2 k_z^2)] z.
    """
    z = np.asarray(z, dtype=float)
    return w.k_z * z - ctx.g * w.k0**2 * z**2 / (2 * ctx.c**2 * w.k_z)


def eikonal_phase(t, r, z, w: WaveSpec, ctx: PhysicalContext = PhysicalContext()):
    """
    Phi = c k0 t - q.r - kappa(z). `r` is the transverse position (x, y).
    """
    t = np.asarray(t, dtype=float)
    x, y = (np.asarray(u, dtype=float) for u in r)
    phase = ctx.c * w.k0 * t - w.kx * x - w.ky * y - kappa(z, w, ctx)
    return float(phase) if np.ndim(phase) == 0 else phase


def wave_vector(t, r, z, w: WaveSpec, ctx: PhysicalContext = PhysicalContext()) -> np.ndarray:
    """
    Covariant wave vector K_m = d_m Phi with d_0 = (1/c) d/dt. Shape (4,) for a
    scalar height, (4, ...) otherwise.
    """
    z = np.asarray(z, dtype=float)
    Kz = -w.k_z * (1.0 - ctx.g * w.k0**2 * z / (ctx.c**2 * w.k_z**2))
    ones = np.ones_like(z)
    return np.array([w.k0 * ones, -w.kx * ones, -w.ky * ones, Kz])


def null_residual(z, w: WaveSpec, ctx: PhysicalContext = PhysicalContext()):
    """
    K_m K^m / k0^2 with the exact inverse of the linear metric.

    Evaluated as shell + 4 eps^2 k0^2 / (1 + 2 eps) - (eps k0^2 / k_z)^2 with
    eps = gz/c^2, which is algebraically identical to the direct contraction
    but free of cancellation.
    """
    z = np.asarray(z, dtype=float)
    eps = ctx.g * z / ctx.c**2
    shell = w.k0**2 - w.kx**2 - w.ky**2 - w.k_z**2
    value = shell + 4 * eps**2 * w.k0**2 / (1 + 2 * eps) - (eps * w.k0**2 / w.k_z) ** 2
    value = value / w.k0**2
    return float(value) if value.ndim == 0 else value


def polarization(z, w: WaveSpec, ctx: PhysicalContext = PhysicalContext()) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    eps = ctx.g * z / ctx.c**2
    ratio = w.k0 / w.k_z
    e0, ex, ey, ez = (complex(v) for v in w.e_in)
    ones = np.ones_like(z)
    return np.array(
        [
            e0 * (1 - eps) - ez * eps * ratio,
            ex * ones,
            ey * ones,
            ez - e0 * eps * ratio,
        ]
    )


def gauge_residual(z, w: WaveSpec, ctx: PhysicalContext = PhysicalContext()):
    """
    |K_m e^m| / k0 along the beam.
    """
    K = wave_vector(0.0, (0.0, 0.0), z, w, ctx)
    e = polarization(z, w, ctx)
    value = np.abs(np.sum(K * e, axis=0)) / w.k0
    return float(value) if np.ndim(value) == 0 else value


def amplitude(z, t, w: WaveSpec, p: DilatonParams, ctx: PhysicalContext = PhysicalContext()):
    """
    Real amplitude to lowest order in all perturbations, cross terms
    neglected.

    The dilaton term carries (omega / (c k_rho)) sin(k_rho z / 2), written as
    (omega z / 2c) sinc(k_rho z / 2) so that k_rho = 0 takes its analytic limit.
    """
    z = np.asarray(z, dtype=float)
    t = np.asarray(t, dtype=float)
    q2 = w.kx**2 + w.ky**2
    gravity = ctx.g * z / (2 * ctx.c**2) * (q2 / w.k_z**2 + p.d_e * p.beta_S_bar)
    half = 0.5 * p.k_rho * z
    envelope = np.sin(half) - (p.omega_rho * w.k0 / (ctx.c * w.k_z)) * 0.5 * z * sinc(half)
    dilaton = envelope * p.d_e * p.rho0_bar * np.sin(p.omega_rho * t - half + p.phi_rho)
    a = w.a_in * (1.0 + gravity + dilaton)
    return float(a) if a.ndim == 0 else a


def field_point(t, r, z, w: WaveSpec, p: DilatonParams, ctx: PhysicalContext = PhysicalContext()) -> FieldPoint:
    return FieldPoint(
        eikonal_phase(t, r, z, w, ctx),
        wave_vector(t, r, z, w, ctx),
        amplitude(z, t, w, p, ctx),
        polarization(z, w, ctx),
    )


def two_photon_effective(kR: float, kB: float, t, z, ctx: PhysicalContext = PhysicalContext()) -> TwoPhoton:
    """
    Counterpropagating red (downward) and blue (upward) beams, q = 0. Returns
    the frequency difference, the effective wave number kB + kR and the
    differential phase Delta_omega t - k z [1 - gz/(2c^2)].
    """
    if not kR > 0 or not kB > 0:
        raise PhysicsPreconditionError(f"wave numbers must be positive (kR = {kR}, kB = {kB})")
    z = np.asarray(z, dtype=float)
    t = np.asarray(t, dtype=float)
    delta_omega = ctx.c * (kB - kR)
    k = kB + kR
    phase = delta_omega * t - k * z * (1.0 - ctx.g * z / (2 * ctx.c**2))
    return TwoPhoton(delta_omega, k, float(phase) if phase.ndim == 0 else phase)


def epsilon_scale(wavelength: float, L: float) -> Epsilon:
    """
    Geometrical optics expansion parameter lambda/L.
    """
    if not wavelength > 0 or not L > 0:
        raise PhysicsPreconditionError(f"lengths must be positive (lambda = {wavelength}, L = {L})")
    eps = wavelength / L
    return Epsilon(eps, eps < EPSILON_VALID)


def light_cone(z, phase: float, w: WaveSpec, ctx: PhysicalContext = PhysicalContext()):
    """
    Times t(z) on the surface of constant phase through the transverse origin.
    """
    return (phase + kappa(z, w, ctx)) / (ctx.c * w.k0)


def light_cone_cut(z, phase: float, w: WaveSpec, p: DilatonParams, ctx: PhysicalContext = PhysicalContext()) -> dict:
    """
    Amplitude deviation and -K_z/k_z sampled along the light cone.
    """
    z = np.asarray(z, dtype=float)
    t = light_cone(z, phase, w, ctx)
    K = wave_vector(t, (0.0, 0.0), z, w, ctx)
    return {
        "t": t,
        "z": z,
        "amplitude_dev": amplitude(z, t, w, p, ctx) / w.a_in - 1.0,
        "minus_Kz_scaled": -K[3] / w.k_z,
    }


@dataclass
class FieldGrid:

    """
    Spacetime grid of the scaled phase, amplitude deviation and wave vector.
    Arrays are (n_t, n_z) with "ij" indexing.
    """

    t: np.ndarray
    z: np.ndarray
    scaled_phase: np.ndarray
    amplitude_dev: np.ndarray
    K0_scaled: np.ndarray
    Kz_scaled: np.ndarray

    columns = ("scaled_phase", "amplitude_dev", "K0_scaled", "Kz_scaled")

    def rows(self):
        for i, t in enumerate(self.t):
            for j, z in enumerate(self.z):
                row = {"t": t, "z": z}
                for name in self.columns:
                    row[name] = getattr(self, name)[i, j]
                yield row

    def to_csv(self, fn: str) -> int:
        return write_csv(fn, self.rows())


def field_grid(
    t_range: tuple,
    z_range: tuple,
    n_t: int,
    n_z: int,
    w: WaveSpec,
    p: DilatonParams,
    ctx: PhysicalContext = PhysicalContext(),
    L: float = 1.0,
) -> FieldGrid:
    if n_t < 2 or n_z < 2:
        raise GridError(f"grid needs at least 2 x 2 nodes (got {n_t} x {n_z})")
    if not t_range[1] > t_range[0] or not z_range[1] > z_range[0]:
        raise GridError(f"grid region must have positive extent (t: {t_range}, z: {z_range})")
    if not L > 0:
        raise GridError(f"length scale must be positive (L = {L})")

    t = np.linspace(t_range[0], t_range[1], n_t)
    z = np.linspace(z_range[0], z_range[1], n_z)
    tt, zz = np.meshgrid(t, z, indexing="ij")

    phase = eikonal_phase(tt, (0.0, 0.0), zz, w, ctx)
    K = wave_vector(tt, (0.0, 0.0), zz, w, ctx)
    a = amplitude(zz, tt, w, p, ctx)

    return FieldGrid(
        t=t,
        z=z,
        scaled_phase=phase / (w.k_z * L),
        amplitude_dev=a / w.a_in - 1.0,
        K0_scaled=K[0] / w.k_z,
        Kz_scaled=K[3] / w.k_z,
    )


def spacetime_figure_parameters(L: float = 1.0, k_z: float = None, c: float = C):
    """
    The exaggerated parameters of the spacetime figure of phase and
    amplitude: gL/(2c^2) = 0.2, d_e beta_S = 0.3, d_e rho0 = 0.02,
    k_rho L = 5, omega_rho L / c = 40, phi_rho = 0 and q = 0.
    """
    ctx = PhysicalContext(c=c, g=0.4 * c**2 / L)
    k_rho = 5.0 / L
    omega = 40.0 * c / L
    lambda_rho = 1.0 / np.sqrt((omega / c) ** 2 - k_rho**2)
    p = DilatonParams(
        rho0_bar=0.02, k_rho=k_rho, omega_rho=omega, phi_rho=0.0, lambda_rho=lambda_rho, beta_S_bar=0.3, d_e=1.0
    )
    w = wave_spec(k_z if k_z is not None else 2 * np.pi / L)
    return w, p, ctx


def _central(f, x, h, richardson):
    d = (f(x + h) - f(x - h)) / (2 * h)
    if not richardson:
        return d
    d2 = (f(x + h / 2) - f(x - h / 2)) / h
    return (4 * d2 - d) / 3


def amplitude_transport_residual(
    t,
    z,
    w: WaveSpec,
    p: DilatonParams,
    ctx: PhysicalContext = PhysicalContext(),
    h: float = 1e-3,
    richardson: bool = True,
    include_time_derivative: bool = False,
):
    """
    Residual of K^m d_m a + (a/2) [nabla_m K^m - d_e (d_m rho) K^m] for the
    closed-form amplitude, with every derivative taken by central differences
    of step `h` [m] (time steps h/c). The divergence uses
    nabla_m K^m = d_m K^m + K^z d_z ln sqrt(|g|).

    The closed amplitude transports along z at fixed t, so K^0 d_0 a is only
    added when `include_time_derivative` is set. The remaining residual is of
    second order in the perturbations plus the finite-difference error.
    """
    t = float(t)
    z = float(z)
    c = ctx.c
    eps = ctx.g * z / c**2

    K0_up = w.k0 / (1 + 2 * eps)

    def Kz_up(zz):
        return -wave_vector(t, (0.0, 0.0), zz, w, ctx)[3]

    a = amplitude(z, t, w, p, ctx)
    da_dz = _central(lambda zz: amplitude(zz, t, w, p, ctx), z, h, richardson)
    da_d0 = _central(lambda tt: amplitude(z, tt, w, p, ctx), t, h / c, richardson) / c
    drho_dz = _central(lambda zz: dilaton_field(t, zz, p, ctx), z, h, richardson)
    drho_d0 = _central(lambda tt: dilaton_field(tt, z, p, ctx), t, h / c, richardson) / c

    Kz = Kz_up(z)
    div = _central(Kz_up, z, h, richardson) + Kz * (ctx.g / c**2) / (1 + 2 * eps)

    residual = Kz * da_dz + 0.5 * a * (div - p.d_e * (drho_d0 * K0_up + drho_dz * Kz))
    if include_time_derivative:
        residual += K0_up * da_d0
    return float(residual)
