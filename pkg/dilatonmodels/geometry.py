"""
Light-pulse interferometer geometries and their unperturbed trajectories.

Pulses are instantaneous kicks hbar k_n^(s)/m on each branch s = upper, lower.
At a pulse time the pre-kick state is reported; the velocity jump applies for
t > t_n. Positions are written as

    z_s(t) = z0 + f(t - t1) + kick_s(t)

with the free fall part f(tau) = v0 tau - g tau^2 / 2 shared by both branches
and kick_s(t) = sum_{t_n < t} (hbar k_n^(s) / m) (t - t_n). Branch separations
therefore only involve kicks.
"""
import numpy as np

from dataclasses import dataclass, field
from typing import NamedTuple

from .base import write_csv
from .core import (
    DilatonParams,
    OpenInterferometerError,
    PhysicalContext,
    PhysicsPreconditionError,
    TrajectoryDomainError,
)

CLOSURE_TOLERANCE = 1e-12


@dataclass(frozen=True)
class Species:
    m: float
    beta: float = 0.0
    rho0: float = 0.0

    def __post_init__(self):
        if not self.m > 0:
            raise PhysicsPreconditionError(f"atomic mass must be positive (m = {self.m})")


@dataclass(frozen=True)
class PulseEvent:
    t: float
    k_upper: float
    k_lower: float
    laser_phase: float = 0.0


@dataclass(frozen=True)
class InterferometerSpec:
    species: Species
    z0: float
    v0: float
    pulses: tuple
    dilaton: DilatonParams = field(default_factory=DilatonParams)
    ctx: PhysicalContext = field(default_factory=PhysicalContext)

    def __post_init__(self):
        if len(self.pulses) < 2:
            raise PhysicsPreconditionError(f"an interferometer needs at least 2 pulses (got {len(self.pulses)})")
        times = [p.t for p in self.pulses]
        if any(b <= a for a, b in zip(times[:-1], times[1:])):
            raise PhysicsPreconditionError(f"pulse times must be strictly increasing ({times})")

    @property
    def times(self) -> np.ndarray:
        return np.array([p.t for p in self.pulses])

    @property
    def kicks_upper(self) -> np.ndarray:
        return np.array([p.k_upper for p in self.pulses])

    @property
    def kicks_lower(self) -> np.ndarray:
        return np.array([p.k_lower for p in self.pulses])

    @property
    def t_first(self) -> float:
        return self.pulses[0].t

    @property
    def t_last(self) -> float:
        return self.pulses[-1].t

    @property
    def recoil(self) -> float:
        """
        hbar / m, the velocity change per unit wave number.
        """
        return self.ctx.hbar / self.species.m


class Segment(NamedTuple):
    t_start: float
    t_end: float
    z_start: float
    v_start: float


class BranchTrajectory:

    """
    Piecewise parabola of one branch on [t1, t_last].
    """

    def __init__(self, spec: InterferometerSpec, kicks: np.ndarray):
        self.t1 = spec.t_first
        self.t_last = spec.t_last
        self.z0 = spec.z0
        self.v0 = spec.v0
        self.g = spec.ctx.g
        self.kick_times = spec.times
        self.kick_dv = spec.recoil * np.asarray(kicks, dtype=float)

    def _check(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(t < self.t1) or np.any(t > self.t_last):
            raise TrajectoryDomainError(f"time outside of [{self.t1}, {self.t_last}]")
        return t

    def free_part(self, t):
        tau = self._check(t) - self.t1
        return self.v0 * tau - 0.5 * self.g * tau**2

    def kick_part(self, t):
        t = self._check(t)
        dt = t[..., np.newaxis] - self.kick_times
        return np.sum(np.where(dt > 0, self.kick_dv * dt, 0.0), axis=-1)

    def kick_velocity(self, t):
        t = self._check(t)
        dt = t[..., np.newaxis] - self.kick_times
        return np.sum(np.where(dt > 0, self.kick_dv, 0.0), axis=-1)

    def z(self, t):
        z = self.z0 + self.free_part(t) + self.kick_part(t)
        return float(z) if np.ndim(z) == 0 else z

    def v(self, t):
        tau = self._check(t) - self.t1
        v = self.v0 - self.g * tau + self.kick_velocity(t)
        return float(v) if np.ndim(v) == 0 else v

    @property
    def final_velocity(self) -> float:
        """
        Velocity after the last pulse.
        """
        return self.v(self.t_last) + self.kick_dv[-1]

    @property
    def segments(self) -> list:
        """
        Free flight segments between pulses, starting in the post-kick state.
        """
        return [
            Segment(a, b, self.z(a), self.v(a) + dv)
            for a, b, dv in zip(self.kick_times[:-1], self.kick_times[1:], self.kick_dv[:-1])
        ]


def interferometer(
    species: Species,
    z0: float,
    v0: float,
    pulses,
    dilaton: DilatonParams = DilatonParams(),
    ctx: PhysicalContext = PhysicalContext(),
) -> InterferometerSpec:
    """
    Build a general geometry from (t, k_upper, k_lower[, laser_phase]) rows or
    `PulseEvent`s.
    """
    events = tuple(p if isinstance(p, PulseEvent) else PulseEvent(*p) for p in pulses)
    return InterferometerSpec(species, z0, v0, events, dilaton, ctx)


def mach_zehnder(
    T: float,
    k: float,
    species: Species,
    z0: float = 0.0,
    v0: float = 0.0,
    dilaton: DilatonParams = DilatonParams(),
    ctx: PhysicalContext = PhysicalContext(),
    t0: float = 0.0,
) -> InterferometerSpec:
    """
    pi/2 - pi - pi/2 sequence at t0, t0 + T, t0 + 2T. The upper branch takes
    the first kick (+k, -k, 0) and the lower branch is kicked at the mirror
    pulse (0, +k, -k).
    """
    if not T > 0:
        raise PhysicsPreconditionError(f"interrogation time must be positive (T = {T})")
    if k == 0:
        raise PhysicsPreconditionError("effective wave number must be non-zero")
    pulses = (
        PulseEvent(t0, k, 0.0),
        PulseEvent(t0 + T, -k, k),
        PulseEvent(t0 + 2 * T, 0.0, -k),
    )
    return InterferometerSpec(species, z0, v0, pulses, dilaton, ctx)


def ramsey_borde(
    T: float,
    T_prime: float,
    k: float,
    species: Species,
    z0: float = 0.0,
    v0: float = 0.0,
    dilaton: DilatonParams = DilatonParams(),
    ctx: PhysicalContext = PhysicalContext(),
    t0: float = 0.0,
) -> InterferometerSpec:
    """
    Symmetric four pulse sequence at t0, t0 + T, t0 + T + T', t0 + 2T + T'. The
    upper branch opens and stops in the first pair, the lower branch catches
    up in the second.
    """
    if not T > 0 or not T_prime > 0:
        raise PhysicsPreconditionError(f"pulse separations must be positive (T = {T}, T' = {T_prime})")
    if k == 0:
        raise PhysicsPreconditionError("effective wave number must be non-zero")
    pulses = (
        PulseEvent(t0, k, 0.0),
        PulseEvent(t0 + T, -k, 0.0),
        PulseEvent(t0 + T + T_prime, 0.0, k),
        PulseEvent(t0 + 2 * T + T_prime, 0.0, -k),
    )
    return InterferometerSpec(species, z0, v0, pulses, dilaton, ctx)


def closing_kicks(times, kicks_upper, kicks_lower) -> np.ndarray:
    """
    Lower branch kicks of the last two pulses that close the geometry, given
    all other kicks. Solves

        sum_n (k_u - k_l)               = 0
        sum_n (k_u - k_l) (t_N - t_n)   = 0

    for the two unknowns.
    """
    times = np.asarray(times, dtype=float)
    ku = np.asarray(kicks_upper, dtype=float)
    kl = np.asarray(kicks_lower, dtype=float)[:-2]
    if len(times) < 3 or len(ku) != len(times):
        raise PhysicsPreconditionError("need at least 3 pulses with a kick per pulse")
    lever = times[-1] - times
    A = np.array([[1.0, 1.0], [lever[-2], lever[-1]]])
    b = np.array([np.sum(ku) - np.sum(kl), np.sum(ku * lever) - np.sum(kl * lever[:-2])])
    return np.linalg.solve(A, b)


def trajectories(spec: InterferometerSpec) -> tuple:
    return BranchTrajectory(spec, spec.kicks_upper), BranchTrajectory(spec, spec.kicks_lower)


def separation(spec: InterferometerSpec, t):
    """
    z_upper(t) - z_lower(t) from the kicks alone.
    """
    upper, lower = trajectories(spec)
    sep = upper.kick_part(t) - lower.kick_part(t)
    return float(sep) if np.ndim(sep) == 0 else sep


def closure_check(spec: InterferometerSpec) -> tuple:
    """
    Branch differences (dz, dv) after the last pulse.
    """
    dk = spec.kicks_upper - spec.kicks_lower
    dz = spec.recoil * np.sum(dk * (spec.t_last - spec.times))
    dv = spec.recoil * np.sum(dk)
    return float(dz), float(dv)


def is_closed(spec: InterferometerSpec, tol: float = CLOSURE_TOLERANCE) -> bool:
    """
    Closure relative to the largest recoil velocity and the sequence duration.
    """
    dz, dv = closure_check(spec)
    kmax = max(np.max(np.abs(spec.kicks_upper)), np.max(np.abs(spec.kicks_lower)))
    vscale = spec.recoil * kmax
    zscale = vscale * (spec.t_last - spec.t_first)
    return abs(dz) <= tol * zscale and abs(dv) <= tol * vscale


def require_closed(spec: InterferometerSpec, tol: float = CLOSURE_TOLERANCE):
    if not is_closed(spec, tol):
        dz, dv = closure_check(spec)
        raise OpenInterferometerError(f"interferometer is not closed in phase space (dz = {dz:.3e} m, dv = {dv:.3e} m/s)")


def mach_zehnder_parameters(spec: InterferometerSpec) -> tuple:
    """
    (T, k) if `spec` has the Mach-Zehnder structure, otherwise raises.
    """
    ku, kl, t = spec.kicks_upper, spec.kicks_lower, spec.times
    k = ku[0] if len(ku) == 3 else 0.0
    T = t[1] - t[0]
    if (
        len(ku) != 3
        or k == 0
        or not np.array_equal(ku, [k, -k, 0.0])
        or not np.array_equal(kl, [0.0, k, -k])
        or abs((t[2] - t[1]) - T) > 1e-12 * T
    ):
        raise PhysicsPreconditionError("geometry is not a Mach-Zehnder sequence")
    return float(T), float(k)


def pulse_table(spec: InterferometerSpec) -> list:
    upper, lower = trajectories(spec)
    return [
        {
            "n": n,
            "t_s": p.t,
            "k_upper_per_m": p.k_upper,
            "k_lower_per_m": p.k_lower,
            "z_upper_m": upper.z(p.t),
            "z_lower_m": lower.z(p.t),
            "laser_phase_rad": p.laser_phase,
        }
        for n, p in enumerate(spec.pulses, start=1)
    ]


def save_pulse_table(fn: str, spec: InterferometerSpec) -> int:
    return write_csv(fn, pulse_table(spec))
