"""
First order perturbative phase of a closed light-pulse interferometer,

    phi = phi0 - (1/hbar) int dt (H_upper - H_lower) + phi_fsl,

with every perturbation integrated along the unperturbed branch trajectories.
Cross terms between perturbations are never formed.
"""
import numpy as np

from dataclasses import dataclass, field
from enum import Enum

from .core import PhysicsPreconditionError, sinc
from .geometry import (
    InterferometerSpec,
    mach_zehnder_parameters,
    require_closed,
    separation,
    trajectories,
)


class TermKind(str, Enum):
    WAVE_VECTOR_MOD = "wave_vector_mod"
    DILATON_LINEAR = "dilaton_linear"
    DILATON_OSCILLATION = "dilaton_oscillation"
    FSL = "fsl"


CONTINUOUS = (TermKind.DILATON_LINEAR, TermKind.DILATON_OSCILLATION)


@dataclass(frozen=True)
class PerturbationTerm:
    kind: TermKind

    def __post_init__(self):
        try:
            object.__setattr__(self, "kind", TermKind(self.kind))
        except ValueError:
            raise ValueError(f"unknown perturbation term '{self.kind}'") from None

    @property
    def name(self) -> str:
        return self.kind.value


@dataclass
class PhaseBreakdown:
    phi0: float = 0.0
    terms: dict = field(default_factory=dict)
    phi_fsl: float = 0.0

    @property
    def total(self) -> float:
        return self.phi0 + sum(self.terms.values()) + self.phi_fsl

    def as_record(self) -> dict:
        record = {"phi0": self.phi0}
        for kind in TermKind:
            if kind is not TermKind.FSL:
                record[kind.value] = self.terms.get(kind.value, 0.0)
        record["phi_fsl"] = self.phi_fsl
        record["total"] = self.total
        return record


def terms(*names) -> list:
    return [PerturbationTerm(n) for n in names]


def gravity_terms() -> list:
    """
    The perturbations of a terrestrial gravimeter: modified wave vector,
    particle dependent acceleration and finite speed of light.
    """
    return terms(TermKind.WAVE_VECTOR_MOD, TermKind.DILATON_LINEAR, TermKind.FSL)


def _pulse_positions(spec: InterferometerSpec):
    """
    Free fall and per-branch kick parts of the positions at the pulse times.
    """
    upper, lower = trajectories(spec)
    t = spec.times
    return upper.free_part(t), upper.kick_part(t), lower.kick_part(t)


def phi0(spec: InterferometerSpec) -> float:
    """
    Kick sum sum_n [k_u z_u(t_n) - k_l z_l(t_n)], reducing to -kgT^2 for a
    Mach-Zehnder sequence.
    """
    require_closed(spec)
    ku, kl = spec.kicks_upper, spec.kicks_lower
    free, kick_u, kick_l = _pulse_positions(spec)
    value = spec.z0 * (np.sum(ku) - np.sum(kl)) + np.sum((ku - kl) * free) + np.sum(ku * kick_u - kl * kick_l)
    return float(value)


def _wave_vector_phase(spec: InterferometerSpec) -> float:
    # -(g / 2c^2) sum_n [k_u z_u^2 - k_l z_l^2], expanded around z0
    ku, kl = spec.kicks_upper, spec.kicks_lower
    free, kick_u, kick_l = _pulse_positions(spec)
    wu = free + kick_u
    wl = free + kick_l
    z0 = spec.z0
    S = z0**2 * (np.sum(ku) - np.sum(kl)) + 2 * z0 * np.sum(ku * wu - kl * wl) + np.sum(ku * wu**2 - kl * wl**2)
    return float(-spec.ctx.g / (2 * spec.ctx.c**2) * S)


def _dilaton_linear_phase(spec: InterferometerSpec) -> float:
    # -(m g beta / hbar) int (z_u - z_l) dt with the separation built from kicks
    dk = spec.kicks_upper - spec.kicks_lower
    lever = spec.t_last - spec.times
    return float(-spec.ctx.g * spec.species.beta * np.sum(dk * lever**2) / 2)


def sinc_difference(x: float, y: float, d: float) -> float:
    """
    sinc(x) - sinc(y) for d = x - y known accurately.
    """
    scale = max(abs(x), abs(y))
    if scale == 0 or abs(d) >= 0.25 * scale:
        return float(sinc(x) - sinc(y))
    if scale < 0.1:
        # sum_j (-1)^j (x^2j - y^2j) / (2j+1)!, x^2 - y^2 = (x + y) d
        x2, y2 = x * x, y * y
        diff2 = (x + y) * d
        total = 0.0
        fact = 1.0
        for j in range(1, 5):
            fact *= (2 * j) * (2 * j + 1)
            power_sum = sum(x2**i * y2 ** (j - 1 - i) for i in range(j))
            total += (-1) ** j * diff2 * power_sum / fact
        return total
    return (y * 2 * np.cos(0.5 * (x + y)) * np.sin(0.5 * d) - d * np.sin(y)) / (x * y)


def _oscillation_segment(spec, upper, lower, t_s, t_e, v_sep) -> float:
    """
    int [cos psi_u - cos psi_l] dt over a free flight segment at g = 0, with
    psi = omega t - k_rho z + phi. `v_sep` is the kick-only velocity
    difference on the segment.
    """
    p = spec.dilaton
    delta = t_e - t_s
    mid = t_s + 0.5 * delta

    zu, zl = upper.z(mid), lower.z(mid)
    m_u = p.omega_rho * mid - p.k_rho * zu + p.phi_rho
    m_l = p.omega_rho * mid - p.k_rho * zl + p.phi_rho
    mean = 0.5 * (m_u + m_l)
    dm = -p.k_rho * separation(spec, mid)

    # velocities are constant on the segment at g = 0
    a_u = p.omega_rho - p.k_rho * upper.v(mid)
    a_l = p.omega_rho - p.k_rho * lower.v(mid)
    x, y = 0.5 * a_u * delta, 0.5 * a_l * delta
    d = -0.5 * p.k_rho * v_sep * delta
    S_u, S_l = float(sinc(x)), float(sinc(y))

    cos_diff = -2 * np.sin(mean) * np.sin(0.5 * dm)
    cos_sum = np.cos(m_u) + np.cos(m_l)
    return delta * (cos_diff * 0.5 * (S_u + S_l) + cos_sum * 0.5 * sinc_difference(x, y, d))


def _dilaton_oscillation_phase(spec: InterferometerSpec) -> float:
    if spec.species.rho0 == 0:
        return 0.0

    if spec.ctx.g != 0:
        from .oracle import quad_term_phase

        return quad_term_phase(spec, PerturbationTerm(TermKind.DILATON_OSCILLATION)).value

    upper, lower = trajectories(spec)
    dv = spec.recoil * (spec.kicks_upper - spec.kicks_lower)
    v_sep = np.cumsum(dv)
    total = 0.0
    for n in range(len(spec.pulses) - 1):
        total += _oscillation_segment(spec, upper, lower, spec.times[n], spec.times[n + 1], v_sep[n])

    prefactor = -spec.species.m * spec.ctx.c**2 * spec.species.rho0 / spec.ctx.hbar
    return float(prefactor * total)


def fsl_phase(spec: InterferometerSpec) -> float:
    """
    -3 k g T^2 v_T / c with the upper branch velocity v_T at the central
    pulse. Only defined for Mach-Zehnder sequences.
    """
    T, k = mach_zehnder_parameters(spec)
    ctx = spec.ctx
    v_T = spec.v0 - ctx.g * T + spec.recoil * k
    return float(-3 * k * ctx.g * T**2 * v_T / ctx.c)


def term_phase(spec: InterferometerSpec, term: PerturbationTerm) -> float:
    require_closed(spec)
    if not isinstance(term, PerturbationTerm):
        term = PerturbationTerm(term)
    if term.kind is TermKind.WAVE_VECTOR_MOD:
        return _wave_vector_phase(spec)
    if term.kind is TermKind.DILATON_LINEAR:
        return _dilaton_linear_phase(spec)
    if term.kind is TermKind.DILATON_OSCILLATION:
        return _dilaton_oscillation_phase(spec)
    return fsl_phase(spec)


def total_phase(spec: InterferometerSpec, terms: list = None) -> PhaseBreakdown:
    require_closed(spec)
    if terms is None:
        terms = gravity_terms()
    breakdown = PhaseBreakdown(phi0=phi0(spec))
    for term in terms:
        if not isinstance(term, PerturbationTerm):
            term = PerturbationTerm(term)
        if term.kind is TermKind.FSL:
            breakdown.phi_fsl = fsl_phase(spec)
        else:
            breakdown.terms[term.name] = term_phase(spec, term)
    return breakdown


def sweep_total_phase(specs, terms: list = None, jobs: int = 1) -> list:
    """
    `total_phase` over many geometries, results in input order.
    """
    from joblib import Parallel, delayed

    if jobs == 1:
        return [total_phase(s, terms) for s in specs]
    return Parallel(n_jobs=jobs)(delayed(total_phase)(s, terms) for s in specs)
