"""
Brute-force numerical evaluation of the phase integrals and kinematics,
independent of the closed forms and of the engine's antiderivatives.

Integrals over free flight segments go through QUADPACK (`scipy.integrate.quad`),
which is deterministic for a given integrand and tolerance.
"""
import numpy as np

from dataclasses import dataclass, replace
from mpmath import mp, mpf
from scipy import integrate
from typing import NamedTuple

from .closed_forms import DarkMatterPair, dm_differential_phase, dm_pair_specs, dm_single_phase, single_phase_terms
from .core import PhysicalContext, QuadratureError, TrajectoryDomainError
from .engine import PerturbationTerm, TermKind, term_phase, total_phase
from .geometry import Species, mach_zehnder, mach_zehnder_parameters, require_closed, trajectories


@dataclass(frozen=True)
class QuadratureConfig:
    abs_tol: float = 1e-30
    rel_tol: float = 1e-10
    max_subdivisions: int = 2000

    def __post_init__(self):
        if not self.abs_tol > 0 or not self.rel_tol > 0:
            raise ValueError("quadrature tolerances must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("at least one subdivision is required")


class QuadResult(NamedTuple):
    value: float
    error: float


def adaptive_quad(f, a: float, b: float, cfg: QuadratureConfig = QuadratureConfig()) -> QuadResult:
    """
    Integral of a scalar `f` on [a, b] with its error estimate. Raises
    QuadratureError with the best estimate if QUADPACK reports a problem.
    """
    if a == b:
        return QuadResult(0.0, 0.0)

    value, error, info, *message = integrate.quad(
        f,
        a,
        b,
        epsabs=cfg.abs_tol,
        epsrel=cfg.rel_tol,
        limit=cfg.max_subdivisions,
        full_output=True,
    )
    if message:
        raise QuadratureError(
            f"tolerance not reached on [{a:.6g}, {b:.6g}] after {info['last']} subdivisions: {message[0]}",
            value,
            error,
        )
    return QuadResult(float(value), float(error))


def _kick_sum_reference(spec, squared: bool) -> float:
    """
    sum_n [k_u z_u(t_n)^p - k_l z_l(t_n)^p] with p = 1 or 2, evaluated on the
    pulse positions in extended precision.
    """
    with mp.workdps(50):
        t1 = mpf(spec.t_first)
        g = mpf(spec.ctx.g)
        recoil = mpf(spec.ctx.hbar) / mpf(spec.species.m)
        total = mpf(0)
        for branch in ("upper", "lower"):
            sign = 1 if branch == "upper" else -1
            kicks = [mpf(getattr(p, f"k_{branch}")) for p in spec.pulses]
            for n, p in enumerate(spec.pulses):
                tn = mpf(p.t)
                tau = tn - t1
                z = mpf(spec.z0) + mpf(spec.v0) * tau - g * tau**2 / 2
                for j in range(n):
                    z += recoil * kicks[j] * (tn - mpf(spec.pulses[j].t))
                total += sign * kicks[n] * (z**2 if squared else z)
        return total


def kick_sum_phi0(spec) -> float:
    require_closed(spec)
    return float(_kick_sum_reference(spec, squared=False))


def quad_term_phase(spec, term, cfg: QuadratureConfig = QuadratureConfig()) -> QuadResult:
    """
    -(1/hbar) int dt [H(z_u(t), t) - H(z_l(t), t)] by adaptive quadrature over
    every free flight segment. Kick potentials (wave vector modification) and
    the finite speed of light phase are not integrals; they are re-evaluated
    in extended precision and carry no error estimate.
    """
    require_closed(spec)
    if not isinstance(term, PerturbationTerm):
        term = PerturbationTerm(term)
    ctx, species, p = spec.ctx, spec.species, spec.dilaton

    if term.kind is TermKind.WAVE_VECTOR_MOD:
        with mp.workdps(50):
            value = -mpf(ctx.g) / (2 * mpf(ctx.c) ** 2) * _kick_sum_reference(spec, squared=True)
            return QuadResult(float(value), 0.0)

    if term.kind is TermKind.FSL:
        T, k = mach_zehnder_parameters(spec)
        with mp.workdps(50):
            v_T = mpf(spec.v0) - mpf(ctx.g) * mpf(T) + mpf(ctx.hbar) / mpf(species.m) * mpf(k)
            value = -3 * mpf(k) * mpf(ctx.g) * mpf(T) ** 2 * v_T / mpf(ctx.c)
            return QuadResult(float(value), 0.0)

    upper, lower = trajectories(spec)

    if term.kind is TermKind.DILATON_LINEAR:
        if species.beta == 0 or ctx.g == 0:
            return QuadResult(0.0, 0.0)
        scale = -species.m * ctx.g * species.beta / ctx.hbar

        def integrand(t):
            return float(scale * (upper.kick_part(t) - lower.kick_part(t)))

    else:
        if species.rho0 == 0:
            return QuadResult(0.0, 0.0)
        scale = -species.m * ctx.c**2 * species.rho0 / ctx.hbar
        # the phase passes through zero with phi_rho, so the absolute
        # tolerance follows rho0 (ckT)^2 k_rho/k instead of the value
        kmax = np.max(np.abs(np.concatenate((spec.kicks_upper, spec.kicks_lower))))
        duration = spec.t_last - spec.t_first
        envelope = abs(scale * p.k_rho) * spec.recoil * kmax * duration**2
        cfg = replace(cfg, abs_tol=max(cfg.abs_tol, cfg.rel_tol * envelope))

        def integrand(t):
            # cos a - cos b = -2 sin((a + b)/2) sin((a - b)/2)
            mean = p.omega_rho * t - p.k_rho * 0.5 * (upper.z(t) + lower.z(t)) + p.phi_rho
            half_diff = -0.5 * p.k_rho * (upper.kick_part(t) - lower.kick_part(t))
            return float(scale * -2 * np.sin(mean) * np.sin(half_diff))

    value, error = 0.0, 0.0
    times = spec.times
    for a, b in zip(times[:-1], times[1:]):
        r = adaptive_quad(integrand, float(a), float(b), cfg)
        value += r.value
        error += r.error
    return QuadResult(value, error)


def finite_difference_gradient(f, point, h: float, c: float = PhysicalContext().c, richardson: bool = True) -> np.ndarray:
    """
    Gradient d_m f of a scalar field f(t, x, y, z) in coordinates
    x^m = (ct, x, y, z) by central differences of step h in every x^m.
    """
    if not h > 0:
        raise ValueError(f"step must be positive (h = {h})")
    point = np.asarray(point, dtype=float)
    scale = np.array([1.0 / c, 1.0, 1.0, 1.0])

    def central(step):
        grad = np.empty(4)
        for mu in range(4):
            e = np.zeros(4)
            e[mu] = step * scale[mu]
            grad[mu] = (f(*(point + e)) - f(*(point - e))) / (2 * step)
        return grad

    if not richardson:
        return central(h)
    return (4 * central(h / 2) - central(h)) / 3


def symplectic_euler(spec, branch: str = "upper", times=None, dt: float = None) -> np.ndarray:
    """
    Time-step a branch under z'' = -g with symplectic Euler (velocity first,
    then position with the new velocity) and velocity jumps at the pulses.
    Returns z at `times`, linearly interpolated inside a step.

    Each segment is divided into equal steps no longer than `dt`, which
    defaults to 1e-6 of the first pulse separation. The position error grows
    as g dt t / 2.
    """
    if dt is None:
        dt = 1e-6 * (spec.times[1] - spec.times[0])
    if not dt > 0:
        raise ValueError(f"time step must be positive (dt = {dt})")
    if times is None:
        times = spec.times
    times = np.atleast_1d(np.asarray(times, dtype=float))
    if np.any(times < spec.t_first) or np.any(times > spec.t_last):
        raise TrajectoryDomainError(f"time outside of [{spec.t_first}, {spec.t_last}]")

    kicks = spec.kicks_upper if branch == "upper" else spec.kicks_lower
    dv = spec.recoil * kicks
    g = spec.ctx.g
    out = np.empty_like(times)
    z, v = spec.z0, spec.v0

    for n in range(len(spec.pulses) - 1):
        t_s, t_e = spec.times[n], spec.times[n + 1]
        v = v + dv[n]
        steps = max(1, int(np.ceil((t_e - t_s) / dt)))
        h = (t_e - t_s) / steps
        vel = v - g * h * np.arange(steps + 1)
        zs = np.empty(steps + 1)
        zs[0] = 0.0
        np.cumsum(h * vel[1:], out=zs[1:])

        last = n == len(spec.pulses) - 2
        inside = (times >= t_s) & ((times <= t_e) if last else (times < t_e))
        if np.any(inside):
            s = times[inside] - t_s
            j = np.minimum((s / h).astype(int), steps - 1)
            out[inside] = z + zs[j] + (s - j * h) * vel[j + 1]

        z, v = z + zs[-1], vel[-1]

    return out


def phi_sa_numeric(pair, n: int = 10000, ctx: PhysicalContext = PhysicalContext()) -> float:
    """
    Signal amplitude sqrt((1/pi) int_0^2pi dphi delta_phi^2) by the periodic
    trapezoid rule on n samples of the initial dilaton phase.
    """
    if n < 16:
        raise ValueError(f"at least 16 samples are required (n = {n})")
    phis = 2 * np.pi * np.arange(n) / n
    delta = dm_differential_phase(replace(pair, phi_rho=phis), ctx)
    integral = 2 * np.pi / n * np.sum(np.asarray(delta) ** 2)
    return float(np.sqrt(integral / np.pi))


def _relative(a: float, b: float, floor: float) -> float:
    return abs(a - b) / max(abs(b), floor)


def _report_row(draw, term, params, engine, closed, ref, floor, tol) -> dict:
    dev_closed = _relative(engine, closed, floor)
    dev_oracle = _relative(engine, ref.value, floor)
    return {
        "draw": draw,
        "term": term,
        **params,
        "engine_rad": engine,
        "closed_rad": closed,
        "oracle_rad": ref.value,
        "oracle_error_rad": ref.error,
        "dev_engine_closed": dev_closed,
        "dev_engine_oracle": dev_oracle,
        "passed": bool(dev_closed <= tol and dev_oracle <= tol),
    }


def validation_report(
    draws: int = 50,
    seed: int = 0,
    tol: float = 1e-8,
    cfg: QuadratureConfig = QuadratureConfig(),
    abs_floor: float = 1e-30,
    ctx: PhysicalContext = PhysicalContext(),
) -> list:
    """
    Engine, closed form and oracle per term on random Mach-Zehnder draws
    (log-uniform T, k and m, |beta| <= 1e-6, g in {0, 9.81}), followed by
    oscillating dilaton draws at g = 0. One row per draw and term.

    Oscillating dilaton rows are normalised by rho0 (ckT)^2 |k_rho / k|, the
    envelope without the sinc factors, since the phase itself passes through
    zero with phi_rho.
    """
    rng = np.random.default_rng(seed)
    rows = []

    def loguniform(lo, hi):
        return float(np.exp(rng.uniform(np.log(lo), np.log(hi))))

    for draw in range(draws):
        T = loguniform(1e-3, 10.0)
        k = loguniform(1e5, 1e8)
        m = loguniform(1e-26, 1e-24)
        beta = float(rng.uniform(-1e-6, 1e-6))
        g = float(rng.choice([0.0, 9.81]))
        z0 = float(rng.uniform(0.0, 10.0))
        v0 = float(rng.uniform(-1.0, 1.0))
        dctx = ctx.with_g(g)

        spec = mach_zehnder(T, k, Species(m, beta), z0, v0, ctx=dctx)
        engine = total_phase(spec).as_record()
        closed = single_phase_terms(k, T, m, z0, v0, beta, dctx)
        oracle = {
            "phi0": QuadResult(kick_sum_phi0(spec), 0.0),
            "wave_vector_mod": quad_term_phase(spec, TermKind.WAVE_VECTOR_MOD, cfg),
            "dilaton_linear": quad_term_phase(spec, TermKind.DILATON_LINEAR, cfg),
            "phi_fsl": quad_term_phase(spec, TermKind.FSL, cfg),
        }
        params = {
            "T_s": T,
            "k_per_m": k,
            "m_kg": m,
            "beta": beta,
            "g_m_per_s2": g,
            "z0_m": z0,
            "v0_m_per_s": v0,
        }
        for name, ref in oracle.items():
            rows.append(_report_row(draw, name, params, engine[name], closed[name], ref, abs_floor, tol))

    term = PerturbationTerm(TermKind.DILATON_OSCILLATION)

    for draw in range(draws):
        omega = loguniform(0.1, 10.0)
        # c k_rho < omega keeps the dispersion relation satisfiable
        pair = DarkMatterPair(
            ell=loguniform(1e2, 1e4),
            T=loguniform(0.1, 2.0),
            k=loguniform(1e6, 3e7),
            m=loguniform(1e-26, 1e-24),
            v0=float(rng.uniform(-1.0, 1.0)),
            rho0=loguniform(1e-20, 1e-10),
            omega_rho=omega,
            k_rho=omega / ctx.c * float(rng.uniform(0.05, 0.95)),
            phi_rho=float(rng.uniform(0, 2 * np.pi)),
        )
        upper, _ = dm_pair_specs(pair, ctx)
        engine = term_phase(upper, term)
        closed = dm_single_phase(pair, upper.z0, upper.t_first, ctx)
        ref = quad_term_phase(upper, term, cfg)
        envelope = pair.rho0 * (ctx.c * pair.k * pair.T) ** 2 * abs(pair.k_rho / pair.k)
        params = {
            "T_s": pair.T,
            "k_per_m": pair.k,
            "m_kg": pair.m,
            "beta": 0.0,
            "g_m_per_s2": 0.0,
            "z0_m": upper.z0,
            "v0_m_per_s": pair.v0,
        }
        rows.append(
            _report_row(draws + draw, term.name, params, engine, closed, ref, max(envelope, abs_floor), tol)
        )

    return rows
