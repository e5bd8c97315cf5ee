"""Trajectory generation and the dynamical residual checks.

Closed forms cover the constant potential (allowed and forbidden massive
regions) and the photon; general potentials go through a time-of-flight
quadrature of the velocity field.

Two labelings of the same trajectory family appear in the formulation:
the flow generated by the reduced action carries constants (a, b) from
a*phi1/phi2 + b, while the printed time-domain solutions carry the
integration constants of the inverted relation, arctan[a tan(w t) + b].
The closed-form generators below use the time-domain labels, the
quadrature path uses the action labels, and ``dual_params`` converts
(the map is its own inverse).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np
from scipy.integrate import quad

from .action import MobiusParams, conjugate_momentum, dual_params
from .errors import DegenerateBasisError, DomainError, SingularEnergyError
from .kg import KgBasis
from .scenario import (
    METERS_PER_FM,
    PotentialKind,
    Scenario,
    TURNING_TOL_FACTOR,
    kinetic_factor,
)


class TrajectoryKind(enum.Enum):
    CLOSED_ALLOWED = "closed-allowed"
    CLOSED_FORBIDDEN = "closed-forbidden"
    CLOSED_PHOTON = "closed-photon"
    ODE_GENERAL = "ode-general"


@dataclass
class Trajectory:
    """A sampled (t, x) path with exact per-sample velocities."""

    times: np.ndarray       # s, strictly increasing
    positions: np.ndarray   # fm
    velocities: np.ndarray  # fm / s
    params: MobiusParams
    scenario: Scenario
    kind: TrajectoryKind
    direction: int = +1
    truncated_at: float | None = None  # fm, turning point hit by the quadrature
    position_fn: Callable | None = field(default=None, repr=False, compare=False)


@dataclass(frozen=True)
class DivergenceEvent:
    """Finite time at which a forbidden-region trajectory blows up."""

    t_star: float   # s
    direction: int  # +1 -> x -> +inf, -1 -> x -> -inf


# ---------------------------------------------------------------------------
# Closed-form rates.

def _allowed_rates(s: Scenario) -> tuple[float, float, float]:
    """(u, k, omega) for the massive allowed constant-potential case."""
    u = s.energy - s.potential.u0
    q2 = u * u - s.rest_energy**2
    if abs(q2) <= TURNING_TOL_FACTOR * s.energy**2:
        raise DegenerateBasisError("turning energy: closed form degenerates")
    if q2 < 0:
        raise DomainError("(E - U0)^2 < m0^2 c^4: use the forbidden-region form")
    if u == 0.0:
        raise SingularEnergyError("E = U0")
    k = math.sqrt(q2) / s.hbar_c
    omega = q2 / (s.hbar * abs(u))
    return u, k, omega


def _photon_rates(s: Scenario) -> tuple[float, float]:
    u = s.energy - s.potential.u0
    if u == 0.0:
        raise SingularEnergyError("E = U0")
    k = abs(u) / s.hbar_c
    omega = abs(u) / s.hbar
    return k, omega


def _forbidden_rates(s: Scenario) -> tuple[float, float, float]:
    """(kappa, omega_f, q2f) for the massive forbidden case."""
    u = s.energy - s.potential.u0
    if u == 0.0:
        raise SingularEnergyError("E = U0")
    q2f = s.rest_energy**2 - u * u
    if abs(q2f) <= TURNING_TOL_FACTOR * s.energy**2:
        raise DegenerateBasisError("turning energy: closed form degenerates")
    if q2f < 0:
        raise DomainError("(E - U0)^2 > m0^2 c^4: this is an allowed region")
    kappa = math.sqrt(q2f) / s.hbar_c
    omega_f = q2f / (s.hbar * u)
    return kappa, omega_f, q2f


def _arctan_family_position(t, omega, k, a, b, x0, direction):
    """x(t) = x0 +- [arctan(a tan(w t) + b) + n pi] / k, branch-stitched.

    n = round(w t / pi) keeps the arctan on the branch that makes x
    continuous and increasing; at the interval edges both neighboring
    branches give the same value, so the stitching is seamless.
    """
    t = np.asarray(t, dtype=float)
    n = np.round(omega * t / math.pi)
    theta = omega * t - n * math.pi
    y = a * np.tan(theta) + b
    val = np.arctan(y) + n * math.pi
    return x0 + direction * val / k


def _arctan_family_velocity(t, omega, k, a, b, direction):
    t = np.asarray(t, dtype=float)
    n = np.round(omega * t / math.pi)
    theta = omega * t - n * math.pi
    cos2 = np.cos(theta) ** 2
    y = a * np.tan(theta) + b
    return direction * (a * omega / k) / (cos2 * (1.0 + y * y))


def constant_allowed_position(s: Scenario, p: MobiusParams, t):
    """Closed-form x(t) for a massive particle in an allowed region."""
    _, k, omega = _allowed_rates(s)
    return _arctan_family_position(t, omega, k, p.a, p.b, p.x0, p.direction)


def constant_allowed_velocity(s: Scenario, p: MobiusParams, t):
    _, k, omega = _allowed_rates(s)
    return _arctan_family_velocity(t, omega, k, p.a, p.b, p.direction)


def photon_position(s: Scenario, p: MobiusParams, t):
    """Closed-form photon x(t); both signs of E - U0 give the same family."""
    k, omega = _photon_rates(s)
    return _arctan_family_position(t, omega, k, p.a, p.b, p.x0, p.direction)


def photon_velocity(s: Scenario, p: MobiusParams, t):
    k, omega = _photon_rates(s)
    return _arctan_family_velocity(t, omega, k, p.a, p.b, p.direction)


def constant_forbidden_position(s: Scenario, p: MobiusParams, t):
    """x(t) = x0 +- ln|a tan(w_f t) + b| / (2 kappa)."""
    kappa, omega_f, _ = _forbidden_rates(s)
    t = np.asarray(t, dtype=float)
    z = p.a * np.tan(omega_f * t) + p.b
    with np.errstate(divide="ignore"):
        return p.x0 + p.direction * np.log(np.abs(z)) / (2.0 * kappa)


def constant_forbidden_velocity(s: Scenario, p: MobiusParams, t):
    kappa, omega_f, _ = _forbidden_rates(s)
    t = np.asarray(t, dtype=float)
    z = p.a * np.tan(omega_f * t) + p.b
    sec2 = 1.0 / np.cos(omega_f * t) ** 2
    with np.errstate(divide="ignore"):
        return p.direction * p.a * omega_f * sec2 / (2.0 * kappa * z)


def node_times_constant(s: Scenario, t_lo: float, t_hi: float) -> np.ndarray:
    """Family-crossing times (n + 1/2) pi / omega inside (t_lo, t_hi)."""
    if s.species.is_photon:
        _, omega = _photon_rates(s)
    else:
        _, _, omega = _allowed_rates(s)
    n_lo = math.ceil(t_lo * omega / math.pi - 0.5 + 1e-12)
    n_hi = math.floor(t_hi * omega / math.pi - 0.5 - 1e-12)
    return (np.arange(n_lo, n_hi + 1) + 0.5) * math.pi / omega


def _merged_time_grid(t_range, dt, extra_times) -> np.ndarray:
    t0, t1 = t_range
    if t1 <= t0:
        raise ValueError("t_range must be increasing")
    if dt <= 0:
        raise ValueError("dt must be positive")
    base = t0 + dt * np.arange(int(math.floor((t1 - t0) / dt + 1e-9)) + 1)
    if base[-1] < t1 - 1e-12 * dt:
        base = np.append(base, t1)
    times = np.unique(np.concatenate([base, np.asarray(extra_times, dtype=float)]))
    return times[(times >= t0 - 1e-15) & (times <= t1 + 1e-15)]


# ---------------------------------------------------------------------------
# Generators.

def trajectory_constant_allowed(
    s: Scenario, p: MobiusParams, t_range: tuple[float, float], dt: float
) -> Trajectory:
    """Sampled closed-form trajectory; node times are always sample points."""
    if not s.potential.is_constant:
        raise ValueError("constant-potential generator needs a constant potential")
    if s.species.is_photon:
        raise ValueError("use trajectory_photon for a massless particle")
    nodes = node_times_constant(s, *t_range)
    times = _merged_time_grid(t_range, dt, nodes)
    pos = constant_allowed_position(s, p, times)
    vel = constant_allowed_velocity(s, p, times)
    return Trajectory(
        times=times,
        positions=pos,
        velocities=vel,
        params=p,
        scenario=s,
        kind=TrajectoryKind.CLOSED_ALLOWED,
        direction=p.direction,
        position_fn=lambda t, _s=s, _p=p: constant_allowed_position(_s, _p, t),
    )


def trajectory_photon(
    s: Scenario, p: MobiusParams, t_range: tuple[float, float], dt: float
) -> Trajectory:
    """Photon trajectory under a constant potential.

    Valid for E - U0 of either sign: the basis is trigonometric in both
    cases, so the motion is identical in the two quantum situations.
    """
    if not s.potential.is_constant:
        raise ValueError("photon closed form needs a constant potential")
    if not s.species.is_photon:
        raise ValueError("species is massive; use the massive generators")
    nodes = node_times_constant(s, *t_range)
    times = _merged_time_grid(t_range, dt, nodes)
    pos = photon_position(s, p, times)
    vel = photon_velocity(s, p, times)
    return Trajectory(
        times=times,
        positions=pos,
        velocities=vel,
        params=p,
        scenario=s,
        kind=TrajectoryKind.CLOSED_PHOTON,
        direction=p.direction,
        position_fn=lambda t, _s=s, _p=p: photon_position(_s, _p, t),
    )


def divergence_times_forbidden(
    s: Scenario, p: MobiusParams, t_range: tuple[float, float]
) -> list[DivergenceEvent]:
    """Analytic blow-up times inside t_range.

    The log argument a tan(w_f t) + b vanishing sends x to -inf; the tan
    poles send it to +inf (signs flip with the direction).
    """
    _, omega_f, _ = _forbidden_rates(s)
    t0, t1 = t_range
    events: list[DivergenceEvent] = []
    # a tan + b = 0
    base = math.atan(-p.b / p.a) / omega_f
    period = math.pi / abs(omega_f)
    m_lo = math.ceil((t0 - base) / period - 1e-12)
    m_hi = math.floor((t1 - base) / period + 1e-12)
    for m in range(m_lo, m_hi + 1):
        events.append(DivergenceEvent(t_star=base + m * period, direction=-p.direction))
    # tan poles
    pole0 = 0.5 * math.pi / omega_f
    m_lo = math.ceil((t0 - pole0) / period - 1e-12)
    m_hi = math.floor((t1 - pole0) / period + 1e-12)
    for m in range(m_lo, m_hi + 1):
        events.append(DivergenceEvent(t_star=pole0 + m * period, direction=+p.direction))
    events.sort(key=lambda e: e.t_star)
    return events


def trajectory_constant_forbidden(
    s: Scenario,
    p: MobiusParams,
    t_range: tuple[float, float],
    dt: float,
    x_ceiling: float = 1.0e6,
) -> tuple[Trajectory, list[DivergenceEvent]]:
    """Forbidden-region massive trajectory plus its divergence events.

    Samples with |x| beyond the ceiling (or non-finite, at exact blow-up
    times) are dropped; the divergence times themselves are computed from
    the tan / log structure, never from samples.
    """
    if not s.potential.is_constant:
        raise ValueError("constant-potential generator needs a constant potential")
    if s.species.is_photon:
        raise ValueError("the photon has no forbidden-region form; use trajectory_photon")
    times = _merged_time_grid(t_range, dt, [])
    pos = constant_forbidden_position(s, p, times)
    vel = constant_forbidden_velocity(s, p, times)
    keep = np.isfinite(pos) & (np.abs(pos) <= x_ceiling)
    traj = Trajectory(
        times=times[keep],
        positions=pos[keep],
        velocities=vel[keep],
        params=p,
        scenario=s,
        kind=TrajectoryKind.CLOSED_FORBIDDEN,
        direction=p.direction,
        position_fn=lambda t, _s=s, _p=p: constant_forbidden_position(_s, _p, t),
    )
    return traj, divergence_times_forbidden(s, p, t_range)


# ---------------------------------------------------------------------------
# Quadrature trajectory for general potentials.

def flow_speed(s: Scenario, basis: KgBasis, p: MobiusParams, x):
    """dx/dt of the action flow at x, in fm/s (positive-x convention).

    [E - V - m0^2 c^4/(E - V)] [phi2^2 + (a phi1 + b phi2)^2] / (hbar a W).
    """
    phi1 = basis.phi1(x)
    phi2 = basis.phi2(x)
    bracket = phi2 * phi2 + (p.a * phi1 + p.b * phi2) ** 2
    return kinetic_factor(s, x) * bracket / (s.hbar * p.a * basis.wronskian)


def _turning_points_inside(s: Scenario, lo: float, hi: float) -> list[float]:
    if s.potential.kind is not PotentialKind.LINEAR:
        return []
    g = s.potential.g
    candidates = [(s.energy - s.rest_energy) / g, (s.energy + s.rest_energy) / g]
    return sorted(x for x in candidates if lo < x < hi)


# 4-point Gauss-Legendre on [-1, 1]
_GL_NODES = np.array(
    [-0.8611363115940526, -0.3399810435848563, 0.3399810435848563, 0.8611363115940526]
)
_GL_WEIGHTS = np.array(
    [0.3478548451374538, 0.6521451548625461, 0.6521451548625461, 0.3478548451374538]
)


def _cumulative_time_gauss(s: Scenario, basis: KgBasis, p: MobiusParams, xs: np.ndarray):
    """t(x) at the requested samples via cell-aligned Gauss panels."""
    lo, hi = float(xs[0]), float(xs[-1])
    grid = basis.grid
    interior = grid[(grid > lo) & (grid < hi)]
    edges = np.unique(np.concatenate([[lo, hi], interior, xs]))
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    pts = mid[:, None] + half[:, None] * _GL_NODES[None, :]
    v = np.asarray(flow_speed(s, basis, p, pts.ravel()), dtype=float).reshape(pts.shape)
    panel = half * np.sum(_GL_WEIGHTS[None, :] / v, axis=1)
    cum = np.concatenate([[0.0], np.cumsum(panel)])
    idx = np.searchsorted(edges, xs)
    return cum[np.clip(idx, 0, len(cum) - 1)]


def trajectory_ode(
    s: Scenario,
    basis: KgBasis,
    p: MobiusParams,
    x_range: tuple[float, float],
    n_samples: int,
    turning_guard: float = 1.0e-3,
    quad_epsrel: float | None = None,
) -> Trajectory:
    """t(x) by quadrature of 1/xdot, stitched continuously across the range.

    The parameters here are the action-side labels: the flow integrated is
    exactly the one whose conjugate momentum is hbar a W / (...).  xdot is
    finite and of one sign between turning points, so t(x) is smooth and
    strictly monotone.  Closed-form bases use adaptive quadrature with the
    phi2 zeros (where xdot peaks) as breakpoints; sampled bases use Gauss
    panels aligned to their grid cells, which matches the interpolant's
    own fidelity.  A turning point inside the range truncates it (the flow
    only reaches it asymptotically) and is flagged on the result.
    """
    lo, hi = x_range
    if hi <= lo:
        raise ValueError("x_range must be increasing")
    if n_samples < 2:
        raise ValueError("need at least 2 samples")
    truncated_at = None
    turns = _turning_points_inside(s, lo, hi)
    if turns:
        truncated_at = turns[0]
        hi = truncated_at - turning_guard
        if hi <= lo:
            raise DomainError("x_range collapses after turning-point truncation")
    if not (basis.x_min <= lo and hi <= basis.x_max):
        raise DomainError("basis does not cover the requested x_range")

    xs = np.linspace(lo, hi, n_samples)
    if basis.is_closed_form:
        inv_speed = lambda x: 1.0 / flow_speed(s, basis, p, float(x))
        epsrel = 1e-12 if quad_epsrel is None else quad_epsrel

        def _quad(a, b):
            # full_output keeps the benign roundoff report out of the
            # warning stream; the integrand is smooth and at tolerance
            return quad(inv_speed, a, b, epsabs=0.0, epsrel=epsrel, limit=200, full_output=1)[0]

        bps = [lo] + [float(z) for z in basis.phi2_zeros(lo, hi) if lo < z < hi] + [hi]
        t_at_bp = [0.0]
        for a, b in zip(bps[:-1], bps[1:]):
            t_at_bp.append(t_at_bp[-1] + _quad(a, b))
        ts = np.empty(n_samples)
        for i, x in enumerate(xs):
            j = int(np.searchsorted(bps, x, side="right") - 1)
            j = min(max(j, 0), len(bps) - 2)
            ts[i] = t_at_bp[j] + _quad(bps[j], float(x))
    else:
        # Sampled basis: the integrand is smooth inside each grid cell and
        # has interpolation kinks at the cell edges, so adaptive refinement
        # buys nothing.  Fixed Gauss panels aligned to cells (with every
        # requested sample made a panel edge) integrate the interpolant to
        # its own fidelity and vectorize over the whole window.
        ts = _cumulative_time_gauss(s, basis, p, xs)
    vels = np.asarray(flow_speed(s, basis, p, xs), dtype=float)
    if p.direction < 0:
        # mirror trajectory: reflect the displacement, keep time forward
        xs = xs[0] - (xs - xs[0])
        vels = -vels
    return Trajectory(
        times=ts,
        positions=xs,
        velocities=vels,
        params=p,
        scenario=s,
        kind=TrajectoryKind.ODE_GENERAL,
        direction=p.direction,
        truncated_at=truncated_at,
    )


# ---------------------------------------------------------------------------
# Dynamical residuals.

def _firqnl_terms(s: Scenario, x, xd, xdd, xddd):
    """Terms of the trajectory-level first integral of the motion.

    Obtained by substituting the velocity-momentum relation into the
    stationary Hamilton-Jacobi equation and clearing denominators; the
    constant-potential and photon forms are the dV/dx = 0 reductions.
    """
    u = s.energy - s.potential.value(x)
    m4 = s.rest_energy**2
    q = u * u - m4
    vp = s.potential.derivative(x)
    vpp = s.potential.second_derivative(x)
    hb2 = s.hbar**2
    t1 = q * q
    t2 = -(xd * xd / s.c**2) * u * u * q
    t3 = 0.5 * hb2 * (1.5 * (xdd / xd) ** 2 - xddd / xd) * u * u
    t4 = -0.5 * hb2 * (xdd * vp + xd * xd * vpp) * u * (u * u + m4) / q
    t5 = -0.75 * hb2 * (xd * vp) ** 2 * ((u * u + m4) / q) ** 2
    t6 = -hb2 * (xd * vp) ** 2 * m4 / q
    return t1, t2, t3, t4, t5, t6


def _uniform_samples(traj: Trajectory) -> tuple[np.ndarray, np.ndarray]:
    """Uniformly spaced (t, x); exact resampling when the generator is known."""
    t = traj.times
    if len(t) < 7:
        raise ValueError("need at least 7 samples for the difference stencils")
    dts = np.diff(t)
    uniform = np.allclose(dts, dts[0], rtol=1e-9, atol=0.0)
    if uniform:
        return t, traj.positions
    grid = np.linspace(t[0], t[-1], len(t))
    if traj.position_fn is not None:
        return grid, np.asarray(traj.position_fn(grid), dtype=float)
    from scipy.interpolate import CubicSpline

    return grid, CubicSpline(t, traj.positions)(grid)


def firqnl_residual(traj: Trajectory) -> float:
    """Max normalized residual of the trajectory-level first integral.

    xdot and xddot come from 5-point stencils, the third derivative from a
    7-point stencil, all on a uniform time grid (non-uniform inputs are
    resampled first).  The maximum is taken over interior samples, keeping
    one node interval clear of the trajectory endpoints where the stencils
    are weakest.
    """
    s = traj.scenario
    t, x = _uniform_samples(traj)
    h = t[1] - t[0]
    xd = (-x[4:] + 8 * x[3:-1] - 8 * x[1:-3] + x[:-4]) / (12.0 * h)
    xdd = (-x[4:] + 16 * x[3:-1] - 30 * x[2:-2] + 16 * x[1:-3] - x[:-4]) / (12.0 * h * h)
    xddd = (x[:-6] - 8 * x[1:-5] + 13 * x[2:-4] - 13 * x[4:-2] + 8 * x[5:-1] - x[6:]) / (
        8.0 * h**3
    )
    # align stencils: xd/xdd valid on [2:-2], xddd on [3:-3]
    xd = xd[1:-1]
    xdd = xdd[1:-1]
    xin = x[3:-3]
    tin = t[3:-3]
    terms = _firqnl_terms(s, xin, xd, xdd, xddd)
    total = sum(terms)
    scale = np.max(np.abs(np.array(terms)), axis=0)
    res = np.abs(total) / scale

    keep = np.ones(len(tin), dtype=bool)
    if traj.kind in (TrajectoryKind.CLOSED_ALLOWED, TrajectoryKind.CLOSED_PHOTON):
        if s.species.is_photon:
            _, omega = _photon_rates(s)
        else:
            _, _, omega = _allowed_rates(s)
        guard = math.pi / omega  # one node interval
        keep &= (tin >= t[0] + guard) & (tin <= t[-1] - guard)
        if not np.any(keep):
            keep[:] = True
    return float(np.max(res[keep]))


def velocity_momentum_check(
    traj: Trajectory, basis: KgBasis, p: MobiusParams | None = None
) -> float:
    """Max relative error of xdot * dS0/dx = (E-V) - m0^2 c^4/(E-V).

    ``p`` must be the action-side labels of the trajectory's family member.
    When omitted it is derived from the trajectory: quadrature trajectories
    already carry action labels, closed forms carry the time-domain labels
    and are converted (x0 = 0 anchors only).
    """
    if basis.scenario != traj.scenario:
        raise ValueError("trajectory and basis must share one scenario")
    if p is None:
        if traj.kind is TrajectoryKind.ODE_GENERAL:
            p = traj.params
        else:
            if traj.params.x0 != 0.0:
                raise ValueError(
                    "cannot infer action labels for a shifted closed form; pass p"
                )
            p = dual_params(traj.params)
    s = traj.scenario
    x = traj.positions
    lhs = traj.velocities * conjugate_momentum(basis, p, x)
    rhs = kinetic_factor(s, x)
    scale = np.maximum(np.abs(rhs), 1e-12 * s.energy)
    return float(np.max(np.abs(lhs - rhs) / scale))


# ---------------------------------------------------------------------------
# Output.

def write_trajectory_csv(traj: Trajectory, path: str | Path) -> Path:
    """One CSV per trajectory; SI columns (t in s, x in m)."""
    s = traj.scenario
    p = Path(path)
    with p.open("w") as fh:
        fh.write("# rqtlab trajectory\n")
        fh.write(f"# species_rest_mev = {s.rest_energy!r}\n")
        fh.write(f"# energy_mev = {s.energy!r}\n")
        fh.write(f"# potential = {s.potential.kind.value}\n")
        fh.write(f"# u0_mev = {s.potential.u0!r}\n")
        fh.write(f"# g_mev_per_fm = {s.potential.g!r}\n")
        fh.write(f"# hbar_scale = {s.hbar_scale!r}\n")
        fh.write(f"# a = {traj.params.a!r}\n")
        fh.write(f"# b = {traj.params.b!r}\n")
        fh.write(f"# x0_fm = {traj.params.x0!r}\n")
        fh.write(f"# kind = {traj.kind.value}\n")
        if traj.truncated_at is not None:
            fh.write(f"# truncated_at_fm = {traj.truncated_at!r}\n")
        fh.write("# columns: t_s, x_m\n")
        for t, x in zip(traj.times, traj.positions):
            fh.write(f"{t:.12e},{x * METERS_PER_FM:.12e}\n")
    return p
