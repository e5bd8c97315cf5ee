"""Trajectory generation, node structure, and dynamical residuals."""

import math

import numpy as np
import pytest

import rqtlab as rq
from conftest import AB_GRID

HBAR = 6.582119569e-22
C = 2.99792458e23
ELECTRON_REST = 0.510998950


def _node_spacings(s):
    nd = rq.nodes_constant(s)
    return nd.dt_spacing, float(nd.dx_spacings[0])


class TestClosedAllowed:
    def test_straight_line_slope(self, electron_2mev):
        s = electron_2mev
        dt_n, _ = _node_spacings(s)
        traj = rq.trajectory_constant_allowed(s, rq.MobiusParams(1.0, 0.0), (0.0, 3 * dt_n), dt_n / 64)
        beta = math.sqrt(s.energy**2 - ELECTRON_REST**2) / s.energy
        line = beta * s.c * traj.times
        assert np.max(np.abs(traj.positions - line)) <= 1e-12 * np.max(np.abs(line))
        assert beta == pytest.approx(0.966809, rel=1e-6)

    def test_velocities_match_difference_quotient(self, electron_2mev):
        dt_n, _ = _node_spacings(electron_2mev)
        p = rq.MobiusParams(4.0, 2.0)
        traj = rq.trajectory_constant_allowed(electron_2mev, p, (0.0, dt_n), dt_n / 4096)
        mid_v = 0.5 * (traj.velocities[1:] + traj.velocities[:-1])
        quot = np.diff(traj.positions) / np.diff(traj.times)
        assert np.max(np.abs(quot / mid_v - 1.0)) <= 1e-4

    @pytest.mark.parametrize("a,b", AB_GRID)
    def test_node_concurrence(self, electron_2mev, a, b):
        dt_n, dx_n = _node_spacings(electron_2mev)
        p = rq.MobiusParams(a, b)
        for n in range(3):
            t_n = (n + 0.5) * dt_n
            x = float(rq.constant_allowed_position(electron_2mev, p, t_n))
            assert x == pytest.approx((n + 0.5) * dx_n, rel=1e-9)

    def test_time_translation_structure(self, electron_2mev):
        # interval n is interval 0 translated by (n dt_n, n dx_n)
        dt_n, dx_n = _node_spacings(electron_2mev)
        p = rq.MobiusParams(4.0, 2.0)
        ts = np.linspace(0.05 * dt_n, 0.95 * dt_n, 41)
        x0 = rq.constant_allowed_position(electron_2mev, p, ts)
        for n in (1, 2):
            xn = rq.constant_allowed_position(electron_2mev, p, ts + n * dt_n)
            assert np.max(np.abs(xn - x0 - n * dx_n)) <= 1e-9 * dx_n

    @pytest.mark.parametrize("a,b", [(0.5, -1.0), (1.0, 0.0), (4.0, 2.0)])
    def test_monotone_increasing(self, electron_2mev, a, b):
        dt_n, _ = _node_spacings(electron_2mev)
        traj = rq.trajectory_constant_allowed(
            electron_2mev, rq.MobiusParams(a, b), (0.0, 2 * dt_n), dt_n / 256
        )
        assert np.all(np.diff(traj.times) > 0)
        assert np.all(np.diff(traj.positions) > 0)

    def test_nodes_are_samples(self, electron_2mev):
        dt_n, _ = _node_spacings(electron_2mev)
        traj = rq.trajectory_constant_allowed(
            electron_2mev, rq.MobiusParams(4.0, 2.0), (0.0, 2.2 * dt_n), dt_n / 7
        )
        for n in range(2):
            assert np.any(np.isclose(traj.times, (n + 0.5) * dt_n, rtol=0, atol=1e-30))

    def test_anchor_for_zero_b(self, electron_2mev):
        dt_n, _ = _node_spacings(electron_2mev)
        traj = rq.trajectory_constant_allowed(
            electron_2mev, rq.MobiusParams(2.0, 0.0, x0=75.0), (0.0, dt_n), dt_n / 32
        )
        assert traj.positions[0] == pytest.approx(75.0, abs=1e-12)

    def test_mirror_direction(self, electron_2mev):
        dt_n, _ = _node_spacings(electron_2mev)
        p = rq.MobiusParams(-2.0, -1.0)  # canonicalizes to a=2, b=1, direction -1
        traj = rq.trajectory_constant_allowed(electron_2mev, p, (0.0, dt_n), dt_n / 64)
        assert traj.direction == -1
        assert np.all(np.diff(traj.positions) < 0)

    def test_turning_energy_rejected(self):
        s = rq.Scenario(
            rq.Species.electron(), rq.Potential.constant(2.0 - ELECTRON_REST), energy=2.0
        )
        with pytest.raises(rq.DegenerateBasisError):
            rq.trajectory_constant_allowed(s, rq.MobiusParams(1.0, 0.0), (0.0, 1e-21), 1e-23)


class TestPhoton:
    def test_straight_line_is_light_speed(self, photon_12mev):
        dt_n, _ = _node_spacings(photon_12mev)
        traj = rq.trajectory_photon(photon_12mev, rq.MobiusParams(1.0, 0.0), (0.0, 2 * dt_n), dt_n / 64)
        assert np.allclose(traj.positions, C * traj.times, rtol=1e-12, atol=1e-12)

    def test_node_spacing(self, photon_12mev):
        dt_n, dx_n = _node_spacings(photon_12mev)
        assert dx_n == pytest.approx(516.60, rel=1e-5)
        assert dt_n == pytest.approx(dx_n / C, rel=1e-12)

    def test_sign_of_e_minus_u0_irrelevant(self, photon_12mev):
        s_neg = rq.Scenario(
            rq.Species.photon(), rq.Potential.constant(2.4), energy=1.2
        )  # E - U0 = -1.2
        dt_n, _ = _node_spacings(photon_12mev)
        p = rq.MobiusParams(4.0, 2.0)
        t1 = rq.trajectory_photon(photon_12mev, p, (0.0, 2 * dt_n), dt_n / 128)
        t2 = rq.trajectory_photon(s_neg, p, (0.0, 2 * dt_n), dt_n / 128)
        assert np.array_equal(t1.positions, t2.positions)

    def test_zero_energy_difference_rejected(self):
        s = rq.Scenario(rq.Species.photon(), rq.Potential.constant(1.2), energy=1.2)
        with pytest.raises(rq.SingularEnergyError):
            rq.trajectory_photon(s, rq.MobiusParams(1.0, 0.0), (0.0, 1e-21), 1e-23)


class TestForbidden:
    def test_divergence_time_from_log_argument(self, forbidden_electron):
        # a tan(w t) + b = 0 at tan = -b/a = -1/2
        s = forbidden_electron
        p = rq.MobiusParams(4.0, 2.0)
        q2f = ELECTRON_REST**2 - 0.3**2
        omega_f = q2f / (s.hbar * 0.3)
        period = math.pi / omega_f
        t_star = math.atan(-0.5) / omega_f + period  # first positive root
        events = rq.divergence_times_forbidden(s, p, (0.0, 2 * period))
        neg = [e.t_star for e in events if e.direction == -1]
        assert min(abs(t - t_star) for t in neg) <= 1e-12 * period

    def test_sampled_blowup_brackets_analytic_time(self, forbidden_electron):
        s = forbidden_electron
        p = rq.MobiusParams(4.0, 2.0)
        q2f = ELECTRON_REST**2 - 0.3**2
        omega_f = q2f / (s.hbar * 0.3)
        period = math.pi / omega_f
        traj, events = rq.trajectory_constant_forbidden(
            s, p, (0.0, 2 * period), period / 5000, x_ceiling=1200.0
        )
        assert np.max(np.abs(traj.positions)) <= 1200.0
        for ev in events:
            if not (traj.times[0] < ev.t_star < traj.times[-1]):
                continue
            i = int(np.searchsorted(traj.times, ev.t_star))
            gap = traj.times[i] - traj.times[i - 1]
            # clipped samples leave a hole that straddles the blow-up
            assert gap > period / 5000 * 1.5

    def test_no_common_crossing_point(self, forbidden_electron):
        s = forbidden_electron
        q2f = ELECTRON_REST**2 - 0.3**2
        omega_f = q2f / (s.hbar * 0.3)
        period = math.pi / omega_f
        grid = np.linspace(0.0, 1.9 * period, 1000)
        fam = [
            rq.constant_forbidden_position(s, rq.MobiusParams(a, b), grid)
            for a, b in ((4.0, 2.0), (1.0, 0.0), (2.0, -1.0))
        ]
        min_gap = np.inf
        for i in range(len(fam)):
            for j in range(i + 1, len(fam)):
                d = np.abs(fam[i] - fam[j])
                d = d[np.isfinite(d)]
                min_gap = min(min_gap, float(np.min(d)))
        assert min_gap > 1e-3  # fm; far above any node tolerance

    def test_e_equals_u0_rejected(self):
        s = rq.Scenario(rq.Species.electron(), rq.Potential.constant(2.0), energy=2.0)
        with pytest.raises(rq.SingularEnergyError):
            rq.trajectory_constant_forbidden(s, rq.MobiusParams(4.0, 2.0), (0.0, 1e-20), 1e-23)


class TestOdeTrajectory:
    def test_matches_closed_form_constant(self, electron_2mev, electron_basis):
        s = electron_2mev
        _, dx_n = _node_spacings(s)
        u = s.energy
        q2 = u * u - ELECTRON_REST**2
        k = math.sqrt(q2) / s.hbar_c
        omega = q2 / (s.hbar * u)
        x_lo = 10.0
        for a, b in ((1.0, 0.0), (4.0, 2.0), (0.5, -1.0)):
            p = rq.MobiusParams(a, b)
            ode = rq.trajectory_ode(s, electron_basis, p, (x_lo, x_lo + 3.2 * dx_n), 50)
            t_shift = math.atan(a * math.tan(k * x_lo) + b) / omega
            pd = rq.dual_params(p)
            ref = rq.constant_allowed_position(s, pd, ode.times + t_shift)
            ref0 = rq.constant_allowed_position(s, pd, t_shift)
            err = np.max(np.abs((ode.positions - x_lo) - (ref - ref0)))
            assert err <= 1e-6 * dx_n

    def test_velocity_field_positive_and_stored(self, electron_2mev, electron_basis):
        _, dx_n = _node_spacings(electron_2mev)
        ode = rq.trajectory_ode(
            electron_2mev, electron_basis, rq.MobiusParams(4.0, 2.0), (0.0, 2 * dx_n), 40
        )
        assert np.all(ode.velocities > 0)
        assert np.all(np.diff(ode.times) > 0)

    def test_linear_monotone_and_truncated(self, linear_electron, linear_basis):
        traj = rq.trajectory_ode(
            linear_electron, linear_basis, rq.MobiusParams(1.0, 0.0, -350.0), (-350.0, 7.0), 80
        )
        assert traj.truncated_at == pytest.approx(5.956004, rel=1e-6)
        assert np.all(np.diff(traj.times) > 0)
        assert traj.positions[-1] < 5.956004

    def test_basis_coverage_required(self, electron_2mev, linear_basis):
        with pytest.raises(rq.DomainError):
            rq.trajectory_ode(
                electron_2mev.with_hbar_scale(1.0), linear_basis,
                rq.MobiusParams(1.0, 0.0), (-500.0, 0.0), 20,
            )

    def test_mirror_direction(self, electron_2mev, electron_basis):
        _, dx_n = _node_spacings(electron_2mev)
        traj = rq.trajectory_ode(
            electron_2mev, electron_basis, rq.MobiusParams(-1.0, 0.0), (0.0, dx_n), 30
        )
        assert np.all(np.diff(traj.positions) < 0)
        assert np.all(np.diff(traj.times) > 0)


class TestFirqnlResidual:
    def test_straight_line_tier(self, electron_2mev):
        dt_n, _ = _node_spacings(electron_2mev)
        traj = rq.trajectory_constant_allowed(
            electron_2mev, rq.MobiusParams(1.0, 0.0), (0.0, 3 * dt_n), dt_n / 16
        )
        assert rq.firqnl_residual(traj) <= 1e-8

    def test_generic_member(self, electron_2mev):
        dt_n, _ = _node_spacings(electron_2mev)
        traj = rq.trajectory_constant_allowed(
            electron_2mev, rq.MobiusParams(4.0, 2.0), (0.0, 3 * dt_n), dt_n / 2000
        )
        assert rq.firqnl_residual(traj) <= 1e-3

    def test_photon(self, photon_12mev):
        dt_n, _ = _node_spacings(photon_12mev)
        traj = rq.trajectory_photon(
            photon_12mev, rq.MobiusParams(2.0, 1.0), (0.0, 3 * dt_n), dt_n / 2000
        )
        assert rq.firqnl_residual(traj) <= 1e-3

    def test_too_few_samples(self, electron_2mev):
        dt_n, _ = _node_spacings(electron_2mev)
        traj = rq.trajectory_constant_allowed(
            electron_2mev, rq.MobiusParams(1.0, 0.0), (0.0, 0.4 * dt_n), 0.1 * dt_n
        )
        with pytest.raises(ValueError):
            rq.firqnl_residual(traj)

    def test_formula_matches_symbolic_reduction(self):
        """The hard-coded first-integral terms equal the Hamilton-Jacobi
        equation with the velocity-momentum relation substituted in.

        Works in position space: with w(x) the velocity field along the
        trajectory, xdd = w w' and xddd = w (w w'' + w'^2).  The difference
        of the two sides is a fixed rational function of the independent
        atoms (E, m0^2 c^4, hbar, c, V, V', V'', w, w', w''), so exact
        vanishing at random rational points certifies the identity.
        """
        import random

        import sympy as sp

        x = sp.Symbol("x")
        E, m4, hbar, c = sp.symbols("E m4 hbar c", positive=True)
        V = sp.Function("V")
        w = sp.Function("w")

        u = E - V(x)
        Q = u**2 - m4
        P = Q / (u * w(x))  # dS0/dx via the velocity-momentum relation
        Pp = sp.diff(P, x)
        Ppp = sp.diff(P, x, 2)
        lhs = (
            c**2 * P**2
            - (hbar**2 * c**2 / 2) * (sp.Rational(3, 2) * (Pp / P) ** 2 - Ppp / P)
            + m4
            - u**2
        )

        xd = w(x)
        xdd = w(x) * sp.diff(w(x), x)
        xddd = w(x) * (w(x) * sp.diff(w(x), x, 2) + sp.diff(w(x), x) ** 2)
        vp = sp.diff(V(x), x)
        vpp = sp.diff(V(x), x, 2)
        terms = (
            Q**2,
            -(xd**2 / c**2) * u**2 * Q,
            sp.Rational(1, 2) * hbar**2 * (sp.Rational(3, 2) * (xdd / xd) ** 2 - xddd / xd) * u**2,
            -sp.Rational(1, 2) * hbar**2 * (xdd * vp + xd**2 * vpp) * u * (u**2 + m4) / Q,
            -sp.Rational(3, 4) * hbar**2 * (xd * vp) ** 2 * ((u**2 + m4) / Q) ** 2,
            -(hbar**2) * (xd * vp) ** 2 * m4 / Q,
        )
        diff = sum(terms) - lhs * u**2 * w(x) ** 2 / c**2

        rng = random.Random(8)
        atoms = [
            sp.Derivative(V(x), (x, 2)),
            sp.Derivative(V(x), x),
            sp.Derivative(w(x), (x, 2)),
            sp.Derivative(w(x), x),
            V(x),
            w(x),
            E,
            m4,
            hbar,
            c,
        ]
        for _ in range(3):
            vals = {a: sp.Rational(rng.randint(2, 80), rng.randint(1, 9)) for a in atoms}
            assert sp.simplify(diff.subs(vals)) == 0


class TestVelocityMomentum:
    @pytest.mark.parametrize("a,b", AB_GRID)
    def test_closed_allowed_family(self, electron_2mev, electron_basis, a, b):
        dt_n, _ = _node_spacings(electron_2mev)
        traj = rq.trajectory_constant_allowed(
            electron_2mev, rq.MobiusParams(a, b), (0.0, 2 * dt_n), dt_n / 100
        )
        assert rq.velocity_momentum_check(traj, electron_basis) <= 1e-6

    def test_photon_energy_relation(self, photon_12mev, photon_basis):
        dt_n, _ = _node_spacings(photon_12mev)
        traj = rq.trajectory_photon(
            photon_12mev, rq.MobiusParams(4.0, 2.0), (0.0, 2 * dt_n), dt_n / 100
        )
        assert rq.velocity_momentum_check(traj, photon_basis) <= 1e-6
        # xdot dS0/dx equals E - U0 for the photon
        pd = rq.dual_params(rq.MobiusParams(4.0, 2.0))
        prod = traj.velocities * rq.conjugate_momentum(photon_basis, pd, traj.positions)
        assert np.allclose(prod, 1.2, rtol=1e-12)

    def test_ode_trajectory_uses_action_labels(self, electron_2mev, electron_basis):
        _, dx_n = _node_spacings(electron_2mev)
        p = rq.MobiusParams(4.0, 2.0)
        ode = rq.trajectory_ode(electron_2mev, electron_basis, p, (0.0, 2 * dx_n), 40)
        assert rq.velocity_momentum_check(ode, electron_basis) <= 1e-6
        assert rq.velocity_momentum_check(ode, electron_basis, p) <= 1e-6

    def test_linear_trajectory(self, linear_electron, linear_basis):
        traj = rq.trajectory_ode(
            linear_electron, linear_basis, rq.MobiusParams(1.0, 0.0, -350.0), (-350.0, 5.0), 60
        )
        assert rq.velocity_momentum_check(traj, linear_basis) <= 1e-6

    def test_product_vanishes_at_turning_point(self, linear_electron, linear_basis):
        p = rq.MobiusParams(1.0, 0.0, -350.0)
        far = rq.flow_speed(linear_electron, linear_basis, p, -300.0) * rq.conjugate_momentum(
            linear_basis, p, -300.0
        )
        near = rq.flow_speed(linear_electron, linear_basis, p, 5.95) * rq.conjugate_momentum(
            linear_basis, p, 5.95
        )
        assert abs(near) < 1e-3 * abs(far)
        assert near == pytest.approx(rq.kinetic_factor(linear_electron, 5.95), rel=1e-9)

    def test_shifted_closed_form_needs_explicit_labels(self, electron_2mev, electron_basis):
        dt_n, _ = _node_spacings(electron_2mev)
        traj = rq.trajectory_constant_allowed(
            electron_2mev, rq.MobiusParams(4.0, 2.0, x0=50.0), (0.0, dt_n), dt_n / 50
        )
        with pytest.raises(ValueError, match="pass p"):
            rq.velocity_momentum_check(traj, electron_basis)

    def test_scenario_mismatch_rejected(self, electron_2mev, photon_basis):
        dt_n, _ = _node_spacings(electron_2mev)
        traj = rq.trajectory_constant_allowed(
            electron_2mev, rq.MobiusParams(1.0, 0.0), (0.0, dt_n), dt_n / 50
        )
        with pytest.raises(ValueError, match="share"):
            rq.velocity_momentum_check(traj, photon_basis)


class TestTrajectoryCsv:
    def test_si_units_and_header(self, tmp_path, electron_2mev):
        dt_n, dx_n = _node_spacings(electron_2mev)
        traj = rq.trajectory_constant_allowed(
            electron_2mev, rq.MobiusParams(1.0, 0.0), (0.0, dt_n), dt_n / 20
        )
        path = rq.write_trajectory_csv(traj, tmp_path / "traj.csv")
        lines = path.read_text().splitlines()
        assert any("columns: t_s, x_m" in l for l in lines)
        data = [l for l in lines if not l.startswith("#")]
        t0, x0 = (float(v) for v in data[0].split(","))
        t1, x1 = (float(v) for v in data[-1].split(","))
        # slope in SI is beta * c with c in m/s
        beta = math.sqrt(2.0**2 - ELECTRON_REST**2) / 2.0
        assert (x1 - x0) / (t1 - t0) == pytest.approx(beta * 2.99792458e8, rel=1e-9)
