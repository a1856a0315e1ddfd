"""Tests for the two-frequency cycling engine.

Frozen numbers below were produced from the closed-form segment maps and
cross-checked against an independent Stein iteration and the RK4 oracle
before being pinned.
"""

import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from levisqueeze.errors import ConfigError, NonConverged, Overdamped
from levisqueeze.linalg import Mat2, SymMat2, congruence, mat2_exp, spectral_radius
from levisqueeze.noise import DynamicsCoefficients, build_matrices
from levisqueeze.propagate import lyapunov_asymptote, lyapunov_propagate, riccati_asymptote
from levisqueeze.protocol import (
    DIVERGENT,
    CycleMap,
    Divergent,
    ProtocolSchedule,
    SqueezeRates,
    build_schedule,
    classify_squeezing,
    cycle_map,
    protocol_asymptote,
    squeeze_rates,
    squeezing_ratio,
    unitary_cycle,
)

from oracles import rk4_sigma

OM1 = 0.75 * math.pi
OM2 = 1.50 * math.pi

# Figure-3 style drive: equal damping rates, symmetric diffusion, b = 3.
FIG3_KW = dict(d1=0.5, d2=0.5, mass=1.0, hbar=1.0)
# Figure-2 style drive: a2 = 1, d1 = d2 = 2, backaction b = 2 on the
# filtered branch.
FIG2_KW = dict(d1=2.0, d2=2.0, mass=1.0, hbar=1.0)

F11_FIG3 = -math.exp(-1.0) / 2.0
F22_FIG3 = -2.0 * math.exp(-1.0)
G_FIG3 = SymMat2(0.08275282236636862, -0.11653465720447966, 2.702504389419124)
STEIN_FIG3 = SymMat2(0.08565071325066788, -0.13477438704876524, 5.892188254813792)
RICCATI_FIG3_FP = SymMat2(0.07850909860299568, -0.13164245558826868, 2.5372147936221126)
FIG2_RICCATI_02 = SymMat2(0.35612177025882596, -0.6524394829967831, 10.640122459235057)
FIG2_RICCATI_06 = SymMat2(0.32469388731314597, -0.5597854924213695, 9.30797410345876)
SRPP_A02 = 0.19507465746098274
SRPP_A06 = -0.21262196252614673
ROOT_LIMIT_FORM = 0.3901555485805056
ROOT_FULL_FORM = 0.3730067658139712
SIGMA_G_OM2 = 1.0 / (3.0 * math.pi)


def coeffs(a1, a2, omega, b=0.0, *, d1=0.0, d2=0.0, mass=1.0, hbar=1.0):
    return DynamicsCoefficients(
        a1=a1, a2=a2, d1=d1, d2=d2, b=b, omega=omega, mass=mass, hbar=hbar
    )


def pair(a1, a2, b=0.0, **kw):
    return coeffs(a1, a2, OM1, b, **kw), coeffs(a1, a2, OM2, b, **kw)


def assert_close(got: SymMat2, want: SymMat2, rtol: float) -> None:
    scale = max(want.norm(), 1e-300)
    assert (got - want).norm() <= rtol * scale, f"{got} != {want}"


def oracle_cycle(sigma0, c1, c2, sched, dt=2e-5):
    """Independent RK4 pass over one full cycle, segment by segment."""
    state = np.array([sigma0.xx, sigma0.xp, sigma0.pp])
    for c, t in ((c1, sched.t1), (c2, sched.t2)):
        a, d, b = build_matrices(c)
        w = b.m12 * b.m12
        state = rk4_sigma(
            state,
            a.as_array(),
            np.array([d.xx, d.xp, d.pp]),
            np.array([w, 0.0, 0.0]),
            t,
            dt,
        )
    return SymMat2(float(state[0]), float(state[1]), float(state[2]))


class TestBuildSchedule:
    def test_equal_damping_keeps_trap_frequencies(self):
        c1, c2 = pair(1.0, 1.0, **FIG3_KW)
        sched = build_schedule(c1, c2, cycles=4)
        assert sched.effective_omega1 == pytest.approx(OM1, rel=1e-15)
        assert sched.effective_omega2 == pytest.approx(OM2, rel=1e-15)
        assert sched.t1 == pytest.approx(2.0 / 3.0, rel=1e-15)
        assert sched.t2 == pytest.approx(1.0 / 3.0, rel=1e-15)
        assert sched.tau == pytest.approx(1.0, rel=1e-15)
        assert sched.cycles == 4

    def test_damping_gap_shifts_frequencies_down(self):
        c1, c2 = pair(0.2, 1.0, **FIG2_KW)
        sched = build_schedule(c1, c2, cycles=1)
        gap = 0.8
        assert sched.effective_omega1 == pytest.approx(
            math.sqrt(OM1**2 - gap**2 / 4.0), rel=1e-14
        )
        assert sched.effective_omega2 == pytest.approx(
            math.sqrt(OM2**2 - gap**2 / 4.0), rel=1e-14
        )
        assert sched.t1 == pytest.approx(math.pi / (2 * sched.effective_omega1))
        assert sched.tau > 1.0

    def test_overdamped_segment_raises(self):
        c1 = coeffs(0.0, 4.0, 1.5)
        c2 = coeffs(0.0, 4.0, OM2)
        with pytest.raises(Overdamped):
            build_schedule(c1, c2, cycles=1)

    def test_boundary_is_overdamped(self):
        # Effective frequency exactly zero means an infinite quarter period.
        c1 = coeffs(0.0, 3.0, 1.5)
        c2 = coeffs(0.0, 3.0, OM2)
        with pytest.raises(Overdamped):
            build_schedule(c1, c2, cycles=1)

    def test_frequency_order_enforced(self):
        c1 = coeffs(1.0, 1.0, OM2)
        c2 = coeffs(1.0, 1.0, OM1)
        with pytest.raises(ConfigError):
            build_schedule(c1, c2, cycles=1)

    def test_mismatched_damping_rejected(self):
        c1 = coeffs(1.0, 1.0, OM1)
        c2 = coeffs(0.5, 1.0, OM2)
        with pytest.raises(ConfigError):
            build_schedule(c1, c2, cycles=1)

    def test_negative_cycles_rejected(self):
        c1, c2 = pair(1.0, 1.0)
        with pytest.raises(ConfigError):
            build_schedule(c1, c2, cycles=-1)


class TestUnitaryCycle:
    def test_frequency_ratio_half_squeezes_by_four(self):
        out = unitary_cycle(SymMat2.diagonal(1.0, 1.0), omega1=1.0, omega2=2.0)
        assert_close(out, SymMat2(0.25, 0.0, 4.0), 1e-14)

    def test_cross_term_is_preserved(self):
        sigma = SymMat2(2.0, 0.3, 1.5)
        out = unitary_cycle(sigma, omega1=1.0, omega2=3.0)
        assert out.xx == pytest.approx(2.0 / 9.0, rel=1e-14)
        assert out.xp == pytest.approx(0.3, rel=1e-14)
        assert out.pp == pytest.approx(13.5, rel=1e-14)

    def test_determinant_invariant(self):
        sigma = SymMat2(1.3, -0.4, 0.9)
        out = unitary_cycle(sigma, omega1=2.0, omega2=5.0)
        assert out.det() == pytest.approx(sigma.det(), rel=1e-13)

    @given(
        xx=st.floats(0.1, 10.0),
        xp=st.floats(-0.5, 0.5),
        pp=st.floats(0.1, 10.0),
        om1=st.floats(0.5, 3.0),
        ratio=st.floats(1.1, 4.0),
    )
    @settings(max_examples=40)
    def test_matches_zero_noise_zero_damping_cycle(self, xx, xp, pp, om1, ratio):
        sigma = SymMat2(xx, xp, pp)
        assume(sigma.det() > 1e-6)
        om2 = om1 * ratio
        c1 = coeffs(0.0, 0.0, om1)
        c2 = coeffs(0.0, 0.0, om2)
        sched = build_schedule(c1, c2, cycles=1)
        mapped = cycle_map(c1, c2, sched, kind="langevin").apply(sigma)
        assert_close(mapped, unitary_cycle(sigma, om1, om2), 1e-10)


class TestCycleMapLangevin:
    def setup_method(self):
        self.c1, self.c2 = pair(1.0, 1.0, **FIG3_KW)
        self.sched = build_schedule(self.c1, self.c2, cycles=1)
        self.map = cycle_map(self.c1, self.c2, self.sched, kind="langevin")

    def test_linear_part_matches_frozen_diagonal(self):
        f = self.map.linear
        assert f.m11 == pytest.approx(F11_FIG3, rel=1e-13)
        assert f.m22 == pytest.approx(F22_FIG3, rel=1e-13)
        assert abs(f.m12) < 1e-14 and abs(f.m21) < 1e-14

    def test_affine_part_matches_frozen(self):
        assert_close(self.map.affine, G_FIG3, 1e-12)

    def test_determinant_of_linear_part(self):
        # Phase-space contraction over one cycle is set by the total damping.
        tau = self.sched.tau
        det = self.map.linear.det()
        assert det == pytest.approx(math.exp(-2.0 * tau), rel=1e-12)

    def test_zero_noise_map_is_pure_squeeze(self):
        c1, c2 = pair(0.4, 0.4)
        sched = build_schedule(c1, c2, cycles=1)
        m = cycle_map(c1, c2, sched, kind="langevin")
        decay = math.exp(-0.8 * sched.tau / 2.0)
        assert m.linear.m11 == pytest.approx(-decay * OM1 / OM2, rel=1e-12)
        assert m.linear.m22 == pytest.approx(-decay * OM2 / OM1, rel=1e-12)
        assert abs(m.linear.m12) < 1e-13
        assert m.affine.norm() == 0.0

    def test_apply_equals_segment_propagation(self):
        sigma0 = lyapunov_asymptote(*build_matrices(self.c2)[:2])
        via_map = self.map.apply(sigma0)
        a1m, d1m, _ = build_matrices(self.c1)
        a2m, d2m, _ = build_matrices(self.c2)
        mid = lyapunov_propagate(sigma0, a1m, d1m, self.sched.t1)
        direct = lyapunov_propagate(mid, a2m, d2m, self.sched.t2)
        assert_close(via_map, direct, 1e-12)

    def test_single_cycle_against_rk4_oracle(self):
        c1, c2 = pair(0.6, 1.0, **FIG2_KW)
        sched = build_schedule(c1, c2, cycles=1)
        m = cycle_map(c1, c2, sched, kind="langevin")
        sigma0 = lyapunov_asymptote(*build_matrices(c2)[:2])
        got = m.apply(sigma0)
        want = oracle_cycle(sigma0, c1, c2, sched)
        assert_close(got, want, 1e-7)

    def test_iterate_matches_repeated_apply(self):
        sigma0 = SymMat2(0.2, 0.0, 3.0)
        path = self.map.iterate(sigma0, cycles=3)
        assert len(path) == 4
        times = [t for t, _ in path]
        assert times == pytest.approx(
            [0.0, self.sched.tau, 2 * self.sched.tau, 3 * self.sched.tau]
        )
        expected = sigma0
        for _, state in path[1:]:
            expected = self.map.apply(expected)
            assert_close(state, expected, 1e-12)

    def test_iterate_dense_sampling(self):
        sigma0 = SymMat2(0.2, 0.0, 3.0)
        path = self.map.iterate(sigma0, cycles=2, samples_per_segment=5)
        assert len(path) == 1 + 2 * 2 * 5
        times = [t for t, _ in path]
        assert all(b > a for a, b in zip(times, times[1:]))
        assert times[-1] == pytest.approx(2 * self.sched.tau)
        assert_close(path[-1][1], self.map.apply(self.map.apply(sigma0)), 1e-10)

    @given(
        a=st.floats(0.1, 1.5),
        om1=st.floats(1.0, 4.0),
        ratio=st.floats(1.2, 3.0),
        n=st.integers(1, 4),
    )
    @settings(max_examples=25)
    def test_n_cycles_equal_composed_lyapunov(self, a, om1, ratio, n):
        om2 = om1 * ratio
        c1 = coeffs(a, a, om1, d1=0.5, d2=0.5)
        c2 = coeffs(a, a, om2, d1=0.5, d2=0.5)
        sched = build_schedule(c1, c2, cycles=n)
        m = cycle_map(c1, c2, sched, kind="langevin")
        sigma = SymMat2(0.5, 0.1, 2.0)
        via_map = sigma
        for _ in range(n):
            via_map = m.apply(via_map)
        direct = sigma
        a1m, d1m, _ = build_matrices(c1)
        a2m, d2m, _ = build_matrices(c2)
        for _ in range(n):
            direct = lyapunov_propagate(direct, a1m, d1m, sched.t1)
            direct = lyapunov_propagate(direct, a2m, d2m, sched.t2)
        assert_close(via_map, direct, 1e-8)


class TestCycleMapRiccati:
    def test_zero_backaction_matches_langevin(self):
        c1, c2 = pair(0.8, 1.0, **FIG2_KW)
        sched = build_schedule(c1, c2, cycles=1)
        lang = cycle_map(c1, c2, sched, kind="langevin")
        ricc = cycle_map(c1, c2, sched, kind="riccati")
        sigma0 = SymMat2(0.4, -0.1, 2.5)
        assert_close(ricc.apply(sigma0), lang.apply(sigma0), 1e-10)

    def test_single_cycle_against_rk4_oracle(self):
        c1, c2 = pair(0.6, 1.0, b=2.0, **FIG2_KW)
        sched = build_schedule(c1, c2, cycles=1)
        m = cycle_map(c1, c2, sched, kind="riccati")
        sigma0 = riccati_asymptote(*build_matrices(c2))
        got = m.apply(sigma0)
        want = oracle_cycle(sigma0, c1, c2, sched)
        assert_close(got, want, 1e-7)

    def test_unknown_kind_rejected(self):
        c1, c2 = pair(1.0, 1.0)
        sched = build_schedule(c1, c2, cycles=1)
        with pytest.raises(ConfigError):
            cycle_map(c1, c2, sched, kind="stratonovich")

    def test_riccati_map_has_no_linear_part(self):
        c1, c2 = pair(1.0, 1.0, b=3.0, **FIG3_KW)
        sched = build_schedule(c1, c2, cycles=1)
        m = cycle_map(c1, c2, sched, kind="riccati")
        assert m.linear is None and m.affine is None


class TestOffsetCrossingSplit:
    def test_si_heavy_damping_segment_splits_and_matches_oracle(self):
        # At strong gas damping the filtered covariance crosses the
        # stabilizing solution mid-segment; propagation must bisect around
        # the crossing instead of degrading to brute-force integration.
        from levisqueeze.noise import PhysicalParams, coefficients
        from levisqueeze.propagate import riccati_propagate_info

        p = PhysicalParams.reference()
        gam = p.omega1 / 1e4
        b = math.sqrt(8.0 * 0.3 * 1e26)
        built = []
        for om in (p.omega1, p.omega2):
            c = coefficients(p, om, gamma=gam, lam=gam, recoil=1e26)
            built.append(
                DynamicsCoefficients(
                    a1=c.a1, a2=c.a2, d1=c.d1, d2=c.d2, b=b,
                    omega=c.omega, mass=c.mass, hbar=c.hbar,
                )
            )
        c1, c2 = built
        sched = build_schedule(c1, c2, cycles=1)
        m = cycle_map(c1, c2, sched, kind="riccati")
        sigma0 = riccati_asymptote(*build_matrices(c2))
        seg = m.segments[0]
        info = riccati_propagate_info(
            sigma0, seg.drift, seg.diffusion, seg.measurement, seg.duration
        )
        assert info.branch_used == "split-closed-form"
        wxx = seg.measurement.m12 ** 2
        ref = rk4_sigma(
            np.array([sigma0.xx, sigma0.xp, sigma0.pp]),
            seg.drift.as_array(),
            np.array([seg.diffusion.xx, seg.diffusion.xp, seg.diffusion.pp]),
            np.array([wxx, 0.0, 0.0]),
            seg.duration,
            seg.duration / 40000,
        )
        got = info.state.cov
        assert abs(got.xx - ref[0]) <= 1e-6 * abs(ref[0])
        assert abs(got.pp - ref[2]) <= 1e-6 * abs(ref[2])


class TestProtocolAsymptote:
    def test_langevin_fig3_matches_frozen_stein_solution(self):
        c1, c2 = pair(1.0, 1.0, **FIG3_KW)
        sched = build_schedule(c1, c2, cycles=1)
        m = cycle_map(c1, c2, sched, kind="langevin")
        ast = protocol_asymptote(m)
        assert isinstance(ast, SymMat2)
        assert_close(ast, STEIN_FIG3, 1e-11)
        # genuine squeezing: stroboscopic xx sits below the ground variance
        assert ast.xx < SIGMA_G_OM2

    def test_langevin_asymptote_is_a_fixed_point(self):
        c1, c2 = pair(1.0, 1.0, **FIG3_KW)
        sched = build_schedule(c1, c2, cycles=1)
        m = cycle_map(c1, c2, sched, kind="langevin")
        ast = protocol_asymptote(m)
        assert_close(m.apply(ast), ast, 1e-11)

    def test_langevin_divergent_when_spectral_radius_exceeds_one(self):
        c1, c2 = pair(0.2, 1.0, **FIG2_KW)
        sched = build_schedule(c1, c2, cycles=1)
        m = cycle_map(c1, c2, sched, kind="langevin")
        assert spectral_radius(m.linear) > 1.0
        assert protocol_asymptote(m) is DIVERGENT

    def test_zero_backaction_divergence_threshold(self):
        # With a1 = a2 = a and no noise the cycle contracts iff a > ln 2
        # at this frequency pair (tau = 1, ratio 2).
        for a, diverges in ((0.69, True), (0.70, False)):
            c1, c2 = pair(a, a)
            sched = build_schedule(c1, c2, cycles=1)
            m = cycle_map(c1, c2, sched, kind="langevin")
            result = protocol_asymptote(m)
            assert (result is DIVERGENT) == diverges

    def test_riccati_fig3_fixed_point_frozen(self):
        c1, c2 = pair(1.0, 1.0, b=3.0, **FIG3_KW)
        sched = build_schedule(c1, c2, cycles=1)
        m = cycle_map(c1, c2, sched, kind="riccati")
        ast = protocol_asymptote(m)
        assert_close(ast, RICCATI_FIG3_FP, 1e-9)
        assert_close(m.apply(ast), ast, 1e-10)

    def test_riccati_converges_where_langevin_diverges(self):
        c1, c2 = pair(0.2, 1.0, b=2.0, **FIG2_KW)
        sched = build_schedule(c1, c2, cycles=1)
        ricc = protocol_asymptote(cycle_map(c1, c2, sched, kind="riccati"))
        assert_close(ricc, FIG2_RICCATI_02, 1e-9)

    def test_riccati_fig2_at_a06_frozen(self):
        c1, c2 = pair(0.6, 1.0, b=2.0, **FIG2_KW)
        sched = build_schedule(c1, c2, cycles=1)
        ricc = protocol_asymptote(cycle_map(c1, c2, sched, kind="riccati"))
        assert_close(ricc, FIG2_RICCATI_06, 1e-9)

    def test_riccati_nonconverged_cap(self):
        c1, c2 = pair(1.0, 1.0, b=3.0, **FIG3_KW)
        sched = build_schedule(c1, c2, cycles=1)
        m = cycle_map(c1, c2, sched, kind="riccati")
        with pytest.raises(NonConverged):
            protocol_asymptote(m, max_cycles=2)

    @given(
        a1=st.floats(0.05, 1.4),
        a2=st.floats(0.05, 1.4),
        om1=st.floats(1.5, 4.0),
        ratio=st.floats(1.2, 2.5),
    )
    @settings(max_examples=30)
    def test_divergence_dichotomy(self, a1, a2, om1, ratio):
        om2 = om1 * ratio
        c1 = coeffs(a1, a2, om1, d1=1.0, d2=1.0)
        c2 = coeffs(a1, a2, om2, d1=1.0, d2=1.0)
        sched = build_schedule(c1, c2, cycles=1)
        m = cycle_map(c1, c2, sched, kind="langevin")
        rho = spectral_radius(m.linear)
        assume(abs(rho - 1.0) > 1e-6)
        result = protocol_asymptote(m)
        assert (result is DIVERGENT) == (rho >= 1.0)

    def test_divergent_sentinel_identity(self):
        assert isinstance(DIVERGENT, Divergent)
        assert repr(DIVERGENT) == "DIVERGENT"
        assert bool(DIVERGENT) is False


class TestSqueezeRates:
    def scheduled(self, a1, a2=1.0, **kw):
        c1, c2 = pair(a1, a2, **kw)
        sched = build_schedule(c1, c2, cycles=1)
        return c1, c2, sched

    def test_equal_damping_closed_form(self):
        c1, c2, sched = self.scheduled(1.0, 1.0, **FIG3_KW)
        rates = squeeze_rates(c1, c2, sched)
        o1, o2 = sched.effective_omega1, sched.effective_omega2
        f = -math.pi * 2.0 * (o1 + o2) / (2.0 * o1 * o2)
        assert rates.damping_term == pytest.approx(f, rel=1e-13)
        assert rates.damping_term == pytest.approx(-2.0 * sched.tau, rel=1e-13)
        assert rates.rate_xx == pytest.approx(f + math.log(o1**2 / o2**2), rel=1e-13)
        assert rates.rate_pp == pytest.approx(f + math.log(o2**2 / o1**2), rel=1e-13)
        assert rates.rate_xp == pytest.approx(f, rel=1e-13)
        assert rates.damping_gap == 0.0

    def test_fig2_values_frozen(self):
        for a1, want in ((0.2, SRPP_A02), (0.6, SRPP_A06)):
            c1, c2, sched = self.scheduled(a1, **FIG2_KW)
            rates = squeeze_rates(c1, c2, sched)
            assert rates.rate_pp == pytest.approx(want, rel=1e-12)

    def test_position_and_cross_rates_negative(self):
        for a1 in (0.1, 0.39, 0.8, 1.3):
            c1, c2, sched = self.scheduled(a1, **FIG2_KW)
            rates = squeeze_rates(c1, c2, sched)
            assert rates.rate_xx < 0.0
            assert rates.rate_xp < 0.0

    def test_pp_rate_sign_tracks_divergence(self):
        # Positive momentum growth rate must coincide with a divergent
        # noise-averaged cycle map and vice versa.
        for a1 in (0.2, 0.3, 0.5, 0.6, 1.0):
            c1, c2, sched = self.scheduled(a1, **FIG2_KW)
            rates = squeeze_rates(c1, c2, sched)
            m = cycle_map(c1, c2, sched, kind="langevin")
            rho = spectral_radius(m.linear)
            assert (rates.rate_pp > 0.0) == (rho > 1.0), a1

    def test_limit_form_root_location(self):
        lo, hi = 0.2, 0.6

        def srpp(a1):
            c1, c2, sched = self.scheduled(a1, **FIG2_KW)
            return squeeze_rates(c1, c2, sched).rate_pp

        for _ in range(50):
            mid = 0.5 * (lo + hi)
            if srpp(mid) > 0.0:
                lo = mid
            else:
                hi = mid
        root = 0.5 * (lo + hi)
        assert root == pytest.approx(ROOT_LIMIT_FORM, abs=1e-8)
        assert abs(root - 0.39) < 0.01

    def test_reference_state_ratios_shift_the_root(self):
        def srpp_full(a1):
            c1, c2, sched = self.scheduled(a1, **FIG2_KW)
            ref = lyapunov_asymptote(*build_matrices(c2)[:2])
            return squeeze_rates(c1, c2, sched, sigma_ref=ref).rate_pp

        lo, hi = 0.2, 0.6
        for _ in range(50):
            mid = 0.5 * (lo + hi)
            if srpp_full(mid) > 0.0:
                lo = mid
            else:
                hi = mid
        root = 0.5 * (lo + hi)
        assert root == pytest.approx(ROOT_FULL_FORM, abs=1e-8)
        assert root < ROOT_LIMIT_FORM - 0.01

    def test_reference_corrections_vanish_at_equal_damping(self):
        c1, c2, sched = self.scheduled(1.0, 1.0, **FIG3_KW)
        ref = SymMat2(0.3, -0.05, 2.0)
        bare = squeeze_rates(c1, c2, sched)
        with_ref = squeeze_rates(c1, c2, sched, sigma_ref=ref)
        assert with_ref.rate_pp == pytest.approx(bare.rate_pp, rel=1e-13)
        assert with_ref.rate_xp == pytest.approx(bare.rate_xp, rel=1e-13)

    def test_negative_damping_sign_matches_brute_force(self):
        c1, c2, sched = self.scheduled(1.0, 1.0, **FIG3_KW)
        rates = squeeze_rates(c1, c2, sched)
        assert rates.negative_damping_matched is True

    def test_positive_damping_flag_flips_term_sign(self):
        c1, c2, sched = self.scheduled(1.0, 1.0, **FIG3_KW)
        neg = squeeze_rates(c1, c2, sched)
        pos = squeeze_rates(c1, c2, sched, positive_damping=True)
        assert pos.damping_term == pytest.approx(-neg.damping_term, rel=1e-13)
        assert pos.rate_xx == pytest.approx(
            neg.rate_xx - 2.0 * neg.damping_term, rel=1e-12
        )
        assert pos.negative_damping_matched is True

    @given(a=st.floats(0.1, 1.2), om1=st.floats(1.5, 4.0), ratio=st.floats(1.2, 2.5))
    @settings(max_examples=30)
    def test_rate_consistency_with_diffusion_free_map(self, a, om1, ratio):
        om2 = om1 * ratio
        c1 = coeffs(a, a, om1)
        c2 = coeffs(a, a, om2)
        sched = build_schedule(c1, c2, cycles=1)
        rates = squeeze_rates(c1, c2, sched)
        m = cycle_map(c1, c2, sched, kind="langevin")
        contraction = m.linear.m11 ** 2
        assert math.exp(rates.rate_xx) == pytest.approx(contraction, rel=1e-6)


class TestSqueezingRatio:
    def test_ground_state_gives_unity(self):
        sigma = SymMat2(SIGMA_G_OM2, 0.0, 1.0)
        assert squeezing_ratio(sigma, OM2, mass=1.0) == pytest.approx(1.0, rel=1e-14)

    def test_protocol_asymptote_is_squeezed(self):
        zeta = squeezing_ratio(STEIN_FIG3, OM2, mass=1.0)
        assert zeta == pytest.approx(math.sqrt(STEIN_FIG3.xx / SIGMA_G_OM2), rel=1e-13)
        assert zeta < 1.0

    def test_si_units_require_hbar(self):
        hbar = 1.0545718176461565e-34
        mass = 1e-18
        omega = 2.0 * math.pi * 1e5
        ground = hbar / (2.0 * mass * omega)
        sigma = SymMat2(4.0 * ground, 0.0, 1e-40)
        zeta = squeezing_ratio(sigma, omega, mass=mass, hbar=hbar)
        assert zeta == pytest.approx(2.0, rel=1e-12)

    def test_classification_bands(self):
        thermal = math.sqrt(0.135772792797004 / SIGMA_G_OM2)
        assert classify_squeezing(0.8, thermal) == "squeezed"
        assert classify_squeezing(1.05, thermal) == "squashed"
        assert classify_squeezing(thermal + 0.1, thermal) == "unsqueezed"
        assert classify_squeezing(1.0, thermal) == "squashed"

    def test_invalid_inputs_rejected(self):
        with pytest.raises(ValueError):
            squeezing_ratio(SymMat2(-1.0, 0.0, 1.0), OM2, mass=1.0)
        with pytest.raises(ValueError):
            squeezing_ratio(SymMat2(1.0, 0.0, 1.0), -OM2, mass=1.0)


class TestScheduleObject:
    def test_fields_and_tau(self):
        c1, c2 = pair(0.5, 1.0, **FIG2_KW)
        sched = build_schedule(c1, c2, cycles=7)
        assert isinstance(sched, ProtocolSchedule)
        assert sched.omega1 == OM1 and sched.omega2 == OM2
        assert sched.tau == pytest.approx(sched.t1 + sched.t2, rel=1e-15)
        assert sched.cycles == 7

    def test_rates_container_fields(self):
        c1, c2 = pair(1.0, 1.0, **FIG3_KW)
        sched = build_schedule(c1, c2, cycles=1)
        rates = squeeze_rates(c1, c2, sched)
        assert isinstance(rates, SqueezeRates)
        for name in (
            "rate_xx",
            "rate_pp",
            "rate_xp",
            "damping_term",
            "damping_gap",
            "negative_damping_matched",
        ):
            assert hasattr(rates, name)
