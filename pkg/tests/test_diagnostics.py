"""Run diagnostics: norms, sign-pattern classification, breakdown
predictors, persistence traces, and the critical-decay cap."""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from chlab.diagnostics import (
    McKeanVerdict,
    PersistenceTrace,
    decay_blowup_predict,
    energy,
    h1_norm,
    local_derivative,
    mass,
    mckean_classify,
    min_slope,
    peakon_rate_cap_check,
    persistence_check,
    slope_criterion_predict,
    sup_norms,
    weighted_pair_norm,
)
from chlab.field import Field, Grid, momentum_of, peakon, shift_samples
from chlab.initial_data import (
    FromPotential,
    Gaussian,
    GaussianShape,
    MollifiedExponential,
    MollifiedPeakon,
    OddGaussianDerivative,
    TanhGaussianShape,
)
from chlab.weights import StandardFamily
from helpers import field_from_seed

GRID = Grid(20.0, 4096)
GAUSSIAN = Gaussian(1.0, 1.0, 0.0).build(GRID)

seeds = st.integers(min_value=0, max_value=2**32 - 1)


class TestNorms:
    def test_gaussian_closed_forms(self):
        # u = e^{-x^2}: integral u = sqrt(pi), integral (u^2 + u_x^2) =
        # sqrt(2 pi), so the H^1 norm is (2 pi)^{1/4}
        assert mass(GAUSSIAN) == pytest.approx(math.sqrt(math.pi), rel=1e-12)
        assert energy(GAUSSIAN) == pytest.approx(
            math.sqrt(2.0 * math.pi), rel=1e-12
        )
        assert h1_norm(GAUSSIAN) == pytest.approx(
            (2.0 * math.pi) ** 0.25, rel=1e-12
        )

    def test_gaussian_extremal_slope(self):
        # min of -2x e^{-x^2} is -sqrt(2) e^{-1/2}, up to grid sampling
        assert min_slope(GAUSSIAN) == pytest.approx(
            -math.sqrt(2.0) * math.exp(-0.5), abs=1e-4
        )

    def test_sup_norms_sum(self):
        u_inf, ux_inf, total = sup_norms(GAUSSIAN)
        assert u_inf == pytest.approx(1.0, rel=1e-12)
        assert total == u_inf + ux_inf

    def test_peakon_h1_energy(self):
        grid = Grid(40.0, 4096)
        u = peakon(1.0, 0.0, grid)
        # 2 c^2 for the true peakon; the kink costs a small spectral excess
        assert energy(u) == pytest.approx(2.0, rel=0.01)

    @given(seeds)
    def test_local_derivative_tracks_spectral_on_band_limited(self, seed):
        u = field_from_seed(Grid(20.0, 512), seed)
        from chlab.field import derivative

        space = u.grid.dx
        err = np.max(np.abs(local_derivative(u) - derivative(u).values))
        # central differences are second order; band-limited data with
        # modes below pi/(4 dx) keeps the constant modest
        assert err < space**2 * (math.pi / (4 * space)) ** 3


class TestMcKeanClassification:
    def test_nonnegative_potential(self):
        u = FromPotential(m0=GaussianShape(1.0, 1.0, 0.0)).build(Grid(30.0, 4096))
        verdict = mckean_classify(momentum_of(u))
        assert verdict.verdict is McKeanVerdict.CONSTANT_SIGN_NONNEG
        assert verdict.x0 is None
        assert verdict.predicts_global

    def test_nonpositive_potential(self):
        u = FromPotential(m0=GaussianShape(1.0, 1.0, 0.0)).build(Grid(30.0, 4096))
        flipped = Field(u.grid, -u.values)
        verdict = mckean_classify(momentum_of(flipped))
        assert verdict.verdict is McKeanVerdict.CONSTANT_SIGN_NONPOS
        assert verdict.predicts_global

    def test_single_crossing_negative_to_positive(self):
        grid = Grid(40.0, 4096)
        u = FromPotential(m0=TanhGaussianShape(1.0, 1.0, 6.0)).build(grid)
        verdict = mckean_classify(momentum_of(u))
        assert verdict.verdict is McKeanVerdict.SIMPLE_CHANGE_NEG_TO_POS
        assert verdict.x0 == pytest.approx(0.0, abs=grid.dx)
        assert verdict.predicts_global

    def test_reversed_crossing_is_other(self):
        grid = Grid(40.0, 4096)
        u = FromPotential(m0=TanhGaussianShape(1.0, 1.0, 6.0)).build(grid)
        flipped = Field(grid, -u.values)
        verdict = mckean_classify(momentum_of(flipped))
        assert verdict.verdict is McKeanVerdict.OTHER
        assert not verdict.predicts_global

    def test_tolerance_absorbs_noise(self):
        grid = Grid(20.0, 512)
        m = Field(grid, np.exp(-grid.x**2) - 1e-14)
        assert mckean_classify(m).verdict is McKeanVerdict.CONSTANT_SIGN_NONNEG
        strict = mckean_classify(m, tol=0.0)
        assert strict.verdict is not McKeanVerdict.CONSTANT_SIGN_NONNEG

    @given(seeds, st.floats(0.1, 10.0), st.integers(-500, 500))
    def test_invariant_under_scaling_and_translation(self, seed, scale, steps):
        m = field_from_seed(Grid(20.0, 512), seed)
        base = mckean_classify(m).verdict
        scaled = mckean_classify(Field(m.grid, scale * m.values)).verdict
        shifted = mckean_classify(shift_samples(m, steps)).verdict
        assert scaled is base
        # translation can only move a crossing, never change its pattern
        assert shifted in (base, McKeanVerdict.OTHER) or base in (
            McKeanVerdict.OTHER,
        )
        if base in (McKeanVerdict.CONSTANT_SIGN_NONNEG,
                    McKeanVerdict.CONSTANT_SIGN_NONPOS):
            assert shifted is base

    def test_non_finite_rejected(self):
        grid = Grid(20.0, 512)
        values = np.zeros(grid.N)
        values[0] = math.nan
        with pytest.raises(ValueError, match="finite"):
            mckean_classify(Field(grid, values))

    def test_negative_tolerance_rejected(self):
        with pytest.raises(ValueError, match="tolerance"):
            mckean_classify(GAUSSIAN, tol=-1.0)


class TestSlopePredictor:
    def test_evidence_is_the_signed_margin(self):
        result = slope_criterion_predict(GAUSSIAN)
        expected = min_slope(GAUSSIAN) + h1_norm(GAUSSIAN) / math.sqrt(2.0)
        assert result.evidence == pytest.approx(expected, rel=1e-12)
        assert result.fired == (result.evidence < 0.0)

    def test_steep_odd_datum_fires_with_analytic_margin(self):
        # u = -x e^{-x^2}: min slope -1, H^1 norm (pi/2)^{1/4}, so the
        # margin is (pi/2)^{1/4}/sqrt(2) - 1 < 0
        u = OddGaussianDerivative(1.0, 1.0).build(Grid(40.0, 4096))
        result = slope_criterion_predict(u)
        assert result.fired
        expected = (math.pi / 2.0) ** 0.25 / math.sqrt(2.0) - 1.0
        assert result.evidence == pytest.approx(expected, abs=1e-7)
        assert result.evidence == pytest.approx(-0.2083832564569, abs=1e-9)

    def test_shallow_gaussian_stays_silent(self):
        result = slope_criterion_predict(GAUSSIAN)
        assert not result.fired
        assert result.evidence > 0.25  # measured margin 0.2618

    @given(st.floats(0.1, 5.0))
    def test_firing_is_scale_monotone(self, amplitude):
        # both min slope and the H^1 norm scale linearly in amplitude, so
        # the verdict for this datum is amplitude-independent
        u = OddGaussianDerivative(amplitude, 1.0).build(Grid(20.0, 512))
        assert slope_criterion_predict(u).fired


class TestDecayPredictor:
    def test_superexponential_tail_fires(self):
        result = decay_blowup_predict(GAUSSIAN)
        assert result.fired
        assert result.evidence < 1e-100

    def test_critical_exponential_tail_stays_silent(self):
        u = peakon(1.0, 0.0, Grid(40.0, 8192))
        result = decay_blowup_predict(u)
        assert not result.fired
        # e^{|x|}(|u| + |u_x|) = 2 for half the samples... the windowed
        # minimum of e^{|x|} |u| alone is exactly 1 for c = 1
        assert result.evidence == pytest.approx(1.0, abs=1e-10)

    frozen_rates = [
        (0.5, False, 3.984181923e10),
        (0.8, False, 2.667768628e4),
        (1.2, False, 6.188610323e-06),
        (2.0, True, 8.933404014e-27),
    ]

    @pytest.mark.parametrize("rate,fired,evidence", frozen_rates)
    def test_rate_family_threshold(self, rate, fired, evidence):
        """Only decay strictly beyond e^{-|x|} (with margin below the
        relative threshold 1e-6) fires; the predictor is one-directional,
        so silence at rate 1.2 promises nothing about that run's fate."""
        u = MollifiedExponential(amplitude=1.0, rate=rate, center=0.0,
                                 mollify_width=0.1).build(Grid(60.0, 8192))
        result = decay_blowup_predict(u)
        assert result.fired == fired
        assert result.evidence == pytest.approx(evidence, rel=1e-6)

    def test_zero_datum_rejected(self):
        with pytest.raises(ValueError, match="nonzero"):
            decay_blowup_predict(Field(GRID, np.zeros(GRID.N)))

    @pytest.mark.parametrize("window", [0.0, 1.0, -0.5])
    def test_window_fraction_validated(self, window):
        with pytest.raises(ValueError, match="tail_window"):
            decay_blowup_predict(GAUSSIAN, tail_window=window)


class TestPersistence:
    def test_exponential_series_recovers_the_rate(self):
        trace = PersistenceTrace(weight=StandardFamily(), p=2.0)
        for t in np.linspace(0.0, 2.0, 21):
            trace.append(float(t), 2.0 * math.exp(0.7 * t), 1.0)
        report = persistence_check(trace)
        assert report.passed and not report.diverged
        assert report.C_fit == pytest.approx(0.7, rel=1e-9)
        assert report.W0 == 2.0
        assert report.t_valid == (0.0, 2.0)

    def test_zero_trace_passes_trivially(self):
        trace = PersistenceTrace(weight=StandardFamily(), p=2.0)
        for t in (0.0, 0.5, 1.0):
            trace.append(t, 0.0, 1.0)
        report = persistence_check(trace)
        assert report.passed
        assert report.C_fit == 0.0

    def test_divergence_truncates_the_valid_range(self):
        trace = PersistenceTrace(weight=StandardFamily(), p=2.0)
        for t, w in ((0.0, 1.0), (0.5, 2.0), (1.0, math.inf)):
            trace.append(t, w, 1.0)
        report = persistence_check(trace)
        assert report.diverged
        assert report.t_valid == (0.0, 0.5)

    def test_bound_is_self_consistent_on_random_monotone_series(self):
        rng = np.random.default_rng(5)
        trace = PersistenceTrace(weight=StandardFamily(), p=math.inf)
        w = 1.0
        for i in range(30):
            w *= float(np.exp(rng.uniform(-0.05, 0.2)))
            trace.append(i * 0.1, w, float(rng.uniform(0.5, 2.0)))
        report = persistence_check(trace)
        assert report.passed
        assert report.sup_W >= report.W0

    def test_empty_trace_rejected(self):
        with pytest.raises(ValueError, match="empty"):
            persistence_check(PersistenceTrace(weight=StandardFamily(), p=2.0))

    def test_times_must_increase(self):
        trace = PersistenceTrace(weight=StandardFamily(), p=2.0)
        trace.append(0.0, 1.0, 1.0)
        with pytest.raises(ValueError, match="increasing"):
            trace.append(0.0, 1.0, 1.0)

    def test_negative_samples_rejected(self):
        trace = PersistenceTrace(weight=StandardFamily(), p=2.0)
        with pytest.raises(ValueError, match="nonnegative"):
            trace.append(0.0, -1.0, 1.0)

    def test_weighted_pair_norm_sup_matches_direct(self):
        w = StandardFamily(c=2.0)
        u = GAUSSIAN
        direct = float(
            np.max(np.abs(u.values) * w.value(GRID.x))
            + np.max(np.abs(local_derivative(u)) * w.value(GRID.x))
        )
        assert weighted_pair_norm(u, w, math.inf) == pytest.approx(
            direct, rel=1e-12
        )


class TestRateCap:
    def test_exact_peakon_saturates_at_2c(self):
        u = peakon(1.0, 0.0, Grid(40.0, 4096))
        result = peakon_rate_cap_check(u, C=math.inf)
        # e^{|x|}(|u| + |u_x|) = 2c everywhere off the crest
        assert result.sup_value == pytest.approx(2.0, abs=1e-3)

    def test_scales_linearly_in_amplitude(self):
        grid = Grid(40.0, 4096)
        one = peakon_rate_cap_check(peakon(1.0, 0.0, grid), C=math.inf)
        half = peakon_rate_cap_check(peakon(0.5, 0.0, grid), C=math.inf)
        assert half.sup_value == pytest.approx(0.5 * one.sup_value, rel=1e-12)

    def test_mollified_crest_frozen_value(self):
        grid = Grid(40.0, 8192)
        u = MollifiedPeakon(c=1.0, x0=0.0, mollify_width=0.1).build(grid)
        result = peakon_rate_cap_check(u, C=math.inf)
        assert result.sup_value == pytest.approx(2.0100410160, rel=1e-9)
        assert result.region[0] < -18.0 and result.region[1] > 18.0

    def test_cap_comparison(self):
        grid = Grid(40.0, 8192)
        u = MollifiedPeakon(c=1.0, x0=0.0, mollify_width=0.1).build(grid)
        assert not peakon_rate_cap_check(u, C=2.0).passed
        assert peakon_rate_cap_check(u, C=2.1).passed

    def test_zero_field_passes(self):
        result = peakon_rate_cap_check(Field(GRID, np.zeros(GRID.N)), C=1.0)
        assert result.passed and result.sup_value == 0.0

    def test_cap_must_be_positive(self):
        with pytest.raises(ValueError, match="positive"):
            peakon_rate_cap_check(GAUSSIAN, C=0.0)
