"""Tests for the speckle Monte Carlo bench."""

import math

import numpy as np
import pytest
from scipy.stats import kstest

from cvbench.speckle import (
    BEAM_MIX_SUBSTITUTE,
    BEAM_SOURCE1,
    BEAM_SOURCE2,
    BEAM_SPLIT_SUBSTITUTE,
    BenchConfig,
    detect,
    field_rng,
    frame_field,
    mix_fields,
    polarized,
    project_jones,
    run_bench,
    sample_thermal_field,
    split_field,
    substitute_modes,
)
from cvbench.stats import corr_coeff


def row_intensities(fields):
    power = fields.real**2 + fields.imag**2
    return power.reshape(power.shape[0], -1).sum(axis=1)


class TestSampler:
    def test_mean_within_five_standard_errors(self):
        # Var(|a|^2) = mean^2, so 5 SE over 1e6 draws is 5 mean / 1e3
        mean = 1.7
        field = sample_thermal_field(field_rng(5, 1), 10**6, mean)
        sample_mean = float(np.mean(np.abs(field) ** 2))
        assert abs(sample_mean - mean) <= 5.0 * mean / 1e3

    def test_intensity_is_exponential(self):
        mean = 0.8
        field = sample_thermal_field(field_rng(6, 1), 10**5, mean)
        intensity = np.abs(field) ** 2
        result = kstest(intensity, "expon", args=(0.0, mean))
        assert result.pvalue > 0.01

    def test_quadratures_have_half_mean_variance(self):
        mean = 2.0
        field = sample_thermal_field(field_rng(7, 1), 10**6, mean)
        assert float(np.var(field.real)) == pytest.approx(mean / 2.0, rel=0.02)
        assert float(np.var(field.imag)) == pytest.approx(mean / 2.0, rel=0.02)

    def test_zero_mean_limit(self):
        field = sample_thermal_field(field_rng(8, 1), 100, 0.0)
        assert np.array_equal(field, np.zeros(100, dtype=complex))

    def test_negative_mean_rejected(self):
        with pytest.raises(ValueError):
            sample_thermal_field(field_rng(9, 1), 10, -1.0)


class TestSplitField:
    def test_full_transmission(self):
        field = sample_thermal_field(field_rng(10, 1), 50, 1.0)
        kept, dumped = split_field(field, 1.0)
        assert np.array_equal(kept, field)
        assert np.allclose(dumped, 0.0)

    def test_outputs_fully_correlated(self):
        fields = sample_thermal_field(field_rng(11, 1), 100 * 10**5, 1.0).reshape(10**5, 100)
        b2, b3 = split_field(fields, 0.37)
        c = corr_coeff(row_intensities(b2), row_intensities(b3))
        assert abs(c - 1.0) <= 0.01

    def test_balanced_split_halves_mean(self):
        field = sample_thermal_field(field_rng(12, 1), 10**5, 2.0)
        a, b = split_field(field, 0.5)
        assert float(np.mean(np.abs(a) ** 2)) == pytest.approx(1.0, rel=0.05)
        assert float(np.mean(np.abs(b) ** 2)) == pytest.approx(1.0, rel=0.05)


class TestMixFields:
    def test_passthrough(self):
        a = sample_thermal_field(field_rng(13, 1), 30, 1.0)
        b = sample_thermal_field(field_rng(13, 2), 30, 1.0)
        out_a, out_b = mix_fields(a, b, 1.0)
        assert np.array_equal(out_a, a)
        assert np.array_equal(out_b, b)

    def test_energy_conserved_per_mode(self):
        a = sample_thermal_field(field_rng(14, 1), 200, 1.3)
        b = sample_thermal_field(field_rng(14, 2), 200, 0.6)
        out_a, out_b = mix_fields(a, b, 0.37)
        before = np.abs(a) ** 2 + np.abs(b) ** 2
        after = np.abs(out_a) ** 2 + np.abs(out_b) ** 2
        assert np.allclose(after, before, rtol=1e-10)

    def test_independent_inputs_uncorrelated_outputs(self):
        n, m = 10**5, 100
        a = sample_thermal_field(field_rng(15, 1), n * m, 1.0).reshape(n, m)
        b = sample_thermal_field(field_rng(15, 2), n * m, 1.0).reshape(n, m)
        out_a, out_b = mix_fields(a, b, 0.5)
        c = corr_coeff(row_intensities(out_a), row_intensities(out_b))
        assert abs(c) <= 0.02

    def test_marginals_stay_thermal(self):
        n, m = 3 * 10**4, 100
        a = sample_thermal_field(field_rng(16, 1), n * m, 1.0).reshape(n, m)
        b = sample_thermal_field(field_rng(16, 2), n * m, 1.0).reshape(n, m)
        out_a, _ = mix_fields(a, b, 0.5)
        i_in = row_intensities(a)
        i_out = row_intensities(out_a)
        se_mean = float(np.std(i_in)) / math.sqrt(n)
        assert abs(float(np.mean(i_out)) - float(np.mean(i_in))) <= 3.0 * se_mean
        assert float(np.var(i_out)) == pytest.approx(float(np.var(i_in)), rel=0.1)

    def test_mode_count_mismatch(self):
        with pytest.raises(ValueError):
            mix_fields(np.zeros(3, complex), np.zeros(4, complex), 0.5)

    def test_substitution_required(self):
        a = np.ones(10, complex)
        with pytest.raises(ValueError):
            mix_fields(a, a, 0.5, eta=0.9)

    def test_substitution_replaces_prefix(self):
        field = np.ones(10, complex)
        replacement = np.full(10, 5.0 + 0j)
        out = substitute_modes(field, 0.8, replacement)
        assert np.array_equal(out[:2], replacement[:2])
        assert np.array_equal(out[2:], field[2:])


class TestJones:
    def test_polarized_and_detect(self):
        field = np.array([1.0 + 0j, 2.0j])
        jones = polarized(field, "H")
        assert detect(jones) == pytest.approx(5.0)
        assert np.allclose(jones[:, 1], 0.0)

    def test_projection_deg45(self):
        jones = np.zeros((2, 2), complex)
        jones[:, 0] = [1.0, 1.0]
        jones[:, 1] = [1.0, -1.0]
        projected = project_jones(jones, "deg45")
        assert detect(projected) == pytest.approx(2.0)  # |sqrt(2)|^2 + 0

    def test_projection_axes(self):
        jones = polarized(np.array([3.0 + 0j]), "V")
        assert detect(project_jones(jones, "V")) == pytest.approx(9.0)
        assert detect(project_jones(jones, "H")) == pytest.approx(0.0)
        assert detect(project_jones(jones, "none")) == pytest.approx(9.0)

    def test_detect_trivial(self):
        assert detect(np.zeros(5, complex)) == 0.0
        assert detect(np.array([1.0 + 0j])) == 1.0


class TestRunBench:
    def test_determinism_across_workers(self):
        batches = [
            run_bench(BenchConfig(modes=20, frames=1500, seed=77, workers=w)) for w in (1, 2, 8)
        ]
        for other in batches[1:]:
            assert np.array_equal(batches[0].intensities_in, other.intensities_in)
            assert np.array_equal(batches[0].intensities_out, other.intensities_out)

    def test_frame_reproducible_in_isolation(self):
        cfg = BenchConfig(modes=13, frames=600, seed=99)
        batch = run_bench(cfg)
        for j in (0, 255, 256, 599):
            beam1 = frame_field(cfg.seed, BEAM_SOURCE1, j, cfg.modes, cfg.mean_photons)
            assert detect(beam1) == batch.in_series(0)[j]

    def test_matches_per_frame_operations(self):
        # the chunked engine must agree with the documented per-frame pipeline
        cfg = BenchConfig(modes=7, frames=10, seed=4, eta=0.7, tau_mix=0.3, t_split=0.4)
        batch = run_bench(cfg)
        source2_mean = cfg.mean_photons / cfg.t_split
        for j in range(cfg.frames):
            beam1 = frame_field(cfg.seed, BEAM_SOURCE1, j, cfg.modes, cfg.mean_photons)
            source2 = frame_field(cfg.seed, BEAM_SOURCE2, j, cfg.modes, source2_mean)
            beam2, beam3 = split_field(source2, cfg.t_split)
            sub_split = frame_field(
                cfg.seed, BEAM_SPLIT_SUBSTITUTE, j, cfg.modes, (1 - cfg.t_split) * source2_mean
            )
            beam3 = substitute_modes(beam3, cfg.eta, sub_split)
            sub_mix = frame_field(cfg.seed, BEAM_MIX_SUBSTITUTE, j, cfg.modes, cfg.mean_photons)
            out1, out2 = mix_fields(beam1, beam2, cfg.tau_mix, cfg.eta, sub_mix)
            assert batch.in_series(0)[j] == detect(beam1)
            assert batch.in_series(1)[j] == detect(beam2)
            assert batch.in_series(2)[j] == detect(beam3)
            assert batch.out_series(0)[j] == pytest.approx(detect(out1), rel=1e-12)
            assert batch.out_series(1)[j] == pytest.approx(detect(out2), rel=1e-12)

    def test_energy_conservation_per_frame(self):
        batch = run_bench(BenchConfig(modes=40, frames=2000, seed=5, tau_mix=0.31))
        before = batch.in_series(0) + batch.in_series(1)
        after = batch.out_series(0) + batch.out_series(1)
        assert np.allclose(after, before, rtol=1e-9)

    def test_correlation_invariant_under_doubling_modes(self):
        n = 2 * 10**4
        c_values = []
        for modes in (100, 200):
            batch = run_bench(BenchConfig(modes=modes, frames=n, seed=31))
            c_values.append(corr_coeff(batch.out_series(0), batch.out_series(2)))
        se = (1.0 - 0.5**2) / math.sqrt(n - 3)
        assert abs(c_values[0] - c_values[1]) <= 3.0 * math.sqrt(2.0) * se

    def test_interference_marginals_unchanged_by_mixing(self):
        n = 3 * 10**4
        batch = run_bench(BenchConfig(modes=100, frames=n, seed=17))
        for beam in (0, 1):
            i_in = batch.in_series(beam)
            i_out = batch.out_series(beam)
            se_mean = float(np.std(i_in)) / math.sqrt(n)
            assert abs(float(np.mean(i_out)) - float(np.mean(i_in))) <= 3.0 * se_mean
            assert float(np.var(i_out)) == pytest.approx(float(np.var(i_in)), rel=0.1)

    def test_eta_sets_the_in_correlation_ceiling(self):
        batch = run_bench(BenchConfig(modes=100, frames=2 * 10**4, seed=23, eta=0.97))
        c23_in = corr_coeff(batch.in_series(1), batch.in_series(2))
        assert c23_in == pytest.approx(0.97, abs=0.02)

    def test_erasure_without_polarizers_outputs_identical(self):
        batch = run_bench(
            BenchConfig(modes=50, frames=5000, seed=3, scenario="erasure", analysis_basis="none")
        )
        c12 = corr_coeff(batch.out_series(0), batch.out_series(1))
        assert c12 >= 0.9999  # identical total intensities at tau = 1/2
        c12_in = corr_coeff(batch.in_series(0), batch.in_series(1))
        assert abs(c12_in) <= 0.05

    def test_erasure_deg45_restores_transfer_pattern(self):
        batch = run_bench(
            BenchConfig(
                modes=100, frames=3 * 10**4, seed=13, scenario="erasure", analysis_basis="deg45"
            )
        )
        c12 = corr_coeff(batch.out_series(0), batch.out_series(1))
        c13 = corr_coeff(batch.out_series(0), batch.out_series(2))
        c23 = corr_coeff(batch.out_series(1), batch.out_series(2))
        assert abs(c12) <= 0.02
        assert c13 == pytest.approx(0.5, abs=0.02)
        assert c23 == pytest.approx(0.5, abs=0.02)

    def test_erasure_v_basis_model_pattern(self):
        batch = run_bench(
            BenchConfig(modes=60, frames=5000, seed=19, scenario="erasure", analysis_basis="V")
        )
        for i, j in ((0, 1), (0, 2), (1, 2)):
            assert corr_coeff(batch.out_series(i), batch.out_series(j)) >= 0.99

    def test_config_validation(self):
        with pytest.raises(ValueError):
            BenchConfig(modes=0)
        with pytest.raises(ValueError):
            BenchConfig(t_split=0.0)
        with pytest.raises(ValueError):
            BenchConfig(scenario="lab")
        with pytest.raises(ValueError):
            BenchConfig(analysis_basis="circular")
        with pytest.raises(ValueError):
            BenchConfig(eta=1.5)

    def test_batch_shapes_and_nonnegativity(self):
        batch = run_bench(BenchConfig(modes=5, frames=300, seed=1))
        assert batch.n_frames == 300
        assert batch.intensities_in.shape == (300, 3)
        assert np.all(batch.intensities_in >= 0.0)
        assert np.all(batch.intensities_out >= 0.0)
