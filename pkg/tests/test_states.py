"""Tests for the covariance-matrix engine."""

import math

import numpy as np
import pytest

from cvbench.states import (
    GaussianState,
    PhysicalityError,
    SingleModeSpec,
    SymplecticError,
    SymplecticOp,
    apply_symplectic,
    mode_block,
    omega,
    partial_trace,
    single_mode_cm,
    single_mode_state,
    symplectic_eigenvalues,
    tensor,
    thermal_state,
    vacuum_state,
)
from helpers import random_single_mode_cm, random_symplectic


def balanced_bs_4x4():
    # explicit matrix, written out so these tests do not depend on the network module
    h = 1.0 / math.sqrt(2.0)
    eye = np.eye(2)
    return np.block([[h * eye, h * eye], [-h * eye, h * eye]])


class TestSingleModeSpec:
    def test_vacuum_regardless_of_beta(self):
        assert np.allclose(single_mode_cm(SingleModeSpec(0.0, 0.7)), np.diag([0.5, 0.5]))

    def test_thermal(self):
        assert np.allclose(single_mode_cm(SingleModeSpec(1.0, 0.0)), np.diag([1.5, 1.5]))

    def test_squeezed_vacuum(self):
        cm = single_mode_cm(SingleModeSpec(1.0, 1.0))
        assert np.allclose(np.diag(cm), [1.5 + math.sqrt(2.0), 1.5 - math.sqrt(2.0)])
        assert abs(np.linalg.det(cm) - 0.25) < 1e-12  # pure state

    def test_purity_identity_random(self):
        rng = np.random.default_rng(11)
        for _ in range(500):
            spec = SingleModeSpec(rng.uniform(0.0, 10.0), rng.uniform(0.0, 1.0))
            expected = (0.5 + (1.0 - spec.beta) * spec.n_tot) ** 2
            assert abs(np.linalg.det(single_mode_cm(spec)) - expected) <= 1e-10 * max(1.0, expected)

    def test_invalid_parameters(self):
        with pytest.raises(ValueError):
            SingleModeSpec(-0.1, 0.0)
        with pytest.raises(ValueError):
            SingleModeSpec(1.0, 1.2)
        with pytest.raises(ValueError):
            SingleModeSpec(float("nan"), 0.0)

    def test_derived_quantities(self):
        spec = SingleModeSpec(2.0, 0.25)
        assert spec.n_thermal == pytest.approx(1.5)
        cm = single_mode_cm(spec)
        assert spec.squeezing == pytest.approx(0.25 * math.log(cm[0, 0] / cm[1, 1]))


class TestGaussianState:
    def test_vacuum(self):
        assert np.allclose(vacuum_state().cm, np.diag([0.5, 0.5]))
        assert np.allclose(vacuum_state(2).cm, np.diag([0.5] * 4))

    def test_rejects_below_vacuum(self):
        with pytest.raises(PhysicalityError):
            GaussianState(np.diag([0.5 - 1e-6, 0.5 - 1e-6]))

    def test_accepts_tiny_undershoot(self):
        GaussianState(np.diag([0.5 - 1e-10, 0.5 - 1e-10]))

    def test_rejects_asymmetry(self):
        cm = np.diag([1.0, 1.0])
        cm[0, 1] = 1e-6
        with pytest.raises(PhysicalityError):
            GaussianState(cm)

    def test_rejects_bad_shape(self):
        with pytest.raises(ValueError):
            GaussianState(np.eye(3))

    def test_immutable(self):
        state = thermal_state(1.0)
        with pytest.raises(ValueError):
            state.cm[0, 0] = 99.0


class TestTensorAndPartialTrace:
    def test_tensor_vacua(self):
        assert np.allclose(tensor([vacuum_state(), vacuum_state()]).cm, np.diag([0.5] * 4))

    def test_tensor_thermal_pair(self):
        sigma = single_mode_cm(SingleModeSpec(1.0, 0.0))
        prod = tensor([single_mode_state(SingleModeSpec(1.0)), single_mode_state(SingleModeSpec(1.0))])
        assert np.allclose(prod.cm[:2, :2], sigma)
        assert np.allclose(prod.cm[2:, 2:], sigma)
        assert np.allclose(prod.cm[:2, 2:], 0.0)

    def test_tensor_three_modes(self):
        state = tensor([vacuum_state(), thermal_state(1.0), thermal_state(2.0)])
        assert state.n_modes == 3
        assert state.cm.shape == (6, 6)

    def test_partial_trace_product(self):
        a = thermal_state(2.0)
        b = single_mode_state(SingleModeSpec(1.0, 0.5))
        prod = tensor([a, b])
        assert np.array_equal(partial_trace(prod, {0}).cm, a.cm)
        assert np.array_equal(partial_trace(prod, {1}).cm, b.cm)

    def test_partial_trace_split_thermal(self):
        # explicit 4x4 congruence: thermal(2) and vacuum through a balanced BS
        source = np.diag([2.5, 2.5, 0.5, 0.5])
        s = balanced_bs_4x4()
        mixed = GaussianState(s @ source @ s.T)
        reduced = partial_trace(mixed, {0})
        assert np.allclose(reduced.cm, np.diag([1.5, 1.5]), atol=1e-12)

    def test_partial_trace_keep_all(self):
        state = tensor([thermal_state(1.0), vacuum_state()])
        assert np.array_equal(partial_trace(state, {0, 1}).cm, state.cm)

    def test_partial_trace_errors(self):
        state = vacuum_state(2)
        with pytest.raises(ValueError):
            partial_trace(state, set())
        with pytest.raises(IndexError):
            partial_trace(state, {2})


class TestSymplecticSpectrum:
    def test_vacuum(self):
        assert np.allclose(symplectic_eigenvalues(vacuum_state()), [0.5])

    def test_thermal_is_sqrt_det(self):
        state = thermal_state(1.0)
        expected = math.sqrt(np.linalg.det(state.cm))
        assert symplectic_eigenvalues(state)[0] == pytest.approx(expected, abs=1e-12)
        assert symplectic_eigenvalues(state)[0] == pytest.approx(1.5, abs=1e-12)

    def test_squeezed_vacuum_is_pure(self):
        state = single_mode_state(SingleModeSpec(1.0, 1.0))
        assert symplectic_eigenvalues(state)[0] == pytest.approx(0.5, abs=1e-12)

    def test_sorted_ascending(self):
        state = tensor([thermal_state(3.0), vacuum_state(), thermal_state(1.0)])
        d = symplectic_eigenvalues(state)
        assert np.allclose(d, [0.5, 1.5, 3.5])


class TestSymplecticOp:
    def test_rejects_non_symplectic(self):
        with pytest.raises(SymplecticError):
            SymplecticOp(np.diag([2.0, 2.0]))

    def test_accepts_squeezer(self):
        op = SymplecticOp(np.diag([2.0, 0.5]))
        assert op.n_modes == 1

    def test_identity_leaves_state(self):
        state = thermal_state(2.0)
        out = apply_symplectic(state, SymplecticOp(np.eye(2)))
        assert np.array_equal(out.cm, state.cm)

    def test_balanced_bs_on_identical_inputs(self):
        sigma = single_mode_cm(SingleModeSpec(1.0, 0.0))
        pair = tensor([GaussianState(sigma), GaussianState(sigma)])
        out = apply_symplectic(pair, SymplecticOp(balanced_bs_4x4()))
        assert np.allclose(out.cm, pair.cm, atol=1e-12)

    def test_balanced_bs_vacuum_thermal(self):
        pair = tensor([vacuum_state(), thermal_state(1.0)])
        out = apply_symplectic(pair, SymplecticOp(balanced_bs_4x4()))
        assert np.allclose(mode_block(out, 0, 0), np.diag([1.0, 1.0]), atol=1e-12)
        assert np.allclose(mode_block(out, 1, 1), np.diag([1.0, 1.0]), atol=1e-12)
        assert np.allclose(np.abs(mode_block(out, 0, 1)), 0.5 * np.eye(2), atol=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            apply_symplectic(vacuum_state(1), SymplecticOp(balanced_bs_4x4()))

    def test_congruence_preserves_spectrum_and_det(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            state = tensor([GaussianState(random_single_mode_cm(rng)) for _ in range(2)])
            op = SymplecticOp(random_symplectic(rng, 2))
            out = apply_symplectic(state, op)
            assert np.allclose(
                symplectic_eigenvalues(out), symplectic_eigenvalues(state), atol=1e-9
            )
            assert np.linalg.det(out.cm) == pytest.approx(np.linalg.det(state.cm), rel=1e-10)


def test_omega_structure():
    w = omega(2)
    assert np.array_equal(w[:2, :2], [[0, 1], [-1, 0]])
    assert np.array_equal(w, -w.T)
    assert np.array_equal(w[:2, 2:], np.zeros((2, 2)))
