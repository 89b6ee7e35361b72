import numpy as np
import pytest
from numpy.testing import assert_allclose

from src.quantum.assemblage import ModelKind, ValidationMode, realize, validate
from src.quantum.errors import DimensionError
from src.quantum.oracle import (
    StateKind,
    lhs_tightness_demo,
    pure_states,
    random_ensemble,
    random_state,
    sqi_tightness_demo,
    sweep_models,
)
from src.quantum.qmatrix import state_to_bloch

from conftest import SEED


class TestRandomStates:
    def test_haar_pure_qubit(self):
        rho = random_state(2, StateKind.HAAR_PURE, SEED)
        assert rho.purity == pytest.approx(1.0, abs=1e-10)
        assert state_to_bloch(rho).norm == pytest.approx(1.0, abs=1e-10)

    def test_ginibre_mixed(self):
        rho = random_state(4, StateKind.GINIBRE_MIXED, SEED, dims=(2, 2))
        values = np.linalg.eigvalsh(rho.mat)
        assert np.all(values >= -1e-12) and np.all(values <= 1 + 1e-12)
        assert np.sum(values) == pytest.approx(1.0)
        assert rho.purity < 1

    def test_deterministic_per_seed(self):
        assert_allclose(random_state(3, "ginibre_mixed", 11).mat, random_state(3, "ginibre_mixed", 11).mat)
        assert not np.allclose(random_state(3, "haar_pure", 11).mat, random_state(3, "haar_pure", 12).mat)

    def test_haar_average_is_mixed(self):
        states = pure_states(np.random.default_rng(SEED), 2, (10_000,))
        assert_allclose(states.mean(axis=0), np.eye(2) / 2, atol=0.02)


class TestEnsembles:
    @pytest.mark.parametrize("d", [2, 3])
    def test_lhs_samples_are_valid(self, d):
        for trial in range(50):
            ens = random_ensemble(ModelKind.LHS, d, d + 1, np.random.default_rng(SEED + trial))
            assert 1 <= ens.hidden_values <= 8
            assert validate(realize(ens, d + 1), ValidationMode.STRICT).ok

    def test_sqi_samples_are_valid(self):
        for trial in range(50):
            ens = random_ensemble(ModelKind.SQI1, 2, 3, np.random.default_rng(SEED + trial))
            assert ens.states.shape[1] == 2
            assert validate(realize(ens, 3), ValidationMode.SQI).ok

    def test_deterministic_responses(self, rng):
        ens = random_ensemble(ModelKind.LHS, 3, 4, rng, deterministic=True, pure=True)
        assert set(np.unique(ens.responses)) <= {0.0, 1.0}
        assert_allclose(np.einsum("nii->n", ens.states @ ens.states), 1.0)


class TestTightness:
    def test_product_state(self, measure):
        assert lhs_tightness_demo(measure).s_value == pytest.approx(4.0, abs=1e-9)

    def test_product_state_rotated_frame(self):
        assert lhs_tightness_demo(theta=np.pi / 7).s_value <= 4 + 1e-9

    def test_per_k_sqi_strategy(self, measure):
        demo = sqi_tightness_demo(measure)
        assert demo.s_value == pytest.approx(6.0, abs=1e-12)
        assert demo.per_k == pytest.approx([2.0, 2.0, 2.0], abs=1e-12)
        assert demo.lhs_forced == pytest.approx(4.0, abs=1e-12)


class TestSweeps:
    def test_lhs_ceiling(self):
        assert sweep_models(ModelKind.LHS, 2, 300, SEED).max_s <= 4 + 1e-9

    def test_sqi_ceiling(self):
        assert sweep_models(ModelKind.SQI1, 2, 300, SEED).max_s <= 6 + 1e-9

    def test_qutrit_lhs_ceiling(self):
        assert sweep_models(ModelKind.LHS, 3, 100, SEED).max_s <= 18 + 1e-9

    def test_injection_reaches_bounds(self):
        lhs = sweep_models(ModelKind.LHS, 2, 50, SEED, inject=True)
        sqi = sweep_models(ModelKind.SQI1, 2, 50, SEED, inject=True)
        assert lhs.max_s == pytest.approx(4.0, abs=1e-12)
        assert sqi.max_s == pytest.approx(6.0, abs=1e-12)
        assert lhs.argmax is None and sqi.argmax is None

    def test_injection_wins_ties(self):
        # seed 7 + 20 draws a deterministic pure-state model that already reaches 4
        lhs = sweep_models(ModelKind.LHS, 2, 50, SEED, inject=True)
        plain = sweep_models(ModelKind.LHS, 2, 50, SEED)
        assert plain.max_s == pytest.approx(4.0, abs=1e-9)
        assert lhs.argmax is None
        assert lhs.ensemble is not None and lhs.ensemble.hidden_values == 1

    def test_values_and_validation(self):
        summary = sweep_models(ModelKind.SQI1, 3, 20, SEED)
        assert summary.values.shape == (20,)
        assert summary.values[summary.argmax] == summary.max_s
        assert summary.invalid_trials == []
        assert summary.measure.normalized

    def test_reproducible(self):
        first = sweep_models(ModelKind.SQI1, 2, 40, 3)
        second = sweep_models(ModelKind.SQI1, 2, 40, 3)
        assert first.max_s == second.max_s
        assert first.argmax == second.argmax
        assert first.model_dump()["kind"] == ModelKind.SQI1

    def test_injection_needs_qubits(self):
        with pytest.raises(DimensionError):
            sweep_models(ModelKind.LHS, 3, 1, SEED, inject=True)

    def test_summary_json_omits_ensemble(self):
        data = sweep_models(ModelKind.LHS, 2, 5, SEED).model_dump(mode="json")
        assert set(data) == {"kind", "d", "trials", "seed", "max_s", "measure", "argmax", "invalid_trials"}
        assert data["kind"] == "lhs"
