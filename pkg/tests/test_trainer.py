"""Staged training protocol: targets, restarts, warm starts, metrics."""

import numpy as np
import pytest

from dualvqe import ansatz as anz
from dualvqe import trainer as trn
from dualvqe.hamiltonians import build_tfim, build_xyz, expectation, ground_state
from dualvqe.schmidt import discarded_weight, schmidt_decompose
from dualvqe.statevector import StateVector, ValidationError, fidelity, zero_state

FAST = trn.TrainingConfig(
    restarts=4, max_iterations=300, tolerance=1e-11, step_size=0.02, rng_seed=7
)


class TestEpsilon:
    def test_exact(self):
        assert trn.epsilon(-1.0, -1.0) == 0.0

    def test_one_percent(self):
        assert trn.epsilon(-0.99, -1.0) == pytest.approx(0.01, abs=1e-12)

    def test_tenth_percent(self):
        assert trn.epsilon(-10.989, -11.0) == pytest.approx(0.001, abs=1e-12)

    def test_zero_ground_energy(self):
        with pytest.raises(trn.UndefinedMeasureError):
            trn.epsilon(1.0, 0.0)


class TestStageTargets:
    def test_counts_and_ranks(self):
        gs = ground_state(build_tfim(8, 1, 0.9)).state
        targets = trn.stage_targets(gs, 4, 3)
        assert len(targets) == 4
        decomp = schmidt_decompose(gs, 4)
        for stage, t in enumerate(targets):
            d = min(1 << stage, decomp.rank)
            head = float(np.sum(decomp.values[:d] ** 2))
            assert fidelity(t, gs) == pytest.approx(head, abs=1e-10)

    def test_single_target_without_interconnect(self):
        gs = ground_state(build_tfim(6, 1, 0.5)).state
        targets = trn.stage_targets(gs, 3, 0)
        assert len(targets) == 1

    def test_product_ground_state(self):
        # rank-1 input: every stage target equals the state itself
        gs = zero_state(6)
        targets = trn.stage_targets(gs, 3, 3)
        for t in targets:
            assert fidelity(t, gs) == pytest.approx(1.0, abs=1e-12)


class TestTrainStage:
    def test_polarized_target_is_kept(self):
        # zero parameters are already optimal; the optimizer must not lose it
        spec = anz.build_dual_core(4, 0, 2)
        res = trn.train_stage(spec, zero_state(4), None, FAST)
        assert res.fidelity_to_stage_target >= 1.0 - 1e-8
        assert res.restart_index_selected == 0

    def test_stage0_reaches_rank_one_optimum(self):
        h = build_tfim(4, 1, 1)
        gs = ground_state(h)
        decomp = schmidt_decompose(gs.state, 2)
        target = trn.stage_targets(gs.state, 2, 0)[0]
        cfg = trn.TrainingConfig(
            restarts=6, max_iterations=500, tolerance=1e-12, step_size=0.02,
            rng_seed=3,
        )
        res = trn.train_stage(anz.build_dual_core(4, 0, 3), target, None, cfg)
        assert res.fidelity_to_stage_target >= 1.0 - 1e-4

    def test_stage1_expresses_rank_two_target(self):
        # a Bell-like 2+2 target is exactly one remote ZZ plus locals away
        amps = np.zeros(16, dtype=complex)
        amps[0b0000] = 2**-0.5
        amps[0b1111] = 2**-0.5
        target = StateVector(4, amps)
        spec = anz.build_dual_core(4, 1, 2)
        cfg = trn.TrainingConfig(
            restarts=6, max_iterations=600, tolerance=1e-12, step_size=0.05,
            rng_seed=5,
        )
        res = trn.train_stage(spec, target, None, cfg)
        assert res.fidelity_to_stage_target > 0.999

    def test_warm_start_preserved_by_restart_zero(self):
        h = build_tfim(6, 1, 0.7)
        gs = ground_state(h)
        targets = trn.stage_targets(gs.state, 3, 1)
        spec = anz.build_dual_core(6, 1, 2)
        s0 = trn.train_stage(anz.stage_prefix(spec, 0), targets[0], None, FAST)
        frozen = trn.TrainingConfig(
            restarts=1, max_iterations=1, tolerance=1e-11, rng_seed=7
        )
        s1 = trn.train_stage(
            spec, targets[1], s0.optimized_params, frozen, stage=1
        )
        warm = s0.optimized_params.values
        got = s1.optimized_params.values[: len(warm)]
        # restart 0 starts exactly at (warm, 0); one iteration cannot lose
        # more than a step of fidelity, and best-iterate keeps the start
        psi_warm = anz.evaluate(anz.stage_prefix(spec, 0), warm)
        f_warm = fidelity(psi_warm, targets[1])
        assert s1.fidelity_to_stage_target >= f_warm - 1e-12

    def test_deterministic_across_batch_sizes(self):
        h = build_tfim(4, 1, 0.8)
        gs = ground_state(h)
        target = trn.stage_targets(gs.state, 2, 0)[0]
        spec = anz.build_dual_core(4, 0, 2)
        results = []
        for batch in (1, 3, 8):
            cfg = trn.TrainingConfig(
                restarts=5, max_iterations=120, tolerance=1e-11,
                rng_seed=11, batch_size=batch,
            )
            results.append(trn.train_stage(spec, target, None, cfg))
        base = results[0]
        for other in results[1:]:
            assert other.restart_index_selected == base.restart_index_selected
            np.testing.assert_array_equal(
                other.optimized_params.values, base.optimized_params.values
            )

    def test_size_mismatch(self):
        with pytest.raises(ValidationError):
            trn.train_stage(anz.build_dual_core(4, 0, 1), zero_state(6), None, FAST)


class TestTrainFull:
    @pytest.fixture(scope="class")
    def tfim6_result(self):
        h = build_tfim(6, 1, 0.7)
        spec = anz.build_dual_core(6, 2, 2)
        cfg = trn.TrainingConfig(
            restarts=4, max_iterations=400, tolerance=1e-11, step_size=0.02,
            rng_seed=13,
        )
        return h, spec, cfg, trn.train_full(h, spec, cfg)

    def test_stage_metadata(self, tfim6_result):
        _, _, _, res = tfim6_result
        assert [s.stage for s in res.stages] == [0, 1, 2]
        assert [s.d_target for s in res.stages] == [1, 2, 4]

    def test_monotone_stage_improvement(self, tfim6_result):
        h, spec, _, res = tfim6_result
        gs = ground_state(h)
        fids = []
        for stage in res.stages:
            prefix = anz.stage_prefix(spec, stage.stage)
            psi = anz.evaluate(prefix, stage.optimized_params)
            fids.append(fidelity(psi, gs.state))
        for a, b in zip(fids, fids[1:]):
            assert b >= a - 1e-9

    def test_infidelity_bounded_by_discarded_weight(self, tfim6_result):
        _, _, _, res = tfim6_result
        assert res.infidelity_to_exact_gs >= res.discarded_weight_at_d - 1e-9

    def test_energy_consistency(self, tfim6_result):
        h, spec, _, res = tfim6_result
        psi = anz.evaluate(spec, res.final_params)
        assert res.e_var == pytest.approx(expectation(h, psi), abs=1e-10)
        assert res.e_var >= res.e_gs - 1e-9
        assert res.epsilon == pytest.approx(
            abs(res.e_var / res.e_gs - 1.0), abs=1e-12
        )

    def test_deterministic_end_to_end(self):
        h = build_xyz(4, 1, 0.5, -0.5, 0.3)
        spec = anz.build_dual_core(4, 1, 2)
        cfg = trn.TrainingConfig(
            restarts=3, max_iterations=150, tolerance=1e-11, rng_seed=17
        )
        a = trn.train_full(h, spec, cfg)
        b = trn.train_full(h, spec, cfg)
        np.testing.assert_array_equal(
            a.final_state.amplitudes, b.final_state.amplitudes
        )
        assert a.e_var == b.e_var
        assert a.infidelity_to_exact_gs == b.infidelity_to_exact_gs

    def test_degenerate_ground_state_warns(self):
        h = build_tfim(4, 1, 0)
        cfg = trn.TrainingConfig(
            restarts=2, max_iterations=60, tolerance=1e-11, rng_seed=19
        )
        res = trn.train_full(h, anz.build_dual_core(4, 1, 1), cfg)
        assert any("degenerate" in w for w in res.warnings)

    def test_qubit_mismatch(self):
        with pytest.raises(ValidationError):
            trn.train_full(build_tfim(4, 1, 1), anz.build_dual_core(6, 1, 1), FAST)


class TestAllToAllSweep:
    def test_layerwise_warm_start_improves(self):
        h = build_tfim(4, 1, 1)
        cfg = trn.TrainingConfig(
            restarts=3, max_iterations=250, tolerance=1e-11, step_size=0.05,
            rng_seed=23,
        )
        results = trn.train_all_to_all_sweep(h, 3, cfg)
        assert len(results) == 3
        fids = [r.fidelity_to_stage_target for _, r in results]
        for a, b in zip(fids, fids[1:]):
            assert b >= a - 1e-9
        assert fids[-1] > 0.999
