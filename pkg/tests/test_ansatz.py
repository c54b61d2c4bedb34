"""Circuit construction, parameter layout, evaluation, and gradients."""

import numpy as np
import pytest

from dualvqe import ansatz as anz
from dualvqe.statevector import (
    ConfigurationError,
    StateVector,
    ValidationError,
    rotation_gate,
    zero_state,
    zz_signs,
)


def random_target(n, seed):
    rng = np.random.default_rng(seed)
    amps = rng.standard_normal(1 << n) + 1j * rng.standard_normal(1 << n)
    return StateVector(n, amps / np.linalg.norm(amps))


def brute_force_evaluate(spec, params):
    """Gate-by-gate dense-matrix oracle following the parameter layout."""
    n = spec.num_qubits
    psi = np.zeros(1 << n, dtype=complex)
    psi[0] = 1.0
    layout = anz.parameter_layout(spec)
    eye = np.eye(2, dtype=complex)
    for i, label in enumerate(layout.labels):
        if label[0] == "rot":
            _, _, _, _, axis, q = label
            gate = rotation_gate(axis, params[i]).matrix
            mat = np.array([[1.0]], dtype=complex)
            for k in range(n - 1, -1, -1):
                mat = np.kron(mat, gate if k == q else eye)
            psi = mat @ psi
        else:
            if label[0] == "ent":
                _, _, _, _, a, b = label
            else:
                a, b = spec.remote_pairs[label[1] - 1]
            phi = params[i]
            signs = zz_signs(n, a, b)
            psi = (np.cos(phi / 2) + 1j * np.sin(phi / 2) * signs) * psi
    return psi


def finite_difference(spec, params, target, step=1e-5):
    circuit = anz.compile_ansatz(spec)
    grad = np.empty_like(params)
    for i in range(len(params)):
        params[i] += step
        fp = float(circuit.fidelity(params, target.amplitudes))
        params[i] -= 2 * step
        fm = float(circuit.fidelity(params, target.amplitudes))
        params[i] += step
        grad[i] = (fp - fm) / (2 * step)
    return grad


class TestBuilders:
    def test_dual_core_counts(self):
        spec = anz.build_dual_core(12, 3, 3)
        assert anz.param_count(spec) == 651  # 24 layers x 27 + 3 remote
        total_layers = sum(spec.layers_in_stage(s) for s in range(4))
        assert total_layers == 12  # per module
        assert len(spec.remote_pairs) == 3

    def test_zero_interconnect_is_separable(self):
        spec = anz.build_dual_core(12, 0, 3)
        assert spec.architecture == "separable"
        assert spec.remote_pairs == ()

    def test_separable_with_stacked_blocks(self):
        assert anz.param_count(anz.build_dual_core(12, 0, 12)) == 648

    def test_all_to_all_counts(self):
        assert anz.param_count(anz.build_all_to_all(12, 7)) == 630
        assert anz.param_count(anz.build_all_to_all(2, 1)) == 5

    def test_extra_layer_counts(self):
        base = anz.build_dual_core(10, 3, 3)
        extra = anz.build_dual_core(10, 3, 3, extra_layer_after_last_remote=True)
        per_layer = anz.DEFAULT_TEMPLATE.params_per_layer(5)
        assert anz.param_count(extra) - anz.param_count(base) == 2 * per_layer

    def test_odd_qubits_rejected(self):
        with pytest.raises(ConfigurationError):
            anz.build_dual_core(5, 1, 2)

    def test_remote_pair_must_straddle(self):
        with pytest.raises(ConfigurationError):
            anz.build_dual_core(8, 1, 2, remote_pairs=((0, 1),))

    def test_template_counts(self):
        tpl = anz.LayerTemplate(rotation_axes=("x", "y", "z"), entangler="chain")
        assert tpl.params_per_layer(6) == 3 * 6 + 5


class TestLayout:
    def test_bijection(self):
        spec = anz.build_dual_core(8, 2, 2)
        layout = anz.parameter_layout(spec)
        assert len(set(layout.labels)) == len(layout) == anz.param_count(spec)
        for i, lab in enumerate(layout.labels):
            assert layout.index_of(lab) == i

    def test_stage_major_prefixes(self):
        spec = anz.build_dual_core(12, 3, 3)
        layout = anz.parameter_layout(spec)
        for stage in range(4):
            prefix = anz.stage_prefix(spec, stage)
            assert anz.param_count(prefix) == layout.prefix_count(stage)
        stages = [lab[1] for lab in layout.labels]
        assert stages == sorted(stages)

    def test_stage_param_increment(self):
        spec = anz.build_dual_core(12, 3, 3)
        per_layer = anz.DEFAULT_TEMPLATE.params_per_layer(6)
        counts = [anz.param_count(anz.stage_prefix(spec, s)) for s in range(4)]
        for a, b in zip(counts, counts[1:]):
            assert b - a == 1 + 2 * 3 * per_layer  # remote + 2 blocks x m layers


class TestStagePrefix:
    def test_stage_zero_has_no_remotes(self):
        spec = anz.build_dual_core(12, 3, 3)
        p0 = anz.stage_prefix(spec, 0)
        assert p0.architecture == "separable"
        assert p0.remote_pairs == ()
        assert anz.param_count(p0) == 162

    def test_full_stage_is_identity(self):
        spec = anz.build_dual_core(12, 3, 3, extra_layer_after_last_remote=True)
        assert anz.stage_prefix(spec, 3) is spec

    def test_out_of_range(self):
        spec = anz.build_dual_core(8, 2, 2)
        with pytest.raises(ValidationError):
            anz.stage_prefix(spec, 3)

    def test_prefix_consistency_with_zeroed_tail(self):
        # prefix evaluation == full evaluation with later parameters zeroed
        spec = anz.build_dual_core(8, 2, 2)
        rng = np.random.default_rng(0)
        full = np.zeros(anz.param_count(spec))
        for stage in range(3):
            prefix = anz.stage_prefix(spec, stage)
            k = anz.param_count(prefix)
            params = rng.uniform(-np.pi, np.pi, k)
            full[:] = 0.0
            full[:k] = params
            a = anz.evaluate(prefix, params).amplitudes
            b = anz.evaluate(spec, full).amplitudes
            np.testing.assert_allclose(a, b, atol=1e-10)


class TestEvaluate:
    def test_zero_parameters_give_polarized_state(self):
        for spec in (anz.build_dual_core(6, 2, 2), anz.build_all_to_all(6, 3)):
            psi = anz.evaluate(spec, np.zeros(anz.param_count(spec)))
            assert psi.amplitudes[0] == pytest.approx(1.0, abs=1e-14)
            assert abs(psi.norm() - 1.0) < 1e-10

    def test_separable_output_is_product(self):
        from dualvqe.schmidt import schmidt_rank

        spec = anz.build_dual_core(8, 0, 3)
        rng = np.random.default_rng(1)
        psi = anz.evaluate(spec, rng.uniform(-np.pi, np.pi, anz.param_count(spec)))
        assert schmidt_rank(psi, 4, 1e-10) == 1

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_matches_brute_force(self, seed):
        spec = anz.build_dual_core(4, 1, 2)
        rng = np.random.default_rng(seed)
        params = rng.uniform(-np.pi, np.pi, anz.param_count(spec))
        np.testing.assert_allclose(
            anz.evaluate(spec, params).amplitudes,
            brute_force_evaluate(spec, params),
            atol=1e-12,
        )

    def test_all_to_all_matches_brute_force(self):
        spec = anz.build_all_to_all(4, 2)
        rng = np.random.default_rng(3)
        params = rng.uniform(-np.pi, np.pi, anz.param_count(spec))
        np.testing.assert_allclose(
            anz.evaluate(spec, params).amplitudes,
            brute_force_evaluate(spec, params),
            atol=1e-12,
        )

    def test_mixed_axis_template_matches_brute_force(self):
        tpl = anz.LayerTemplate(rotation_axes=("z", "x", "y"), entangler="chain")
        spec = anz.build_dual_core(4, 1, 2, layer_template=tpl)
        rng = np.random.default_rng(4)
        params = rng.uniform(-np.pi, np.pi, anz.param_count(spec))
        np.testing.assert_allclose(
            anz.evaluate(spec, params).amplitudes,
            brute_force_evaluate(spec, params),
            atol=1e-12,
        )

    def test_deterministic(self):
        spec = anz.build_dual_core(8, 2, 2)
        rng = np.random.default_rng(5)
        params = rng.uniform(-np.pi, np.pi, anz.param_count(spec))
        a = anz.evaluate(spec, params).amplitudes
        b = anz.evaluate(spec, params).amplitudes
        np.testing.assert_array_equal(a, b)

    def test_wrong_length_rejected(self):
        spec = anz.build_dual_core(4, 1, 1)
        with pytest.raises(ValueError):
            anz.evaluate(spec, np.zeros(3))


class TestGradient:
    def test_single_ry_closed_form(self):
        # one Ry per qubit, no entanglers; F(theta) = sin^2(theta0/2) at
        # target |01>, so dF/dtheta0 = sin(theta0)/2 = 1/2 at pi/2
        tpl = anz.LayerTemplate(rotation_axes=("y",), entangler="none")
        spec = anz.build_dual_core(2, 0, 1, layer_template=tpl)
        target = StateVector(2, np.array([0, 1, 0, 0], dtype=complex))
        grad = anz.fidelity_gradient(spec, np.array([np.pi / 2, 0.0]), target)
        assert grad[0] == pytest.approx(0.5, abs=1e-12)
        assert grad[1] == pytest.approx(0.0, abs=1e-12)

    def test_stationary_at_reached_target(self):
        spec = anz.build_dual_core(6, 1, 2)
        rng = np.random.default_rng(6)
        params = rng.uniform(-np.pi, np.pi, anz.param_count(spec))
        target = anz.evaluate(spec, params)
        grad = anz.fidelity_gradient(spec, params, target)
        assert np.linalg.norm(grad) < 1e-8

    @pytest.mark.parametrize(
        "builder,n",
        [
            (lambda n: anz.build_dual_core(n, 2, 2), 4),
            (lambda n: anz.build_dual_core(n, 3, 2), 8),
            (lambda n: anz.build_dual_core(n, 0, 3), 4),
            (lambda n: anz.build_dual_core(n, 0, 3), 8),
            (lambda n: anz.build_all_to_all(n, 2), 4),
            (lambda n: anz.build_all_to_all(n, 2), 8),
        ],
    )
    def test_matches_finite_differences(self, builder, n):
        spec = builder(n)
        for seed in range(5):
            rng = np.random.default_rng(seed)
            params = rng.uniform(-np.pi, np.pi, anz.param_count(spec))
            target = random_target(n, seed + 100)
            grad = anz.fidelity_gradient(spec, params, target)
            fd = finite_difference(spec, params, target)
            err = np.abs(grad - fd)
            rel = err / np.maximum(1e-30, np.abs(fd))
            assert np.all((err < 1e-6) | (rel < 1e-4))

    def test_size_mismatch(self):
        spec = anz.build_dual_core(4, 1, 1)
        with pytest.raises(ValidationError):
            anz.fidelity_gradient(
                spec, np.zeros(anz.param_count(spec)), random_target(6, 0)
            )


class TestParameterVector:
    def test_zeros_matches_layout(self):
        spec = anz.build_dual_core(6, 1, 2)
        pv = anz.ParameterVector.zeros(spec)
        assert pv.values.shape == (anz.param_count(spec),)

    def test_length_checked(self):
        spec = anz.build_dual_core(6, 1, 2)
        layout = anz.parameter_layout(spec)
        with pytest.raises(ValidationError):
            anz.ParameterVector(np.zeros(3), layout)

    def test_accepted_by_evaluate(self):
        spec = anz.build_dual_core(6, 1, 2)
        psi = anz.evaluate(spec, anz.ParameterVector.zeros(spec))
        assert psi.amplitudes[0] == pytest.approx(1.0, abs=1e-14)
