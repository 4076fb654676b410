import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qvote import kernels
from qvote.errors import CapacityError, QubitIndexError, ValidationError
from qvote.qstate import (
    MINUS,
    ONE,
    PLUS,
    ZERO,
    DensityMatrix,
    MeasurementBasis,
    StateVector,
    apply_unitary,
    branches,
    equal_up_to_global_phase,
    fidelity_pure,
    is_unitary,
    measure,
    outcome_distribution,
    partial_trace,
    purity,
    random_state,
    relative_phase,
    tensor,
    to_density,
    trace_distance,
)

H = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]])


def haar_unitary(rng, dim):
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


class TestStateVector:
    def test_rejects_unnormalized(self):
        with pytest.raises(ValidationError):
            StateVector([1, 1])

    def test_normalize_flag(self):
        s = StateVector([1, 1], normalize=True)
        assert np.allclose(s.amplitudes, PLUS.amplitudes)

    @pytest.mark.parametrize("size", [0, 1, 3, 6])
    def test_rejects_non_power_of_two(self, size):
        with pytest.raises(ValidationError):
            StateVector(np.ones(size), normalize=True)

    def test_capacity_limit(self):
        StateVector(np.ones(64), normalize=True)
        with pytest.raises(CapacityError):
            StateVector(np.ones(128), normalize=True)

    def test_amplitudes_read_only(self):
        with pytest.raises(ValueError):
            ZERO.amplitudes[0] = 0

    def test_from_bits_is_big_endian(self):
        s = StateVector.from_bits("10")
        assert s.amplitudes[2] == 1
        assert s.num_qubits == 2

    def test_tensor_order(self):
        assert np.allclose(tensor(ONE, ZERO).amplitudes, StateVector.from_bits("10").amplitudes)

    def test_tensor_capacity(self):
        three = StateVector.from_bits("000")
        four = StateVector.from_bits("0000")
        with pytest.raises(CapacityError):
            tensor(three, four)


class TestUnitaries:
    def test_hadamard(self):
        assert equal_up_to_global_phase(apply_unitary(ZERO, H, [0]), PLUS)

    def test_cnot_makes_bell(self):
        s = apply_unitary(tensor(PLUS, ZERO), CNOT, [0, 1])
        assert np.allclose(s.amplitudes, np.array([1, 0, 0, 1]) / np.sqrt(2))

    def test_target_order_matters(self):
        s = apply_unitary(StateVector.from_bits("01"), CNOT, [1, 0])
        assert np.allclose(s.amplitudes, StateVector.from_bits("11").amplitudes)

    def test_rejects_non_unitary(self):
        with pytest.raises(ValidationError):
            apply_unitary(ZERO, [[1, 1], [0, 1]], [0])

    def test_rejects_wrong_shape(self):
        with pytest.raises(ValidationError):
            apply_unitary(ZERO, CNOT, [0])

    def test_rejects_bad_targets(self):
        s = StateVector.from_bits("00")
        with pytest.raises(QubitIndexError):
            apply_unitary(s, H, [2])
        with pytest.raises(ValidationError):
            apply_unitary(s, CNOT, [0, 0])
        with pytest.raises(ValidationError):
            apply_unitary(s, H, [])

    @settings(max_examples=60, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 6), k=st.integers(1, 2))
    def test_unitaries_preserve_norm(self, seed, n, k):
        rng = np.random.default_rng(seed)
        k = min(k, n)
        psi = random_state(rng, n)
        targets = [int(t) for t in rng.choice(n, size=k, replace=False)]
        out = apply_unitary(psi, haar_unitary(rng, 1 << k), targets)
        assert abs(np.linalg.norm(out.amplitudes) - 1) < 1e-12

    @settings(max_examples=40, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1))
    def test_haar_matrices_are_unitary(self, seed):
        assert is_unitary(haar_unitary(np.random.default_rng(seed), 4))


class TestBackends:
    @pytest.mark.skipif(len(kernels.BACKENDS) < 2, reason="compiled kernels not built")
    @settings(max_examples=60, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 6), k=st.integers(1, 3))
    def test_compiled_matches_numpy(self, seed, n, k):
        rng = np.random.default_rng(seed)
        k = min(k, n)
        psi = random_state(rng, n).amplitudes
        targets = [int(t) for t in rng.choice(n, size=k, replace=False)]
        u = haar_unitary(rng, 1 << k)
        a = kernels.apply_gate(psi, n, u, targets, backend="python")
        b = kernels.apply_gate(psi, n, u, targets, backend="cython")
        assert np.allclose(a, b, atol=1e-12)
        a = kernels.project_all(psi, n, u, targets, backend="python")
        b = kernels.project_all(psi, n, u, targets, backend="cython")
        assert np.allclose(a, b, atol=1e-12)

    def test_default_backend_is_registered(self):
        assert kernels.BACKEND in kernels.BACKENDS


class TestMeasurement:
    def test_basis_must_be_orthonormal(self):
        with pytest.raises(ValidationError):
            MeasurementBasis(MeasurementBasis.diagonal().name, [ZERO, PLUS], ["a", "b"])

    def test_labels_distinct(self):
        with pytest.raises(ValidationError):
            MeasurementBasis(MeasurementBasis.diagonal().name, [PLUS, MINUS], ["+", "+"])

    def test_distribution_sums_to_one(self, rng):
        psi = random_state(rng, 3)
        probs = [p for _, p in outcome_distribution(psi, MeasurementBasis.computational(2), [2, 0])]
        assert abs(sum(probs) - 1) < 1e-12

    def test_branch_residuals(self):
        bell = StateVector([1, 0, 0, 1], normalize=True)
        recs = branches(bell, MeasurementBasis.computational(1), [0])
        assert [r.label for r in recs] == ["0", "1"]
        assert np.allclose(recs[1].residual.amplitudes, ONE.amplitudes)
        assert np.allclose(recs[1].post_state.amplitudes, StateVector.from_bits("11").amplitudes)

    def test_zero_probability_outcome_has_no_state(self):
        recs = branches(ZERO, MeasurementBasis.computational(1), [0])
        assert recs[1].probability == 0 and recs[1].post_state is None

    def test_never_samples_impossible_outcome(self, rng):
        for _ in range(200):
            assert measure(ZERO, MeasurementBasis.computational(1), [0], rng).label == "0"

    def test_sampling_frequencies(self, rng):
        psi = StateVector([np.sqrt(0.2), np.sqrt(0.8)])
        hits = sum(measure(psi, MeasurementBasis.computational(1), [0], rng).label == "1" for _ in range(4000))
        assert abs(hits / 4000 - 0.8) < 4 * np.sqrt(0.16 / 4000)

    def test_seeded_measurement_is_reproducible(self):
        psi = random_state(np.random.default_rng(1), 4)
        basis = MeasurementBasis.computational(2)
        a = [measure(psi, basis, [1, 3], np.random.default_rng(5)).label for _ in range(5)]
        b = [measure(psi, basis, [1, 3], np.random.default_rng(5)).label for _ in range(5)]
        assert a == b


class TestPhases:
    def test_global_phase(self):
        assert equal_up_to_global_phase(PLUS, 1j * PLUS)
        assert not equal_up_to_global_phase(PLUS, MINUS)

    def test_relative_phase(self):
        assert np.isclose(relative_phase(MINUS, -MINUS), -1)


class TestDensity:
    def test_validation(self):
        with pytest.raises(ValidationError):
            DensityMatrix([[1, 1], [0, 0]])
        with pytest.raises(ValidationError):
            DensityMatrix([[0.5, 0], [0, 0.4]])
        with pytest.raises(ValidationError):
            DensityMatrix([[1.5, 0], [0, -0.5]])

    def test_partial_trace_of_bell_is_mixed(self):
        rho = partial_trace(to_density(StateVector([1, 0, 0, 1], normalize=True)), [1])
        assert np.allclose(rho.entries, np.eye(2) / 2)
        assert abs(purity(rho) - 0.5) < 1e-12

    def test_partial_trace_of_product(self, rng):
        a, b = random_state(rng, 1), random_state(rng, 2)
        rho = partial_trace(to_density(tensor(a, b)), [0])
        assert abs(fidelity_pure(rho, a) - 1) < 1e-12

    def test_partial_trace_keep_order_is_sorted(self, rng):
        a, b, c = (random_state(rng, 1) for _ in range(3))
        rho = partial_trace(to_density(tensor(tensor(a, b), c)), [2, 0])
        assert abs(fidelity_pure(rho, tensor(a, c)) - 1) < 1e-12

    def test_partial_trace_errors(self):
        rho = to_density(PLUS)
        with pytest.raises(ValidationError):
            partial_trace(rho, [])
        with pytest.raises(QubitIndexError):
            partial_trace(rho, [1])

    def test_trace_distance(self):
        assert abs(trace_distance(to_density(ZERO), to_density(ONE)) - 1) < 1e-12
        assert trace_distance(to_density(PLUS), to_density(PLUS)) < 1e-12
