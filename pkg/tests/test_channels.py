import time

import numpy as np
import pytest

from scramble.accessible import (ClassicalChannel, ClassicalQuantumEnsemble, EncodingBasis, InducedChannel,
                                 ProjectiveMeasurement, apply_channel, blahut_arimoto, dephase, givens_parameters,
                                 givens_unitary, joint_distribution, z_channel_capacity)
from scramble.errors import DimensionError, MeasurementError, PartitionError, ValidationError
from scramble.measures import classical_mi, random_density_matrix, random_unitary
from scramble.states import get_example
from scramble.tensor import DensityMatrix, Isometry, Ket, SubsystemLayout, maximally_entangled_state, projector

Z_CAPACITY = np.log2(1 + 2 / (3 * np.sqrt(3)))
A = SubsystemLayout.of(("A", 2))
PLUS = Ket(np.array([1, 1]) / np.sqrt(2), A)


# -- encodings and measurements ------------------------------------------------

def test_encoding_kets_orthonormal():
    for theta, phi in ((0, 0), (np.pi / 2, 0), (np.pi / 2, 5 * np.pi / 6), (1.1, 2.9)):
        k = EncodingBasis(theta, phi).register_kets()
        assert np.abs(k.conj().T @ k - np.eye(2)).max() < 1e-12


def test_encoding_input_kets_are_conjugates():
    e = EncodingBasis(np.pi / 2, np.pi / 3)
    assert np.abs(e.input_kets() - e.register_kets().conj()).max() < 1e-15
    assert np.abs(EncodingBasis.plus_minus().input_kets()[:, 0] - PLUS.amplitudes).max() < 1e-15


def test_encoding_canonical_representative():
    # the antipode of (π/2, 0) is (π/2, π): same basis with the labels swapped
    basis, swapped = EncodingBasis(np.pi / 2, np.pi).canonical()
    assert (basis.theta, basis.phi) == (round(np.pi / 2, 12), 0.0) and swapped
    # the antipode (π/4, π + 0.2) leaves the φ range, so the basis is kept as given
    basis, swapped = EncodingBasis(3 * np.pi / 4, 0.2).canonical()
    assert abs(basis.theta - 3 * np.pi / 4) < 1e-12 and abs(basis.phi - 0.2) < 1e-12 and not swapped
    for theta, phi in ((0.3, 2.0), (2.5, 0.1), (np.pi, 0.7)):
        basis, _ = EncodingBasis(theta, phi).canonical()
        assert 0 <= basis.theta <= np.pi and 0 <= basis.phi <= np.pi
        # same projectors up to ordering
        p = np.abs(basis.register_kets().conj().T @ EncodingBasis(theta, phi).register_kets()) ** 2
        assert abs(p.max(axis=0) - 1).max() < 1e-9


def test_givens_round_trip(rng):
    for d in (2, 3, 4):
        u = random_unitary(d, rng)
        v = givens_unitary(givens_parameters(u), d)
        overlaps = np.abs(np.einsum("si,si->i", v.conj(), u))
        assert np.abs(overlaps - 1).max() < 1e-9
    assert len(givens_parameters(np.eye(4))) == 12


def test_givens_qubit_is_bloch():
    u = givens_unitary([np.pi / 2, 5 * np.pi / 6], 2)
    assert np.abs(u[:, 0] - EncodingBasis(np.pi / 2, 5 * np.pi / 6).register_kets()[:, 0]).max() < 1e-15


def test_measurement_validation():
    lay = SubsystemLayout.of(("1", 2))
    with pytest.raises(MeasurementError):
        ProjectiveMeasurement(np.eye(2)[:, :1], lay)
    with pytest.raises(MeasurementError):
        ProjectiveMeasurement(np.array([[1, 1], [0, 1.0]]), lay)
    with pytest.raises(MeasurementError):
        ProjectiveMeasurement(np.eye(3), lay)
    m = ProjectiveMeasurement.bloch(np.pi / 2, 0, "1")
    assert np.abs(m.projectors().sum(0) - np.eye(2)).max() < 1e-12


# -- induced channels ----------------------------------------------------------

def test_w3_channel_on_plus():
    ch = InducedChannel(get_example("W3").generator, ("1",))
    assert np.abs(apply_channel(ch, PLUS).matrix - np.diag([1 / 3, 2 / 3])).max() < 1e-12


def test_neg_channel_keeps_maximally_mixed_qubit():
    ch = InducedChannel(get_example("neg").generator, ("3",))
    assert np.abs(apply_channel(ch, Ket.basis(A, "0")).matrix - np.eye(2) / 2).max() < 1e-12


def test_identity_channel(rng):
    lay = SubsystemLayout.uniform(("A", "B"))
    ch = InducedChannel(Isometry.identity(lay), ("A", "B"))
    rho = random_density_matrix(lay, rng)
    assert apply_channel(ch, rho).allclose(rho)


def test_channel_output_valid(rng):
    ch = InducedChannel(get_example("W3").generator, ("1", "3"))
    for _ in range(10):
        out = ch(random_density_matrix(A, rng))
        assert out.layout.labels == ("1", "3")
        assert abs(np.trace(out.matrix) - 1) < 1e-12
        assert np.linalg.eigvalsh(out.matrix).min() > -1e-12


def test_channel_layout_mismatch():
    ch = InducedChannel(get_example("W3").generator, ("1",))
    with pytest.raises(DimensionError):
        ch(Ket.basis(SubsystemLayout.of(("B", 2)), "0"))


def test_dephase_examples(rng):
    ab = SubsystemLayout.uniform(("A", "B"))
    bell = maximally_entangled_state(2, ("A", "B"))
    comp = ProjectiveMeasurement.computational(ab)
    assert np.abs(dephase(projector(bell), comp).matrix - np.diag([0.5, 0, 0, 0.5])).max() < 1e-12
    assert np.abs(dephase(projector(PLUS), ProjectiveMeasurement.computational(A)).matrix - np.eye(2) / 2).max() < 1e-12
    diag = DensityMatrix.diagonal([0.1, 0.2, 0.3, 0.4], ab)
    assert dephase(diag, comp).allclose(diag)
    # idempotence, also for a measurement on one subsystem only
    mu = ProjectiveMeasurement(random_unitary(2, rng), SubsystemLayout.of(("B", 2)))
    rho = random_density_matrix(ab, rng)
    once = dephase(rho, mu)
    assert np.abs(dephase(once, mu).matrix - once.matrix).max() < 1e-10


def test_ensemble_validation():
    states = (projector(Ket.basis(A, "0")), projector(Ket.basis(A, "1")))
    with pytest.raises(ValidationError):
        ClassicalQuantumEnsemble(np.array([0.6, 0.6]), states)
    with pytest.raises(DimensionError):
        ClassicalQuantumEnsemble(np.array([1.0]), states)
    ens = ClassicalQuantumEnsemble(np.array([0.25, 0.75]), states)
    rho = ens.realized_state()
    assert rho.layout.labels == ("R", "A")
    assert np.abs(np.diag(rho.matrix) - [0.25, 0, 0, 0.75]).max() < 1e-15


def test_joint_distribution_pos_correlated():
    ens = ClassicalQuantumEnsemble.from_encoding(EncodingBasis.plus_minus())
    ch = InducedChannel(get_example("pos").generator, ("1",))
    p = joint_distribution(ens, ch, [ProjectiveMeasurement.computational(SubsystemLayout.of(("1", 2)))])
    assert np.abs(p.table - np.diag([0.5, 0.5])).max() < 1e-12
    assert abs(classical_mi(p, "R", "1") - 1) < 1e-12


def test_joint_distribution_w3_conditionals():
    ens = ClassicalQuantumEnsemble.from_encoding(EncodingBasis.plus_minus())
    ch = InducedChannel(get_example("W3").generator, ("1",))
    p = joint_distribution(ens, ch, [ProjectiveMeasurement.computational(SubsystemLayout.of(("1", 2)))])
    cond = p.table / p.table.sum(axis=1, keepdims=True)
    assert np.abs(cond - np.array([[1 / 3, 2 / 3], [1, 0]])).max() < 1e-9


def test_joint_distribution_constant_state_has_no_signal(rng):
    rho = random_density_matrix(A, rng)
    ens = ClassicalQuantumEnsemble(np.array([0.3, 0.7]), (rho, rho))
    ch = InducedChannel(get_example("W3").generator, ("1", "2"))
    mus = [ProjectiveMeasurement(random_unitary(2, rng), SubsystemLayout.of((l, 2))) for l in ("1", "2")]
    p = joint_distribution(ens, ch, mus)
    assert abs(classical_mi(p, "R", ("1", "2"))) < 1e-12


def test_joint_distribution_partition_errors():
    ens = ClassicalQuantumEnsemble.from_encoding(EncodingBasis.plus_minus())
    ch = InducedChannel(get_example("W3").generator, ("1", "2"))
    one = ProjectiveMeasurement.computational(SubsystemLayout.of(("1", 2)))
    both = ProjectiveMeasurement.computational(SubsystemLayout.uniform(("1", "2")))
    with pytest.raises(PartitionError):
        joint_distribution(ens, ch, [one, both])
    with pytest.raises(PartitionError):
        joint_distribution(ens, ch, [one])


# -- classical capacity --------------------------------------------------------

def test_z_channel_capacity():
    start = time.perf_counter()
    res = blahut_arimoto(ClassicalChannel([[1, 0], [1 / 3, 2 / 3]]))
    assert time.perf_counter() - start < 0.1
    assert res.converged
    assert abs(res.capacity - Z_CAPACITY) < 1e-6
    assert abs(z_channel_capacity(1 / 3) - Z_CAPACITY) < 1e-12


def test_binary_symmetric_capacity():
    assert abs(blahut_arimoto(ClassicalChannel.binary_symmetric(0.0)).capacity - 1) < 1e-9
    assert abs(blahut_arimoto(ClassicalChannel.binary_symmetric(0.5)).capacity) < 1e-9
    h = 0.11 * np.log2(1 / 0.11) + 0.89 * np.log2(1 / 0.89)
    assert abs(blahut_arimoto(ClassicalChannel.binary_symmetric(0.11)).capacity - (1 - h)) < 1e-9


def test_blahut_arimoto_monotone(rng):
    for _ in range(10):
        m = rng.uniform(size=(3, 4))
        res = blahut_arimoto(m / m.sum(axis=1, keepdims=True))
        assert np.all(np.diff(res.history) >= -1e-12)
        assert res.capacity <= res.upper_bound + 1e-12


def test_capacity_matches_mutual_information():
    ch = ClassicalChannel([[1, 0], [1 / 3, 2 / 3]])
    res = blahut_arimoto(ch)
    assert abs(ch.mutual_information(res.input_distribution) - res.capacity) < 1e-9


def test_classical_channel_validation():
    with pytest.raises(ValidationError):
        ClassicalChannel([[0.5, 0.6], [1, 0]])
    with pytest.raises(ValidationError):
        ClassicalChannel([[1.5, -0.5]])
