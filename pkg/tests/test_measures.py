import itertools

import numpy as np
import pytest
from hypothesis import given, settings as hsettings
from hypothesis import strategies as st

from scramble.errors import LayoutError, PartitionError, ValidationError
from scramble.measures import (JointDistribution, classical_mi, classical_tripartite_info, entropy_of_probabilities,
                               qmi, random_density_matrix, random_ket, random_unitary, shannon_entropy,
                               tripartite_info, tripartite_info_symmetric, von_neumann_entropy)
from scramble.tensor import DensityMatrix, Ket, SubsystemLayout, maximally_entangled_state, partial_trace, projector

ABC = SubsystemLayout.uniform(("A", "B", "C"))

REDUNDANT = JointDistribution.from_outcomes({"000": 0.5, "111": 0.5})
ONE_UNCORRELATED = JointDistribution.from_outcomes({"001": 0.5, "111": 0.5})
PARITY = JointDistribution.from_outcomes({"000": 0.25, "011": 0.25, "101": 0.25, "110": 0.25})


def h2(p):
    return -p * np.log2(p) - (1 - p) * np.log2(1 - p)


def test_von_neumann_examples():
    q = SubsystemLayout.of(("A", 2))
    assert abs(von_neumann_entropy(projector(Ket.basis(q, "1")))) < 1e-12
    assert abs(von_neumann_entropy(DensityMatrix.maximally_mixed(q)) - 1) < 1e-12
    assert abs(von_neumann_entropy(DensityMatrix.diagonal([2 / 3, 1 / 3], q)) - h2(1 / 3)) < 1e-12
    assert abs(h2(1 / 3) - 0.9183) < 1e-4


def test_entropy_ignores_tiny_eigenvalues():
    assert entropy_of_probabilities([1.0, 1e-14, -1e-16]) == 0.0


@hsettings(max_examples=50, deadline=None)
@given(st.lists(st.floats(min_value=0.0, max_value=1.0), min_size=1, max_size=16))
def test_entropy_bounds(weights):
    w = np.array(weights)
    if w.sum() == 0:
        return
    h = entropy_of_probabilities(w / w.sum())
    assert -1e-12 <= h <= np.log2(len(w)) + 1e-12


def test_shannon_examples():
    assert abs(shannon_entropy(JointDistribution(np.array([0.5, 0.5]), ("X",))) - 1) < 1e-12
    assert abs(shannon_entropy(JointDistribution(np.array([1.0, 0.0]), ("X",)))) < 1e-12
    for var in "ABC":
        assert abs(shannon_entropy(PARITY, var) - 1) < 1e-12


def test_shannon_unknown_variable():
    with pytest.raises(LayoutError):
        shannon_entropy(PARITY, "Z")


def test_joint_distribution_validation():
    with pytest.raises(ValidationError):
        JointDistribution(np.array([0.5, 0.6]), ("X",))
    with pytest.raises(ValidationError):
        JointDistribution(np.array([1.5, -0.5]), ("X",))


def test_marginal_order_follows_request():
    t = np.arange(8, dtype=float).reshape(2, 2, 2)
    p = JointDistribution(t / t.sum(), ("A", "B", "C"))
    assert np.abs(p.marginal(("C", "A")) - (t / t.sum()).sum(axis=1).T).max() < 1e-15


def test_qmi_examples():
    bell = maximally_entangled_state(2, ("A", "B"))
    mixed = DensityMatrix.diagonal([0.5, 0, 0, 0.5], SubsystemLayout.uniform(("A", "B")))
    assert abs(qmi(bell, "A", "B") - 2) < 1e-9
    assert abs(qmi(mixed, "A", "B") - 1) < 1e-9


def test_qmi_product_state(rng):
    a = random_density_matrix(SubsystemLayout.of(("A", 2)), rng)
    b = random_density_matrix(SubsystemLayout.of(("B", 3)), rng)
    prod = DensityMatrix(np.kron(a.matrix, b.matrix), SubsystemLayout.of(("A", 2), ("B", 3)))
    assert abs(qmi(prod, "A", "B")) < 1e-9


def test_qmi_overlap_rejected():
    bell = maximally_entangled_state(2, ("A", "B"))
    with pytest.raises(PartitionError):
        qmi(bell, ("A", "B"), "B")


def test_qmi_nonnegative(rng):
    for _ in range(30):
        rho = random_density_matrix(ABC, rng)
        assert qmi(rho, "A", ("B", "C")) > -1e-9


def test_tripartite_examples():
    mixed = DensityMatrix.diagonal(np.eye(8)[0] / 2 + np.eye(8)[7] / 2, ABC)
    ghz = Ket((np.eye(8)[0] + np.eye(8)[7]) / np.sqrt(2), ABC)
    assert abs(tripartite_info(mixed, "A", "B", "C") - 1) < 1e-9
    assert abs(tripartite_info(ghz, "A", "B", "C")) < 1e-9


def test_pure_tripartite_is_zero(rng):
    for _ in range(20):
        assert abs(tripartite_info(random_ket(ABC, rng), "A", "B", "C")) < 1e-9


def test_tripartite_overlap_rejected(rng):
    with pytest.raises(PartitionError):
        tripartite_info(random_density_matrix(ABC, rng), "A", "B", ("B", "C"))


def test_pure_four_partite_reductions_agree(rng):
    lay = SubsystemLayout.uniform(("A", "B", "C", "D"))
    for _ in range(100):
        psi = random_ket(lay, rng)
        values = []
        for kept in itertools.combinations("ABCD", 3):
            rho = partial_trace(psi, kept)
            values.append(tripartite_info(rho, *kept))
        assert max(values) - min(values) < 1e-9


def test_symmetric_form_matches(rng):
    for _ in range(30):
        rho = random_density_matrix(ABC, rng)
        assert abs(tripartite_info(rho, "A", "B", "C") - tripartite_info_symmetric(rho, "A", "B", "C")) < 1e-9


def test_unitary_invariance(rng):
    for _ in range(20):
        rho = random_density_matrix(ABC, rng)
        u = random_unitary(8, rng)
        turned = DensityMatrix(u @ rho.matrix @ u.conj().T, ABC)
        assert abs(von_neumann_entropy(rho) - von_neumann_entropy(turned)) < 1e-9


def test_dephased_state_matches_classical(rng):
    for _ in range(20):
        rho = random_density_matrix(ABC, rng)
        diag = np.real(np.diag(rho.matrix))
        dephased = DensityMatrix(np.diag(diag), ABC)
        p = JointDistribution(diag.reshape(2, 2, 2) / diag.sum(), ("A", "B", "C"))
        assert abs(classical_tripartite_info(p, "A", "B", "C") - tripartite_info(dephased, "A", "B", "C")) < 1e-9


def test_classical_mi_examples():
    correlated = JointDistribution(np.array([[0.5, 0], [0, 0.5]]), ("X", "Y"))
    independent = JointDistribution(np.full((2, 2), 0.25), ("X", "Y"))
    assert abs(classical_mi(correlated, "X", "Y") - 1) < 1e-12
    assert abs(classical_mi(independent, "X", "Y")) < 1e-12
    assert abs(classical_mi(PARITY, "A", ("B", "C")) - 1) < 1e-12


def test_classical_tripartite_examples():
    assert abs(classical_tripartite_info(REDUNDANT, "A", "B", "C") - 1) < 1e-12
    assert abs(classical_tripartite_info(ONE_UNCORRELATED, "A", "B", "C")) < 1e-12
    assert abs(classical_tripartite_info(PARITY, "A", "B", "C") + 1) < 1e-12
