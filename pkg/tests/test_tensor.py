import numpy as np
import pytest

from scramble.errors import (DimensionError, LabelCollisionError, LayoutError, ValidationError)
from scramble.measures import random_density_matrix, random_ket, random_unitary
from scramble.states import get_example, perfect_tensor_unitary
from scramble.tensor import (DensityMatrix, Isometry, Ket, SubsystemLayout, apply_isometry, eigen_decomposition,
                             maximally_entangled_state, partial_trace, permute, projector, tensor_product)

Q = SubsystemLayout.of


def test_layout_basics():
    lay = Q(("A", 2), ("B", 3), ("C", 2))
    assert lay.labels == ("A", "B", "C")
    assert lay.dims == (2, 3, 2)
    assert lay.dim == 12
    assert lay.index("B") == 1
    assert lay.dim_of(("A", "C")) == 4
    # restriction keeps the layout's own order
    assert lay.restrict(("C", "A")).labels == ("A", "C")
    assert lay.complement("B") == ("A", "C")


def test_layout_rejects_bad_input():
    with pytest.raises(LayoutError):
        Q(("A", 2), ("A", 2))
    with pytest.raises(DimensionError):
        Q(("A", 0))
    with pytest.raises(LayoutError):
        Q(("A", 2)).index("Z")


def test_row_major_order():
    lay = SubsystemLayout.uniform(("A", "B"))
    ket = Ket.basis(lay, "10")
    assert ket.amplitudes[2] == 1


def test_ket_norm_validated():
    with pytest.raises(ValidationError):
        Ket(np.array([1.0, 1.0]), Q(("A", 2)))
    with pytest.raises(DimensionError):
        Ket(np.array([1.0, 0, 0]), Q(("A", 2)))


def test_density_matrix_validated():
    lay = Q(("A", 2))
    with pytest.raises(ValidationError):
        DensityMatrix(np.array([[1, 1], [0, 0]]), lay)
    with pytest.raises(ValidationError):
        DensityMatrix(np.diag([0.7, 0.7]), lay)
    with pytest.raises(ValidationError):
        DensityMatrix(np.diag([1.5, -0.5]), lay)


def test_isometry_validated():
    with pytest.raises(ValidationError):
        Isometry(np.array([[1, 0], [0, 2.0]]), Q(("A", 2)), Q(("B", 2)))
    with pytest.raises(DimensionError):
        Isometry(np.ones((2, 4)) / 2, Q(("A", 4)), Q(("B", 2)))


def test_tensor_product_kets():
    zero = Ket.basis(Q(("A", 2)), "0")
    one = Ket.basis(Q(("B", 2)), "1")
    prod = tensor_product(zero, one)
    assert prod.layout.labels == ("A", "B")
    assert np.abs(prod.amplitudes - np.array([0, 1, 0, 0])).max() < 1e-15


def test_tensor_product_mixed():
    a = DensityMatrix.maximally_mixed(Q(("A", 2)))
    b = DensityMatrix.maximally_mixed(Q(("B", 2)))
    assert np.abs(tensor_product(a, b).matrix - np.eye(4) / 4).max() < 1e-15


def test_tensor_product_label_collision():
    a = Ket.basis(Q(("A", 2)), "0")
    with pytest.raises(LabelCollisionError):
        tensor_product(a, a)


def test_double_arm_input_ket():
    psi = tensor_product(maximally_entangled_state(2, ("A", "R")), maximally_entangled_state(2, ("B", "M")))
    assert psi.layout.dim == 16
    expected = np.zeros(16)
    for i in range(2):
        for j in range(2):
            expected[i * 8 + i * 4 + j * 2 + j] = 0.5
    assert np.abs(psi.amplitudes - expected).max() < 1e-15


def test_partial_trace_bell():
    bell = maximally_entangled_state(2, ("A", "B"))
    assert np.abs(partial_trace(bell, "A").matrix - np.eye(2) / 2).max() < 1e-12


def test_partial_trace_product(rng):
    a = random_density_matrix(Q(("A", 2)), rng)
    b = random_density_matrix(Q(("B", 3)), rng)
    assert partial_trace(tensor_product(a, b), "A").allclose(a)
    assert partial_trace(tensor_product(a, b), "B").allclose(b)


def test_partial_trace_keeps_layout_order(rng):
    rho = random_density_matrix(Q(("A", 2), ("B", 3)), rng)
    assert partial_trace(rho, ("B", "A")).allclose(rho)
    swapped = permute(rho, ("B", "A"))
    assert swapped.layout.labels == ("B", "A")
    assert np.abs(swapped.tensor() - rho.tensor().transpose(1, 0, 3, 2)).max() < 1e-15


def test_partial_trace_composes(rng):
    rho = random_density_matrix(Q(("A", 2), ("B", 2), ("C", 3)), rng)
    assert partial_trace(partial_trace(rho, ("A", "B")), "A").allclose(partial_trace(rho, "A"))
    assert partial_trace(rho, ("A", "B", "C")).allclose(rho)


def test_partial_trace_unknown_label(rng):
    rho = random_density_matrix(Q(("A", 2)), rng)
    with pytest.raises(LayoutError):
        partial_trace(rho, "Z")


def test_projector_examples():
    lay = Q(("A", 2))
    assert np.abs(projector(Ket.basis(lay, "0")).matrix - np.diag([1, 0])).max() < 1e-15
    plus = Ket(np.array([1, 1]) / np.sqrt(2), lay)
    assert np.abs(projector(plus).matrix - 0.5).max() < 1e-15
    ghz = Ket(np.eye(8)[0] / np.sqrt(2) + np.eye(8)[7] / np.sqrt(2), SubsystemLayout.uniform("ABC"[i] for i in range(3)))
    p = projector(ghz).matrix
    assert np.linalg.matrix_rank(p) == 1
    assert np.count_nonzero(np.abs(p) > 1e-12) == 4
    assert np.abs(p[np.abs(p) > 1e-12] - 0.5).max() < 1e-15
    assert np.abs(p @ p - p).max() < 1e-12


def test_maximally_entangled_state():
    two = maximally_entangled_state(2)
    assert np.abs(two.amplitudes - np.array([1, 0, 0, 1]) / np.sqrt(2)).max() < 1e-15
    three = maximally_entangled_state(3, ("X", "Y"))
    expected = np.zeros(9)
    expected[[0, 4, 8]] = 1 / np.sqrt(3)
    assert np.abs(three.amplitudes - expected).max() < 1e-15
    assert np.abs(partial_trace(three, "Y").matrix - np.eye(3) / 3).max() < 1e-12
    with pytest.raises(DimensionError):
        maximally_entangled_state(1)


def test_apply_isometry_identity(rng):
    rho = random_density_matrix(Q(("A", 2), ("B", 2)), rng)
    assert apply_isometry(Isometry.identity(rho.layout), rho).allclose(rho)


def test_apply_isometry_van_on_zero():
    v = get_example("van").generator
    out = apply_isometry(v, Ket.basis(v.input_layout, "0"))
    expected = np.zeros(8)
    expected[[0, 6]] = 1 / np.sqrt(2)
    assert np.abs(out.amplitudes - expected).max() < 1e-15


def test_apply_isometry_perfect_tensor():
    u = perfect_tensor_unitary(3)
    out = apply_isometry(u, Ket.basis(u.input_layout, "10"))
    assert out.allclose(Ket.basis(u.output_layout, "11"))


def test_apply_isometry_pads_identity(rng):
    # act on the middle subsystem of three; compare with an explicit Kronecker product
    lay = Q(("A", 2), ("B", 2), ("C", 3))
    u = random_unitary(2, rng)
    v = Isometry(u, Q(("B", 2)), Q(("B", 2)))
    rho = random_density_matrix(lay, rng)
    big = np.kron(np.kron(np.eye(2), u), np.eye(3))
    out = apply_isometry(v, rho)
    assert out.layout == lay
    assert np.abs(out.matrix - big @ rho.matrix @ big.conj().T).max() < 1e-12
    ket = random_ket(lay, rng)
    assert np.abs(apply_isometry(v, ket).amplitudes - big @ ket.amplitudes).max() < 1e-12


def test_apply_isometry_changes_layout(rng):
    v = get_example("W3").generator
    lay = Q(("R", 2), ("A", 2))
    rho = random_density_matrix(lay, rng)
    out = apply_isometry(v, rho)
    assert out.layout.labels == ("R", "1", "2", "3")
    big = np.kron(np.eye(2), v.matrix)
    assert np.abs(out.matrix - big @ rho.matrix @ big.conj().T).max() < 1e-12
    assert abs(np.trace(out.matrix) - 1) < 1e-12
    assert np.linalg.eigvalsh(out.matrix).min() > -1e-12


def test_apply_isometry_layout_mismatch():
    v = get_example("W3").generator
    with pytest.raises((LayoutError, DimensionError)):
        apply_isometry(v, Ket.basis(Q(("B", 2)), "0"))


def test_eigen_decomposition_examples():
    vals = [e for e, _ in eigen_decomposition(DensityMatrix.maximally_mixed(Q(("A", 2))))]
    assert np.abs(np.array(vals) - 0.5).max() < 1e-15
    vals = [e for e, _ in eigen_decomposition(DensityMatrix.diagonal([1 / 3, 2 / 3], Q(("A", 2))))]
    assert np.abs(np.array(vals) - [2 / 3, 1 / 3]).max() < 1e-15
    vals = [e for e, _ in eigen_decomposition(projector(Ket.basis(Q(("A", 3)), "1")))]
    assert np.abs(np.array(vals) - [1, 0, 0]).max() < 1e-15


def test_eigen_decomposition_rejects_non_hermitian():
    with pytest.raises(ValidationError):
        eigen_decomposition(np.array([[0, 1], [0, 0]]))


def test_eigen_decomposition_random(rng):
    for _ in range(20):
        rho = random_density_matrix(Q(("A", 2), ("B", 2)), rng)
        pairs = eigen_decomposition(rho)
        vals = np.array([e for e, _ in pairs])
        vecs = np.column_stack([k.amplitudes for _, k in pairs])
        assert np.all(np.diff(vals) <= 1e-15)
        assert abs(vals.sum() - 1) < 1e-9
        assert vals.min() > -1e-9 and vals.max() < 1 + 1e-9
        assert np.abs(vecs.conj().T @ vecs - np.eye(4)).max() < 1e-10


def test_isometry_preserves_trace_and_positivity(rng):
    for _ in range(10):
        v = Isometry(random_unitary(8, rng)[:, :2], Q(("A", 2)), SubsystemLayout.uniform(("1", "2", "3")))
        rho = random_density_matrix(Q(("A", 2)), rng)
        out = apply_isometry(v, rho)
        assert abs(np.trace(out.matrix) - 1) < 1e-9
        assert np.linalg.eigvalsh(out.matrix).min() > -1e-9
