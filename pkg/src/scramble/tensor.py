"""Dense linear algebra over small labelled multipartite Hilbert spaces.

Index arithmetic is row-major over the subsystem order: subsystem 0 is the
most significant tensor index, so ``kron(a, b)`` matches a layout ``(a, b)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionError, LabelCollisionError, LayoutError, ValidationError

CONSTRUCT_TOL = 1e-10
ARITH_TOL = 1e-9

__all__ = [
    "SubsystemLayout",
    "Ket",
    "DensityMatrix",
    "Isometry",
    "as_labels",
    "tensor_product",
    "partial_trace",
    "projector",
    "maximally_entangled_state",
    "apply_isometry",
    "eigen_decomposition",
    "permute",
]


def as_labels(labels: str | Iterable[str]) -> tuple[str, ...]:
    """Normalise a label or an iterable of labels to a tuple.

    A bare string is a single label, never a sequence of characters.
    """
    if isinstance(labels, str):
        return (labels,)
    return tuple(str(l) for l in labels)


def _frozen_array(a, dtype=complex) -> np.ndarray:
    arr = np.array(a, dtype=dtype, copy=True)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class SubsystemLayout:
    subsystems: tuple[tuple[str, int], ...]

    def __post_init__(self):
        subs = tuple((str(l), int(d)) for l, d in self.subsystems)
        object.__setattr__(self, "subsystems", subs)
        labels = [l for l, _ in subs]
        if len(set(labels)) != len(labels):
            raise LabelCollisionError(f"duplicate subsystem labels in {labels}")
        for l, d in subs:
            if d < 1:
                raise DimensionError(f"subsystem {l!r} has dimension {d} < 1")

    @classmethod
    def of(cls, *pairs: tuple[str, int]) -> "SubsystemLayout":
        return cls(tuple(pairs))

    @classmethod
    def uniform(cls, labels: Iterable[str], d: int = 2) -> "SubsystemLayout":
        return cls(tuple((l, d) for l in as_labels(labels)))

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(l for l, _ in self.subsystems)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(d for _, d in self.subsystems)

    @property
    def dim(self) -> int:
        return int(np.prod(self.dims, dtype=int))

    def __len__(self):
        return len(self.subsystems)

    def __contains__(self, label):
        return label in self.labels

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise LayoutError(f"unknown subsystem label {label!r}; layout has {self.labels}") from None

    def indices(self, labels: str | Iterable[str]) -> list[int]:
        return [self.index(l) for l in as_labels(labels)]

    def dim_of(self, labels: str | Iterable[str]) -> int:
        return int(np.prod([self.dims[i] for i in self.indices(labels)], dtype=int))

    def restrict(self, labels: str | Iterable[str]) -> "SubsystemLayout":
        """Sub-layout on ``labels``, kept in this layout's order."""
        wanted = set(self.indices(labels))
        return SubsystemLayout(tuple(s for i, s in enumerate(self.subsystems) if i in wanted))

    def complement(self, labels: str | Iterable[str]) -> tuple[str, ...]:
        drop = set(self.indices(labels))
        return tuple(l for i, l in enumerate(self.labels) if i not in drop)

    def concat(self, other: "SubsystemLayout") -> "SubsystemLayout":
        return SubsystemLayout(self.subsystems + other.subsystems)

    def __str__(self):
        return "⊗".join(f"{l}[{d}]" for l, d in self.subsystems)


def _single(dim: int, label: str = "S") -> SubsystemLayout:
    return SubsystemLayout(((label, dim),))


@dataclass(frozen=True, eq=False)
class Ket:
    amplitudes: np.ndarray
    layout: SubsystemLayout

    def __post_init__(self):
        amps = _frozen_array(self.amplitudes).reshape(-1)
        object.__setattr__(self, "amplitudes", amps)
        if amps.shape[0] != self.layout.dim:
            raise DimensionError(f"ket has {amps.shape[0]} amplitudes, layout {self.layout} needs {self.layout.dim}")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > CONSTRUCT_TOL:
            raise ValidationError(f"ket norm {norm:.12g} differs from 1")

    @classmethod
    def basis(cls, layout: SubsystemLayout, digits: str | Sequence[int]) -> "Ket":
        """Computational basis ket, e.g. ``Ket.basis(layout, "010")``."""
        idx = [int(c) for c in digits]
        if len(idx) != len(layout):
            raise DimensionError(f"{len(idx)} digits for a {len(layout)}-partite layout")
        v = np.zeros(layout.dim, dtype=complex)
        v[np.ravel_multi_index(idx, layout.dims)] = 1.0
        return cls(v, layout)

    @classmethod
    def normalized(cls, amplitudes, layout: SubsystemLayout) -> "Ket":
        v = np.asarray(amplitudes, dtype=complex).reshape(-1)
        return cls(v / np.linalg.norm(v), layout)

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape(self.layout.dims)

    def inner(self, other: "Ket") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def allclose(self, other: "Ket", atol: float = ARITH_TOL) -> bool:
        return self.layout == other.layout and np.allclose(self.amplitudes, other.amplitudes, atol=atol)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    matrix: np.ndarray
    layout: SubsystemLayout

    def __post_init__(self):
        m = _frozen_array(self.matrix)
        object.__setattr__(self, "matrix", m)
        n = self.layout.dim
        if m.shape != (n, n):
            raise DimensionError(f"matrix shape {m.shape} does not match layout {self.layout} (dim {n})")
        if not np.allclose(m, m.conj().T, atol=CONSTRUCT_TOL, rtol=0):
            raise ValidationError("density matrix is not Hermitian")
        tr = np.trace(m).real
        if abs(tr - 1.0) > CONSTRUCT_TOL:
            raise ValidationError(f"density matrix trace {tr:.12g} differs from 1")
        lo = np.linalg.eigvalsh(m).min()
        if lo < -ARITH_TOL:
            raise ValidationError(f"density matrix has negative eigenvalue {lo:.3g}")

    @classmethod
    def maximally_mixed(cls, layout: SubsystemLayout) -> "DensityMatrix":
        return cls(np.eye(layout.dim) / layout.dim, layout)

    @classmethod
    def diagonal(cls, probs, layout: SubsystemLayout) -> "DensityMatrix":
        return cls(np.diag(np.asarray(probs, dtype=float)), layout)

    @classmethod
    def mixture(cls, weights: Sequence[float], states: Sequence["DensityMatrix | Ket"]) -> "DensityMatrix":
        ops = [s if isinstance(s, DensityMatrix) else projector(s) for s in states]
        layout = ops[0].layout
        if any(o.layout != layout for o in ops):
            raise DimensionError("mixture components live on different layouts")
        return cls(sum(w * o.matrix for w, o in zip(weights, ops)), layout)

    def tensor(self) -> np.ndarray:
        return self.matrix.reshape(self.layout.dims * 2)

    def allclose(self, other: "DensityMatrix", atol: float = ARITH_TOL) -> bool:
        return self.layout == other.layout and np.allclose(self.matrix, other.matrix, atol=atol, rtol=0)


@dataclass(frozen=True, eq=False)
class Isometry:
    """Map V with V†V = I from ``input_layout`` into ``output_layout``."""

    matrix: np.ndarray
    input_layout: SubsystemLayout
    output_layout: SubsystemLayout

    def __post_init__(self):
        m = _frozen_array(self.matrix)
        object.__setattr__(self, "matrix", m)
        din, dout = self.input_layout.dim, self.output_layout.dim
        if m.shape != (dout, din):
            raise DimensionError(f"isometry matrix shape {m.shape}, expected {(dout, din)}")
        if dout < din:
            raise DimensionError("isometry output dimension is smaller than its input dimension")
        if not np.allclose(m.conj().T @ m, np.eye(din), atol=CONSTRUCT_TOL, rtol=0):
            raise ValidationError("V†V differs from the identity")

    @classmethod
    def from_columns(cls, columns: Sequence[Ket], input_layout: SubsystemLayout) -> "Isometry":
        """Isometry sending the i-th input basis ket to ``columns[i]``."""
        out = columns[0].layout
        if any(c.layout != out for c in columns):
            raise DimensionError("isometry columns live on different layouts")
        return cls(np.column_stack([c.amplitudes for c in columns]), input_layout, out)

    @classmethod
    def identity(cls, layout: SubsystemLayout) -> "Isometry":
        return cls(np.eye(layout.dim), layout, layout)

    @property
    def is_unitary(self) -> bool:
        return self.input_layout.dim == self.output_layout.dim

    def column(self, i: int) -> Ket:
        return Ket(self.matrix[:, i], self.output_layout)

    def relabel(self, inputs: Sequence[str] | None = None, outputs: Sequence[str] | None = None) -> "Isometry":
        def re(layout, names):
            if names is None:
                return layout
            names = as_labels(names)
            if len(names) != len(layout):
                raise DimensionError(f"need {len(layout)} labels, got {len(names)}")
            return SubsystemLayout(tuple(zip(names, layout.dims)))

        return Isometry(self.matrix, re(self.input_layout, inputs), re(self.output_layout, outputs))

    def compose(self, first: "Isometry") -> "Isometry":
        """The isometry ``self ∘ first``; layouts must chain exactly."""
        if first.output_layout != self.input_layout:
            raise DimensionError(f"cannot compose: {first.output_layout} → {self.input_layout}")
        return Isometry(self.matrix @ first.matrix, first.input_layout, self.output_layout)


def tensor_product(a, b):
    if isinstance(a, Ket) and isinstance(b, Ket):
        return Ket(np.kron(a.amplitudes, b.amplitudes), a.layout.concat(b.layout))
    if isinstance(a, DensityMatrix) and isinstance(b, DensityMatrix):
        return DensityMatrix(np.kron(a.matrix, b.matrix), a.layout.concat(b.layout))
    raise TypeError(f"tensor_product needs two Kets or two DensityMatrices, got {type(a).__name__}, {type(b).__name__}")


def projector(psi: Ket) -> DensityMatrix:
    return DensityMatrix(np.outer(psi.amplitudes, psi.amplitudes.conj()), psi.layout)


def reduced_matrix(matrix: np.ndarray, dims: Sequence[int], keep: Sequence[int]) -> np.ndarray:
    """Partial trace of a raw matrix keeping the axis positions in ``keep`` (sorted)."""
    n = len(dims)
    keep = sorted(keep)
    drop = [i for i in range(n) if i not in keep]
    t = np.asarray(matrix).reshape(tuple(dims) * 2)
    # bring (kept kets, dropped kets, kept bras, dropped bras) together
    t = t.transpose(keep + drop + [n + i for i in keep] + [n + i for i in drop])
    dk = int(np.prod([dims[i] for i in keep], dtype=int))
    dd = int(np.prod([dims[i] for i in drop], dtype=int))
    return np.einsum("aibi->ab", t.reshape(dk, dd, dk, dd))


def partial_trace(rho: DensityMatrix | Ket, keep: str | Iterable[str]) -> DensityMatrix:
    """Trace out everything except ``keep``; kept subsystems stay in layout order."""
    if isinstance(rho, Ket):
        rho = projector(rho)
    keep = as_labels(keep)
    if not keep:
        raise LayoutError("partial_trace needs at least one label to keep")
    idx = rho.layout.indices(keep)
    if len(set(idx)) != len(idx):
        raise LayoutError(f"repeated labels in {keep}")
    out = reduced_matrix(rho.matrix, rho.layout.dims, idx)
    return DensityMatrix(out, rho.layout.restrict(keep))


def maximally_entangled_state(d: int, labels: Sequence[str] = ("A", "R")) -> Ket:
    """(1/√d) Σ_i |i⟩|i⟩ on a d×d layout."""
    if d < 2:
        raise DimensionError(f"maximally entangled state needs d >= 2, got {d}")
    labels = as_labels(labels)
    if len(labels) != 2:
        raise DimensionError("maximally entangled state needs exactly two labels")
    return Ket(np.eye(d).reshape(-1) / np.sqrt(d), SubsystemLayout(((labels[0], d), (labels[1], d))))


def _act(t: np.ndarray, axes: list[int], mat: np.ndarray, out_dims: tuple[int, ...]) -> np.ndarray:
    """Apply ``mat`` to tensor axes ``axes``; the new axes are returned first."""
    rest = [i for i in range(t.ndim) if i not in axes]
    moved = t.transpose(axes + rest)
    rest_shape = moved.shape[len(axes):]
    flat = moved.reshape(mat.shape[1], -1)
    return (mat @ flat).reshape(out_dims + rest_shape)


def _insert_order(n_rest_before: int, n_out: int, n_rest: int) -> list[int]:
    # axes currently ordered (outputs, rest); move outputs into slot n_rest_before
    rest = list(range(n_out, n_out + n_rest))
    return rest[:n_rest_before] + list(range(n_out)) + rest[n_rest_before:]


def apply_isometry(v: Isometry, state):
    """Evolve ``state`` through ``v``, padding with identity on untouched labels.

    The output subsystems take the position of the first acted-on subsystem; all
    other subsystems keep their relative order.
    """
    layout = state.layout
    for l, d in v.input_layout.subsystems:
        if l not in layout:
            raise DimensionError(f"state has no subsystem {l!r} required by the isometry")
        if layout.dims[layout.index(l)] != d:
            raise DimensionError(f"subsystem {l!r} has dimension {layout.dims[layout.index(l)]}, isometry expects {d}")
    axes = layout.indices(v.input_layout.labels)
    rest_labels = layout.complement(v.input_layout.labels)
    before = sum(1 for i in range(min(axes)) if i not in axes)
    rest_subs = [layout.subsystems[layout.index(l)] for l in rest_labels]
    out_subs = list(v.output_layout.subsystems)
    new_layout = SubsystemLayout(tuple(rest_subs[:before] + out_subs + rest_subs[before:]))
    n_out, n_rest = len(out_subs), len(rest_subs)
    order = _insert_order(before, n_out, n_rest)
    out_dims = v.output_layout.dims
    if isinstance(state, Ket):
        t = _act(state.tensor(), axes, v.matrix, out_dims).transpose(order)
        return Ket(t.reshape(-1), new_layout)
    if isinstance(state, DensityMatrix):
        t = _act(state.tensor(), axes, v.matrix, out_dims)  # (out kets, rest kets, all bras)
        bra_axes = [n_out + n_rest + i for i in axes]
        t = _act(t, bra_axes, v.matrix.conj(), out_dims)  # (out bras, out kets, rest kets, rest bras)
        kets = [n_out + i for i in order]
        bras_out = list(range(n_out))
        bras_rest = list(range(2 * n_out + n_rest, 2 * n_out + 2 * n_rest))
        t = t.transpose(kets + bras_rest[:before] + bras_out + bras_rest[before:])
        d = new_layout.dim
        return DensityMatrix(t.reshape(d, d), new_layout)
    raise TypeError(f"cannot apply an isometry to {type(state).__name__}")


def eigen_decomposition(rho, layout: SubsystemLayout | None = None) -> list[tuple[float, Ket]]:
    """Eigenpairs of a Hermitian operator, eigenvalues in descending order."""
    if isinstance(rho, DensityMatrix):
        m, layout = rho.matrix, rho.layout
    else:
        m = np.asarray(rho, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionError(f"expected a square matrix, got shape {m.shape}")
        if not np.allclose(m, m.conj().T, atol=CONSTRUCT_TOL, rtol=0):
            raise ValidationError("eigen_decomposition requires a Hermitian matrix")
        layout = layout or _single(m.shape[0])
    w, vecs = np.linalg.eigh(m)
    order = np.argsort(-w, kind="stable")
    return [(float(w[i]), Ket(vecs[:, i], layout)) for i in order]


def permute(state, order: Iterable[str]):
    """Reorder the subsystems of a Ket or DensityMatrix to ``order`` (all labels)."""
    order = as_labels(order)
    layout = state.layout
    if sorted(order) != sorted(layout.labels):
        raise LayoutError(f"permutation {order} does not match labels {layout.labels}")
    idx = layout.indices(order)
    new_layout = SubsystemLayout(tuple(layout.subsystems[i] for i in idx))
    if isinstance(state, Ket):
        return Ket(state.tensor().transpose(idx).reshape(-1), new_layout)
    n = len(layout)
    t = state.tensor().transpose(idx + [n + i for i in idx])
    return DensityMatrix(t.reshape(layout.dim, layout.dim), new_layout)
