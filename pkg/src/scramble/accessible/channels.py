"""Induced channels, classical-quantum ensembles and measurement statistics."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from ..errors import DimensionError, LayoutError, MeasurementError, PartitionError, ValidationError
from ..measures import JointDistribution
from ..tensor import (DensityMatrix, Isometry, Ket, SubsystemLayout, apply_isometry, as_labels,
                      partial_trace, permute, projector)
from .encoding import EncodingBasis, ProjectiveMeasurement

__all__ = [
    "InducedChannel",
    "ClassicalQuantumEnsemble",
    "apply_channel",
    "dephase",
    "joint_distribution",
    "square_root_factors",
    "stinespring_tensor",
]


@dataclass(frozen=True, eq=False)
class InducedChannel:
    """ρ ↦ Tr_{S̄}(V ρ V†), keeping the output subsystems ``kept_labels``."""

    generator: Isometry
    kept_labels: tuple[str, ...]

    def __post_init__(self):
        kept = as_labels(self.kept_labels)
        object.__setattr__(self, "kept_labels", kept)
        if not kept:
            raise LayoutError("an induced channel must keep at least one output subsystem")
        self.generator.output_layout.indices(kept)
        if len(set(kept)) != len(kept):
            raise LayoutError(f"repeated labels in {kept}")

    @property
    def input_layout(self) -> SubsystemLayout:
        return self.generator.input_layout

    @property
    def output_layout(self) -> SubsystemLayout:
        return self.generator.output_layout.restrict(self.kept_labels)

    def __call__(self, rho):
        return apply_channel(self, rho)


def apply_channel(ch: InducedChannel, rho: DensityMatrix | Ket) -> DensityMatrix:
    if isinstance(rho, Ket):
        rho = projector(rho)
    if rho.layout != ch.input_layout:
        raise DimensionError(f"channel expects input layout {ch.input_layout}, got {rho.layout}")
    return partial_trace(apply_isometry(ch.generator, rho), ch.kept_labels)


def stinespring_tensor(v: Isometry, measured: Iterable[str]) -> np.ndarray:
    """Reshape V into T[s, e, i]: measured index s, everything else e, input i.

    For an input ket a, ``T @ a`` is a square-root factor of the reduced output
    on the measured subsystems: ρ_S = (T a)(T a)†.
    """
    out = v.output_layout
    measured = as_labels(measured)
    ms = out.indices(measured)
    rest = [i for i in range(len(out)) if i not in ms]
    t = v.matrix.reshape(out.dims + (v.input_layout.dim,))
    t = t.transpose(ms + rest + [len(out)])
    return t.reshape(out.dim_of(measured), -1, v.input_layout.dim)


def square_root_factors(states: Sequence[DensityMatrix], v: Isometry, measured: Iterable[str]) -> np.ndarray:
    """Stack Ψ_x with Ψ_x Ψ_x† = Tr_rest(V ρ_x V†) on ``measured``; shape (X, d_S, r)."""
    t = stinespring_tensor(v, measured)
    factors = []
    for rho in states:
        w, vecs = np.linalg.eigh(rho.matrix)
        keep = w > 1e-14
        # each eigenvector contributes a block of columns
        blocks = [np.sqrt(w[k]) * (t @ vecs[:, k]) for k in np.flatnonzero(keep)]
        factors.append(np.concatenate(blocks, axis=1))
    r = max(f.shape[1] for f in factors)
    out = np.zeros((len(factors), t.shape[0], r), dtype=complex)
    for x, f in enumerate(factors):
        out[x, :, : f.shape[1]] = f
    return out


@dataclass(frozen=True, eq=False)
class ClassicalQuantumEnsemble:
    """Register weights p_x and conditional input states ρ_x."""

    weights: np.ndarray
    conditional_states: tuple[DensityMatrix, ...]
    register_label: str = "R"

    def __post_init__(self):
        w = np.array(self.weights, dtype=float, copy=True).ravel()
        states = tuple(s if isinstance(s, DensityMatrix) else projector(s) for s in self.conditional_states)
        if len(w) != len(states):
            raise DimensionError(f"{len(w)} weights for {len(states)} conditional states")
        if (w < 0).any() or abs(w.sum() - 1.0) > 1e-12:
            raise ValidationError(f"register weights {w} are not a probability vector")
        if any(s.layout != states[0].layout for s in states):
            raise DimensionError("conditional states live on different layouts")
        if self.register_label in states[0].layout:
            raise LayoutError(f"register label {self.register_label!r} clashes with the input layout")
        w.flags.writeable = False
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "conditional_states", states)

    @classmethod
    def from_encoding(cls, basis: EncodingBasis, weights=(0.5, 0.5), input_label: str = "A",
                      register_label: str = "R") -> "ClassicalQuantumEnsemble":
        layout = SubsystemLayout.of((input_label, 2))
        kets = basis.input_kets()
        return cls(np.asarray(weights), tuple(projector(Ket(kets[:, x], layout)) for x in range(2)), register_label)

    @property
    def input_layout(self) -> SubsystemLayout:
        return self.conditional_states[0].layout

    @property
    def register_layout(self) -> SubsystemLayout:
        return SubsystemLayout.of((self.register_label, len(self.weights)))

    def realized_state(self) -> DensityMatrix:
        """Σ_x p_x |x⟩⟨x| ⊗ ρ_x with the register first."""
        n = len(self.weights)
        m = sum(self.weights[x] * np.kron(np.diag(np.eye(n)[x]), s.matrix)
                for x, s in enumerate(self.conditional_states))
        return DensityMatrix(m, self.register_layout.concat(self.input_layout))

    def evolve(self, ch: InducedChannel) -> DensityMatrix:
        """(I_R ⊗ Φ_S)(ρ_cq) with the register first."""
        if self.input_layout != ch.input_layout:
            raise DimensionError(f"ensemble lives on {self.input_layout}, channel expects {ch.input_layout}")
        n = len(self.weights)
        outs = [apply_channel(ch, s) for s in self.conditional_states]
        m = sum(self.weights[x] * np.kron(np.diag(np.eye(n)[x]), o.matrix) for x, o in enumerate(outs))
        return DensityMatrix(m, self.register_layout.concat(outs[0].layout))


def _embedded(mu: ProjectiveMeasurement, layout: SubsystemLayout) -> np.ndarray:
    """Projectors Π_y = P_y ⊗ I on ``layout``, shape (outcomes, D, D)."""
    for l, d in mu.layout.subsystems:
        if l not in layout or layout.dims[layout.index(l)] != d:
            raise MeasurementError(f"measurement subsystem {l}[{d}] not present in {layout}")
    mlabels = mu.layout.labels
    pos = layout.indices(mlabels)
    rest = [i for i in range(len(layout)) if i not in pos]
    d_rest = int(np.prod([layout.dims[i] for i in rest], dtype=int))
    projs = []
    for p in mu.projectors():
        big = np.kron(p, np.eye(d_rest)).reshape(
            tuple(layout.dims[i] for i in pos + rest) * 2)
        inv = np.argsort(pos + rest)
        n = len(layout)
        big = big.transpose(list(inv) + [n + i for i in inv])
        projs.append(big.reshape(layout.dim, layout.dim))
    return np.array(projs)


def dephase(rho: DensityMatrix, mu: ProjectiveMeasurement) -> DensityMatrix:
    """Σ_y Π_y ρ Π_y, erasing coherences in the measured basis (identity elsewhere)."""
    projs = _embedded(mu, rho.layout)
    return DensityMatrix(np.einsum("yab,bc,ycd->ad", projs, rho.matrix, projs), rho.layout)


def joint_distribution(ens: ClassicalQuantumEnsemble, ch: InducedChannel,
                       measurements: Sequence[ProjectiveMeasurement]) -> JointDistribution:
    """p(x, y_1, …) = p_x Tr[(⊗_k μ_k) Φ_S(ρ_x)]; measurements must partition the kept labels."""
    groups = [m.labels for m in measurements]
    flat = [l for g in groups for l in g]
    if len(set(flat)) != len(flat):
        raise PartitionError(f"measurement groups overlap: {groups}")
    if set(flat) != set(ch.kept_labels):
        raise PartitionError(f"measurement groups {groups} do not partition the kept labels {ch.kept_labels}")
    order = tuple(flat)
    shape = [len(ens.weights)] + [m.layout.dim for m in measurements]
    table = np.zeros(shape)
    for x, (w, rho) in enumerate(zip(ens.weights, ens.conditional_states)):
        out = apply_channel(ch, rho)
        # reorder the kept subsystems to the measurement order, then contract group by group
        t = permute(out, order).matrix
        basis = measurements[0].basis
        for m in measurements[1:]:
            basis = np.kron(basis, m.basis)
        probs = np.real(np.einsum("sy,st,ty->y", basis.conj(), t, basis))
        table[x] = w * np.clip(probs, 0.0, None).reshape(shape[1:])
    labels = (ens.register_label,) + tuple(",".join(g) for g in groups)
    table /= table.sum()
    return JointDistribution(table, labels)
