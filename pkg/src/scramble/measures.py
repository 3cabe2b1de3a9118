"""Entropies and (tripartite) mutual informations, all in bits."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import DimensionError, LayoutError, PartitionError, ValidationError
from .tensor import DensityMatrix, Ket, SubsystemLayout, as_labels, partial_trace

EIG_CUTOFF = 1e-12

__all__ = [
    "JointDistribution",
    "entropy_of_probabilities",
    "von_neumann_entropy",
    "shannon_entropy",
    "qmi",
    "tripartite_info",
    "tripartite_info_symmetric",
    "classical_mi",
    "classical_tripartite_info",
    "mutual_information_table",
    "random_ket",
    "random_unitary",
    "random_density_matrix",
]


def entropy_of_probabilities(p) -> float:
    """Shannon entropy of a probability vector; entries below 1e-12 count as zero."""
    p = np.clip(np.asarray(p, dtype=float).ravel(), 0.0, 1.0)
    p = p[p > EIG_CUTOFF]
    return float(-np.sum(p * np.log2(p))) + 0.0


def von_neumann_entropy(rho: DensityMatrix | np.ndarray) -> float:
    m = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho)
    return entropy_of_probabilities(np.linalg.eigvalsh(m))


@dataclass(frozen=True, eq=False)
class JointDistribution:
    """Probability table with one named axis per random variable."""

    table: np.ndarray
    variable_labels: tuple[str, ...]

    def __post_init__(self):
        t = np.array(self.table, dtype=float, copy=True)
        t.flags.writeable = False
        object.__setattr__(self, "table", t)
        labels = as_labels(self.variable_labels)
        object.__setattr__(self, "variable_labels", labels)
        if len(set(labels)) != len(labels):
            raise PartitionError(f"duplicate variable labels {labels}")
        if t.ndim != len(labels):
            raise DimensionError(f"table has {t.ndim} axes but {len(labels)} labels")
        if (t < 0).any():
            raise ValidationError("negative probability in joint distribution")
        if abs(t.sum() - 1.0) > 1e-12:
            raise ValidationError(f"joint distribution sums to {t.sum():.15g}")

    @classmethod
    def from_outcomes(cls, outcomes: Mapping[str, float], labels: Sequence[str] | None = None,
                      alphabet: int = 2) -> "JointDistribution":
        """Build from ``{"000": 0.5, "111": 0.5}``-style string keys, one digit per variable."""
        n = len(next(iter(outcomes)))
        labels = as_labels(labels) if labels is not None else tuple("ABCDEFGH"[:n])
        t = np.zeros((alphabet,) * n)
        for key, prob in outcomes.items():
            t[tuple(int(c) for c in key)] += prob
        return cls(t, labels)

    def axes(self, variables: str | Iterable[str]) -> list[int]:
        out = []
        for v in as_labels(variables):
            if v not in self.variable_labels:
                raise LayoutError(f"unknown variable {v!r}; distribution has {self.variable_labels}")
            out.append(self.variable_labels.index(v))
        return out

    def marginal(self, variables: str | Iterable[str]) -> np.ndarray:
        keep = self.axes(variables)
        drop = tuple(i for i in range(self.table.ndim) if i not in keep)
        m = self.table.sum(axis=drop)
        # sum() keeps remaining axes in ascending order; reorder to the request
        return np.moveaxis(m, np.argsort(np.argsort(keep)), range(len(keep)))


def shannon_entropy(p: JointDistribution, variables: str | Iterable[str] | None = None) -> float:
    if variables is None:
        return entropy_of_probabilities(p.table)
    # entropy ignores axis order, so skip the reordering done by marginal()
    keep = p.axes(variables)
    return entropy_of_probabilities(p.table.sum(axis=tuple(i for i in range(p.table.ndim) if i not in keep)))


def _disjoint(*groups: Sequence[str]) -> None:
    seen: set[str] = set()
    for g in groups:
        if not g:
            raise PartitionError("empty label group")
        if seen & set(g):
            raise PartitionError(f"label groups overlap: {groups}")
        seen |= set(g)


def classical_mi(p: JointDistribution, a, b) -> float:
    a, b = as_labels(a), as_labels(b)
    _disjoint(a, b)
    return shannon_entropy(p, a) + shannon_entropy(p, b) - shannon_entropy(p, a + b)


def classical_tripartite_info(p: JointDistribution, a, b, c) -> float:
    a, b, c = as_labels(a), as_labels(b), as_labels(c)
    _disjoint(a, b, c)
    # I(a:b) + I(a:c) - I(a:bc) by inclusion-exclusion over the seven marginals
    def h(*groups):
        return shannon_entropy(p, sum(groups, ()))
    return h(a) + h(b) + h(c) - h(a, b) - h(a, c) - h(b, c) + h(a, b, c)


def mutual_information_table(pxy) -> float:
    """Mutual information of a two-dimensional joint probability table."""
    pxy = np.asarray(pxy, dtype=float)
    return (entropy_of_probabilities(pxy.sum(axis=1)) + entropy_of_probabilities(pxy.sum(axis=0))
            - entropy_of_probabilities(pxy))


def _entropy_of(rho: DensityMatrix, labels: tuple[str, ...]) -> float:
    if set(labels) == set(rho.layout.labels):
        return von_neumann_entropy(rho)
    return von_neumann_entropy(partial_trace(rho, labels))


def _as_state(rho) -> DensityMatrix:
    if isinstance(rho, Ket):
        return DensityMatrix(np.outer(rho.amplitudes, rho.amplitudes.conj()), rho.layout)
    return rho


def qmi(rho: DensityMatrix | Ket, a, b) -> float:
    """Quantum mutual information I(A:B); labels outside A∪B are traced out."""
    rho = _as_state(rho)
    a, b = as_labels(a), as_labels(b)
    _disjoint(a, b)
    rho.layout.indices(a + b)
    return _entropy_of(rho, a) + _entropy_of(rho, b) - _entropy_of(rho, a + b)


def tripartite_info(rho: DensityMatrix | Ket, a, b, c) -> float:
    """I3(A:B:C) = I(A:B) + I(A:C) − I(A:BC)."""
    rho = _as_state(rho)
    a, b, c = as_labels(a), as_labels(b), as_labels(c)
    _disjoint(a, b, c)
    return qmi(rho, a, b) + qmi(rho, a, c) - qmi(rho, a, b + c)


def tripartite_info_symmetric(rho: DensityMatrix | Ket, a, b, c) -> float:
    """The same quantity through the seven-entropy expansion, symmetric in A, B, C."""
    rho = _as_state(rho)
    a, b, c = as_labels(a), as_labels(b), as_labels(c)
    _disjoint(a, b, c)
    rho.layout.indices(a + b + c)
    s = lambda *groups: _entropy_of(rho, sum(groups, ()))
    return s(a) + s(b) + s(c) - s(a, b) - s(a, c) - s(b, c) + s(a, b, c)


def random_ket(layout: SubsystemLayout, rng: np.random.Generator) -> Ket:
    """Haar-random pure state: normalised i.i.d. standard complex Gaussians."""
    v = rng.standard_normal(layout.dim) + 1j * rng.standard_normal(layout.dim)
    return Ket(v / np.linalg.norm(v), layout)


def random_unitary(d: int, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    """Haar-random unitaries via QR of a complex Ginibre matrix (phase-corrected)."""
    shape = (d, d) if size is None else (size, d, d)
    z = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r, axis1=-2, axis2=-1)
    return q * (diag / np.abs(diag))[..., None, :]


def random_density_matrix(layout: SubsystemLayout, rng: np.random.Generator, rank: int | None = None) -> DensityMatrix:
    rank = rank or layout.dim
    g = rng.standard_normal((layout.dim, rank)) + 1j * rng.standard_normal((layout.dim, rank))
    m = g @ g.conj().T
    m = (m + m.conj().T) / 2
    return DensityMatrix(m / np.trace(m).real, layout)
