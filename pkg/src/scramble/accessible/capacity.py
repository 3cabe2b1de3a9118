"""Capacity of discrete memoryless classical channels (Blahut–Arimoto)."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import ValidationError

__all__ = ["ClassicalChannel", "CapacityResult", "blahut_arimoto", "z_channel_capacity"]


@dataclass(frozen=True, eq=False)
class ClassicalChannel:
    """Row-stochastic matrix of conditionals P(y|x), rows indexed by inputs."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float, copy=True)
        if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
            raise ValidationError(f"channel matrix must be 2-D, got shape {m.shape}")
        if (m < 0).any():
            raise ValidationError("channel matrix has negative entries")
        if not np.allclose(m.sum(axis=1), 1.0, atol=1e-12, rtol=0):
            raise ValidationError(f"channel rows sum to {m.sum(axis=1)}, not 1")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @classmethod
    def binary_symmetric(cls, flip: float) -> "ClassicalChannel":
        return cls([[1 - flip, flip], [flip, 1 - flip]])

    def mutual_information(self, p) -> float:
        """I(X:Y) in bits for input distribution ``p``."""
        p = np.asarray(p, dtype=float)
        q = p @ self.matrix
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(self.matrix > 0, self.matrix / q, 1.0)
            terms = np.where(self.matrix > 0, self.matrix * np.log2(ratio), 0.0)
        return float(p @ terms.sum(axis=1))


@dataclass(frozen=True)
class CapacityResult:
    capacity: float
    input_distribution: np.ndarray
    converged: bool
    iterations: int
    upper_bound: float
    history: tuple[float, ...] = field(default=(), repr=False)


def _divergences(m: np.ndarray, q: np.ndarray) -> np.ndarray:
    # D(P(.|x) || q) per input row, in bits
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(m > 0, m / q, 1.0)
        return np.where(m > 0, m * np.log2(ratio), 0.0).sum(axis=1)


def blahut_arimoto(ch: ClassicalChannel | np.ndarray, tol: float = 1e-12, max_iter: int = 100_000) -> CapacityResult:
    """Alternating maximisation of I(X:Y) over input distributions.

    Stops when the gap between the current mutual information and the upper
    bound max_x D(P(.|x)||q) falls below ``tol``; the reported capacity is
    therefore within ``tol`` of the true maximum when ``converged`` is set.
    """
    if not isinstance(ch, ClassicalChannel):
        ch = ClassicalChannel(ch)
    if tol <= 0:
        raise ValueError("tol must be positive")
    m = ch.matrix
    p = np.full(m.shape[0], 1.0 / m.shape[0])
    history = []
    lower = upper = 0.0
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        q = p @ m
        d = _divergences(m, q)
        lower = float(p @ d)
        upper = float(d.max())
        history.append(lower)
        if upper - lower < tol:
            converged = True
            break
        p = p * np.exp2(d)
        p /= p.sum()
    return CapacityResult(max(lower, 0.0), p, converged, it, upper, tuple(history))


def z_channel_capacity(flip: float) -> float:
    """Closed form for the Z channel whose '1' input flips to '0' with probability ``flip``."""
    if flip >= 1.0:
        return 0.0
    if flip <= 0.0:
        return 1.0
    return float(np.log2(1 + (1 - flip) * flip ** (flip / (1 - flip))))
