"""Parameterised encoding bases and projective measurements."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import MeasurementError, ValidationError
from ..tensor import Ket, SubsystemLayout

__all__ = [
    "givens_pairs",
    "givens_unitary",
    "givens_parameters",
    "bloch_basis",
    "EncodingBasis",
    "ProjectiveMeasurement",
]

_ANGLE_TOL = 1e-9
_THETA_TIE = 1e-6


def givens_pairs(d: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(d) for j in range(i + 1, d)]


def givens_unitary(params, d: int) -> np.ndarray:
    """Product of two-level rotations G_01 G_02 … G_{d-2,d-1}.

    Each rotation takes a (θ, φ) pair and acts on levels (i, j) as
    [[cos θ/2, -e^{-iφ} sin θ/2], [e^{iφ} sin θ/2, cos θ/2]], so for d = 2 the
    first column is the Bloch-sphere ket with angles (θ, φ). ``params`` may
    carry leading batch axes; its last axis has length d(d-1).
    """
    params = np.asarray(params, dtype=float)
    batch = params.shape[:-1]
    if params.shape[-1] != d * (d - 1):
        raise ValueError(f"need {d * (d - 1)} parameters for d={d}, got {params.shape[-1]}")
    u = np.broadcast_to(np.eye(d, dtype=complex), batch + (d, d)).copy()
    for k, (i, j) in enumerate(givens_pairs(d)):
        c = np.cos(params[..., 2 * k] / 2)[..., None]
        s = np.sin(params[..., 2 * k] / 2)[..., None]
        e = np.exp(1j * params[..., 2 * k + 1])[..., None]
        ui, uj = u[..., :, i].copy(), u[..., :, j].copy()
        u[..., :, i] = c * ui + e * s * uj
        u[..., :, j] = -np.conj(e) * s * ui + c * uj
    return u


def givens_parameters(u: np.ndarray) -> np.ndarray:
    """Inverse of :func:`givens_unitary` up to column phases.

    Column phases never change a rank-1 projective measurement, so
    ``givens_unitary(givens_parameters(u))`` spans the same projectors as ``u``.
    """
    m = np.array(u, dtype=complex)
    d = m.shape[0]
    params = np.zeros(d * (d - 1))
    for k, (i, j) in enumerate(givens_pairs(d)):
        xi, xj = m[i, i], m[j, i]
        theta = 2 * np.arctan2(abs(xj), abs(xi))
        phi = (np.angle(xj) - np.angle(xi)) if abs(xj) > 1e-15 else 0.0
        phi = float(np.mod(phi, 2 * np.pi))
        params[2 * k], params[2 * k + 1] = theta, phi
        c, s, e = np.cos(theta / 2), np.sin(theta / 2), np.exp(1j * phi)
        ri, rj = m[i].copy(), m[j].copy()
        m[i] = c * ri + np.conj(e) * s * rj
        m[j] = -e * s * ri + c * rj
    return params


def bloch_basis(theta, phi) -> np.ndarray:
    """2×2 matrix whose columns are the Bloch ket at (θ, φ) and its complement."""
    c, s, e = np.cos(theta / 2), np.sin(theta / 2), np.exp(1j * phi)
    return np.array([[c, s], [e * s, -e * c]], dtype=complex)


def _canonical_angles(theta: float, phi: float) -> tuple[float, float, bool]:
    """Representative of the basis {n, -n} with θ, φ ∈ [0, π]; flag = labels swapped."""
    theta = float(np.mod(theta, 2 * np.pi))
    if theta > np.pi:
        theta, phi = 2 * np.pi - theta, phi + np.pi
    options = []
    for t, p, swapped in ((theta, phi, False), (np.pi - theta, phi + np.pi, True)):
        if t < _ANGLE_TOL or t > np.pi - _ANGLE_TOL:
            p = 0.0
        p = float(np.mod(p, 2 * np.pi))
        if p > 2 * np.pi - _ANGLE_TOL:
            p = 0.0
        if p <= np.pi + _ANGLE_TOL:
            options.append((round(t, 12), round(min(p, np.pi), 12), swapped))
    # optimised angles are only meaningful to ~1e-6, so nearly equal θ compare by φ
    return min(options, key=lambda o: (round(o[0] / _THETA_TIE), o[1]))


@dataclass(frozen=True)
class EncodingBasis:
    """Orthonormal qubit pair used to write one classical bit into a channel.

    The angles describe the register-side basis
    ``{cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩, its orthogonal complement}``.
    Preparing the input by measuring the register half of a maximally entangled
    pair in this basis steers the channel input into the complex-conjugate kets,
    which are what :meth:`input_kets` returns and what is fed to the isometry.
    """

    theta: float
    phi: float

    def __post_init__(self):
        k = self.register_kets()
        if not np.allclose(k.conj().T @ k, np.eye(2), atol=1e-12):
            raise ValidationError("encoding kets are not orthonormal")

    @classmethod
    def computational(cls) -> "EncodingBasis":
        return cls(0.0, 0.0)

    @classmethod
    def plus_minus(cls) -> "EncodingBasis":
        return cls(np.pi / 2, 0.0)

    def register_kets(self) -> np.ndarray:
        return bloch_basis(self.theta, self.phi)

    def input_kets(self) -> np.ndarray:
        """Columns are the channel input states for register values 0 and 1."""
        return self.register_kets().conj()

    def canonical(self) -> tuple["EncodingBasis", bool]:
        """Tie-broken representative (smallest θ, then φ) and whether labels swapped."""
        t, p, swapped = _canonical_angles(self.theta, self.phi)
        return EncodingBasis(t, p), swapped

    @classmethod
    def from_input_kets(cls, a: np.ndarray) -> tuple["EncodingBasis", bool]:
        """Canonical basis whose input kets span the columns of the unitary ``a``."""
        r0 = np.conj(a[:, 0])
        theta = 2 * np.arctan2(abs(r0[1]), abs(r0[0]))
        phi = float(np.angle(r0[1]) - np.angle(r0[0])) if abs(r0[1]) > 1e-15 and abs(r0[0]) > 1e-15 else 0.0
        return cls(theta, phi).canonical()

    def as_dict(self) -> dict:
        return {"theta": float(self.theta), "phi": float(self.phi)}


@dataclass(frozen=True, eq=False)
class ProjectiveMeasurement:
    """Complete rank-1 projective measurement on the subsystems of ``layout``.

    ``basis`` holds the measurement kets as columns; ``parameters`` is the
    two-level-rotation vector that generates it (Bloch angles for a qubit).
    """

    basis: np.ndarray
    layout: SubsystemLayout
    parameters: np.ndarray | None = None

    def __post_init__(self):
        b = np.array(self.basis, dtype=complex, copy=True)
        d = self.layout.dim
        if b.ndim != 2 or b.shape[0] != d:
            raise MeasurementError(f"measurement kets must have dimension {d}, got shape {b.shape}")
        if b.shape[1] != d:
            raise MeasurementError(f"incomplete measurement: {b.shape[1]} kets for a {d}-dimensional space")
        if not np.allclose(b.conj().T @ b, np.eye(d), atol=1e-10, rtol=0):
            raise MeasurementError("measurement kets are not orthonormal")
        b.flags.writeable = False
        object.__setattr__(self, "basis", b)
        if self.parameters is None:
            object.__setattr__(self, "parameters", givens_parameters(b))

    @classmethod
    def computational(cls, layout: SubsystemLayout) -> "ProjectiveMeasurement":
        return cls(np.eye(layout.dim), layout)

    @classmethod
    def from_parameters(cls, params, layout: SubsystemLayout) -> "ProjectiveMeasurement":
        params = np.asarray(params, dtype=float)
        return cls(givens_unitary(params, layout.dim), layout, params)

    @classmethod
    def bloch(cls, theta: float, phi: float, label: str = "S") -> "ProjectiveMeasurement":
        return cls.from_parameters([theta, phi], SubsystemLayout.of((label, 2)))

    @property
    def labels(self) -> tuple[str, ...]:
        return self.layout.labels

    def kets(self) -> list[Ket]:
        return [Ket(self.basis[:, y], self.layout) for y in range(self.layout.dim)]

    def projectors(self) -> np.ndarray:
        return np.einsum("sy,ty->yst", self.basis, self.basis.conj())

    def as_dict(self) -> dict:
        return {
            "labels": list(self.labels),
            "parameters": [float(x) for x in self.parameters],
            "basis_real": np.round(self.basis.real, 12).tolist(),
            "basis_imag": np.round(self.basis.imag, 12).tolist(),
        }
