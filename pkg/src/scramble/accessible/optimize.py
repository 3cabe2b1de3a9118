"""Batched maximisation of register–outcome mutual information.

Every problem in a batch is described by square-root factors Ψ_x of the
measured conditional states (σ_x = Ψ_x Ψ_x†), register weights w_x, and a
unitary U whose columns are the measurement kets. The joint distribution is

    p(x, y) = w_x ‖U[:, y]† Ψ_x‖²

Optionally Ψ_x is generated from encoding kets a_x through a fixed
Stinespring tensor T (Ψ_x = T·a_x) so the encoding can be optimised too.

Search is two-stage: a coarse candidate set (a Bloch grid for qubits, seeded
Haar samples otherwise), then local ascent from the best ``restarts``
candidates along the unitary group (and the weight simplex). Problems never
share state, so results do not depend on how a batch is chunked.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..errors import ConfigurationError
from ..measures import random_unitary
from .encoding import bloch_basis

__all__ = [
    "OptimizerSettings",
    "AscentResult",
    "mutual_information_batch",
    "measurement_candidates",
    "encoding_grid",
    "ascend",
    "sup_over_measurements",
    "sup_over_channel",
]

_TINY = 1e-300


@dataclass(frozen=True)
class OptimizerSettings:
    grid: int = 24
    restarts: int = 5
    tol: float = 1e-8
    round_length: int = 20
    max_iter: int = 5000
    refine_xatol: float = 1e-5
    oracle_samples: int = 100_000
    seed: int = 0

    def __post_init__(self):
        if self.grid < 2:
            raise ConfigurationError("grid must be at least 2")
        if self.restarts < 1:
            raise ConfigurationError("restarts must be at least 1")
        if self.tol <= 0 or self.refine_xatol <= 0:
            raise ConfigurationError("tolerances must be positive")
        if self.round_length < 1 or self.max_iter < self.round_length:
            raise ConfigurationError("max_iter must cover at least one refinement round")
        if self.oracle_samples < 0:
            raise ConfigurationError("oracle_samples cannot be negative")

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, doc: dict) -> "OptimizerSettings":
        known = {f.name: f.type for f in dataclasses.fields(cls)}
        unknown = set(doc) - set(known)
        if unknown:
            raise ConfigurationError(f"unknown optimizer settings: {sorted(unknown)}")
        kwargs = {}
        for k, v in doc.items():
            default = getattr(cls, k)
            kwargs[k] = type(default)(v)
        return cls(**kwargs)

    def replace(self, **changes) -> "OptimizerSettings":
        return dataclasses.replace(self, **changes)


@dataclass
class AscentResult:
    value: np.ndarray
    u: np.ndarray
    a: np.ndarray | None
    w: np.ndarray
    converged: np.ndarray
    iterations: np.ndarray


def _dag(m):
    return np.conj(np.swapaxes(m, -1, -2))


def _evaluate(psi, w, u, grads=False, grad_psi=False):
    z = np.einsum("bsy,bxsr->bxyr", u.conj(), psi)
    c = (z.real ** 2 + z.imag ** 2).sum(-1)
    p = w[:, :, None] * c
    denom = p.sum(2)[:, :, None] * p.sum(1)[:, None, :]
    pos = p > _TINY
    logr = np.log2(np.where(pos, p, 1.0) / np.where(pos, np.maximum(denom, _TINY), 1.0))
    val = (p * logr).sum((1, 2))
    if not grads:
        return val
    # ∂I/∂p up to an additive constant that the constraints annihilate
    g = np.log2(np.maximum(p, _TINY) / np.maximum(denom, _TINY))
    g = np.where(w[:, :, None] > 0, g, 0.0)
    gw = g * w[:, :, None]
    gu = 2 * np.einsum("bxy,bxsr,bxyr->bsy", gw, psi, z.conj())
    gpsi = 2 * np.einsum("bxy,bsy,bxyr->bxsr", gw, u, z) if grad_psi else None
    gweights = (g * c).sum(2)
    return val, gu, gpsi, gweights


def mutual_information_batch(psi: np.ndarray, w: np.ndarray, u: np.ndarray) -> np.ndarray:
    """I(X:Y) in bits for each problem of a batch."""
    return _evaluate(psi, w, u)


def _riemannian(g, u):
    x = g @ _dag(u)
    return 0.5 * (x - _dag(x))


def _expm_skew(om, eta):
    # om is skew-Hermitian: om = -i h with h Hermitian
    lam, vec = np.linalg.eigh(1j * om)
    phase = np.exp(-1j * eta[:, None] * lam)
    return (vec * phase[:, None, :]) @ _dag(vec)


def _softmax(s):
    e = np.exp(s - s.max(axis=1, keepdims=True))
    return e / e.sum(axis=1, keepdims=True)


def _inner(x, y):
    # real inner product per problem over all trailing axes
    return np.real(np.conj(x) * y).reshape(x.shape[0], -1).sum(1)


def ascend(w: np.ndarray, u: np.ndarray, settings: OptimizerSettings, *, psi: np.ndarray | None = None,
           stine: np.ndarray | None = None, a: np.ndarray | None = None,
           optimize_weights: bool = False) -> AscentResult:
    """Local ascent of I(X:Y) from the given starting points.

    Pass fixed factors ``psi`` (B, X, d_S, r), or a Stinespring tensor ``stine``
    (d_S, e, d_in) together with starting encodings ``a`` (B, d_in, X) to also
    optimise the encoding. Steps are Polak-Ribière conjugate-gradient moves
    along the unitary group (directions live in the Lie algebra, so no vector
    transport is needed) with a per-problem accept/shrink step size. A problem
    stops once a round of ``round_length`` iterations improves it by less than
    ``settings.tol``.
    """
    u = np.array(u, dtype=complex)
    w = np.array(w, dtype=float)
    optimize_encoding = stine is not None
    if optimize_encoding:
        a = np.array(a, dtype=complex)
    elif psi is None:
        raise ValueError("either psi or stine/a must be given")
    b = u.shape[0]
    logits = np.log(np.maximum(w, _TINY)) if optimize_weights else None

    def evaluate(idx, u_, a_, w_):
        ps = np.einsum("sei,bix->bxse", stine, a_) if optimize_encoding else psi[idx]
        val_, gu_, gpsi_, gw_ = _evaluate(ps, w_, u_, grads=True, grad_psi=optimize_encoding)
        parts = [_riemannian(gu_, u_).reshape(len(idx), -1)]
        if optimize_encoding:
            ga_ = np.einsum("sei,bxse->bix", stine.conj(), gpsi_)
            parts.append(_riemannian(ga_, a_).reshape(len(idx), -1))
        if optimize_weights:
            parts.append(w_ * (gw_ - (w_ * gw_).sum(1, keepdims=True)))
        return val_, np.concatenate(parts, axis=1)

    du = u.shape[1] ** 2
    da = a.shape[1] ** 2 if optimize_encoding else 0

    def step(idx, direction, eta_):
        e = eta_
        u_new = _expm_skew(direction[:, :du].reshape(u[idx].shape), e) @ u[idx]
        a_new = l_new = None
        if optimize_encoding:
            a_new = _expm_skew(direction[:, du:du + da].reshape(a[idx].shape), e) @ a[idx]
        if optimize_weights:
            l_new = logits[idx] + e[:, None] * direction[:, du + da:].real
            w_new = _softmax(l_new)
        else:
            w_new = w[idx]
        return u_new, a_new, l_new, w_new

    everything = np.arange(b)
    val, grad = evaluate(everything, u, a, w)
    direction = grad.copy()

    eta = np.full(b, 0.5)
    active = np.ones(b, dtype=bool)
    converged = np.zeros(b, dtype=bool)
    iterations = np.zeros(b, dtype=int)
    round_start = val.copy()

    for it in range(1, settings.max_iter + 1):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        u_new, a_new, l_new, w_new = step(idx, direction[idx], eta[idx])
        v_new, g_new = evaluate(idx, u_new, a_new, w_new)
        better = v_new > val[idx]
        acc = idx[better]
        if acc.size:
            val[acc] = v_new[better]
            u[acc] = u_new[better]
            if optimize_encoding:
                a[acc] = a_new[better]
            if optimize_weights:
                w[acc] = w_new[better]
                logits[acc] = l_new[better]
            g_old = grad[acc]
            g = g_new[better]
            beta = np.maximum(0.0, _inner(g - g_old, g) / np.maximum(_inner(g_old, g_old), _TINY))
            d = g + beta[:, None] * direction[acc]
            uphill = _inner(d, g) > 0
            direction[acc] = np.where(uphill[:, None], d, g)
            grad[acc] = g
        eta[acc] = np.minimum(eta[acc] * 1.5, 50.0)
        rej = idx[~better]
        eta[rej] *= 0.3
        # a tiny step along a stale conjugate direction: fall back to steepest ascent
        reset = rej[eta[rej] < 1e-6]
        direction[reset] = grad[reset]
        iterations[idx] = it
        stuck = idx[eta[idx] < 1e-12]
        active[stuck] = False
        converged[stuck] = True
        if it % settings.round_length == 0:
            done = active & (val - round_start < settings.tol)
            converged |= done
            active &= ~done
            round_start = val.copy()
    return AscentResult(val, u, a, w, converged, iterations)


@lru_cache(maxsize=32)
def _candidates(d: int, n: int, seed: int) -> np.ndarray:
    if d == 2:
        t, p = np.meshgrid(np.linspace(0, np.pi, n), np.linspace(0, np.pi, n), indexing="ij")
        c = np.moveaxis(bloch_basis(t.ravel(), p.ravel()), -1, 0)
    else:
        rng = np.random.default_rng([seed, d, n])
        c = np.concatenate([np.eye(d, dtype=complex)[None], random_unitary(d, rng, size=n * n - 1)])
    c.flags.writeable = False
    return c


def measurement_candidates(d: int, settings: OptimizerSettings) -> np.ndarray:
    """Coarse measurement bases (N, d, d): an n×n Bloch grid, or computational + Haar samples."""
    return _candidates(d, settings.grid, settings.seed)


def encoding_grid(n_theta: int, n_phi: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """θ and φ grids over [0, π] (endpoints included)."""
    n_phi = n_theta if n_phi is None else n_phi
    return np.linspace(0, np.pi, n_theta), np.linspace(0, np.pi, n_phi)


def _coarse_values(psi, w, cands, budget=2_000_000):
    b, x, d, r = psi.shape
    n = cands.shape[0]
    out = np.empty((b, n))
    step = max(1, budget // max(1, n * x * d * r))
    for lo in range(0, b, step):
        ps = psi[lo:lo + step]
        z = np.einsum("nsy,bxsr->bnxyr", cands.conj(), ps)
        c = (z.real ** 2 + z.imag ** 2).sum(-1)
        m = ps.shape[0]
        p = (w[lo:lo + step, None, :, None] * c).reshape(m * n, x, d)
        wn = np.repeat(w[lo:lo + step], n, axis=0)
        # reuse the evaluator's formula without gradients
        denom = wn[:, :, None] * p.sum(1)[:, None, :]
        pos = p > _TINY
        out[lo:lo + step] = (p * np.log2(np.where(pos, p, 1.0) / np.where(pos, np.maximum(denom, _TINY), 1.0))
                             ).sum((1, 2)).reshape(m, n)
    return out


def _top(values, k):
    order = np.argsort(-values, axis=1, kind="stable")
    return order[:, :k]


def sup_over_measurements(psi: np.ndarray, w: np.ndarray, settings: OptimizerSettings) -> AscentResult:
    """Best projective measurement for each fixed ensemble in the batch."""
    psi = np.asarray(psi, dtype=complex)
    w = np.asarray(w, dtype=float)
    b, x, d, r = psi.shape
    cands = measurement_candidates(d, settings)
    k = min(settings.restarts, cands.shape[0])
    top = _top(_coarse_values(psi, w, cands), k)
    res = ascend(np.repeat(w, k, axis=0), cands[top.ravel()], settings, psi=np.repeat(psi, k, axis=0))
    vals = res.value.reshape(b, k)
    best = np.argmax(vals, axis=1)
    pick = np.arange(b) * k + best
    return AscentResult(vals[np.arange(b), best], res.u[pick], None, w, res.converged[pick], res.iterations[pick])


def sup_over_channel(stine: np.ndarray, settings: OptimizerSettings, optimize_weights: bool = True,
                     weights=None) -> AscentResult:
    """Joint search over qubit encoding bases, weights and measurements (k local starts)."""
    d_s, _, d_in = stine.shape
    if d_in != 2:
        raise ConfigurationError(f"channel-level search needs a qubit input, got dimension {d_in}")
    thetas, phis = encoding_grid(settings.grid)
    t, p = np.meshgrid(thetas, phis, indexing="ij")
    a = np.moveaxis(bloch_basis(t.ravel(), p.ravel()), -1, 0).conj()
    w0 = np.array([0.5, 0.5]) if weights is None else np.asarray(weights, dtype=float)
    psi = np.einsum("sei,bix->bxse", stine, a)
    cells = a.shape[0]
    wb = np.broadcast_to(w0, (cells, 2))
    cands = measurement_candidates(d_s, settings)
    coarse = _coarse_values(psi, wb, cands)
    best_cand = np.argmax(coarse, axis=1)
    cell_val = coarse[np.arange(cells), best_cand]
    k = min(settings.restarts, cells)
    top = np.argsort(-cell_val, kind="stable")[:k]
    return ascend(np.broadcast_to(w0, (k, 2)), cands[best_cand[top]], settings, stine=stine, a=a[top],
                  optimize_weights=optimize_weights)
