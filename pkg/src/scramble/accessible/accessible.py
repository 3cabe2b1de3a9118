"""Accessible information of states and channels and the tripartite quantities built on it."""
from __future__ import annotations

import csv
import io
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..errors import ConfigurationError, PartitionError
from ..tensor import Isometry, as_labels
from .channels import ClassicalQuantumEnsemble, InducedChannel, square_root_factors, stinespring_tensor
from .encoding import EncodingBasis, ProjectiveMeasurement, bloch_basis
from .optimize import OptimizerSettings, encoding_grid, sup_over_channel, sup_over_measurements

__all__ = [
    "AccessibleInfoResult",
    "TripartiteAccessibleResult",
    "SweepResult",
    "SWEEP_QUANTITIES",
    "accessible_info_fixed_encoding",
    "accessible_info_channel",
    "i3_acc",
    "j3_acc_fixed_encoding",
    "j3_acc_optimized",
    "basis_sweep",
    "pattern_search",
    "worker_count",
]

# values closer than this are treated as ties (inner sups are converged to ~1e-8)
_TIE = 1e-7
SWEEP_QUANTITIES = ("j3", "Iacc_RC", "Iacc_RD", "Iacc_RCD")


def worker_count(requested: int | None = None) -> int:
    """Worker processes for grid evaluation: ``requested``, else SCRAMBLE_THREADS, else 1."""
    if requested is None:
        raw = os.environ.get("SCRAMBLE_THREADS", "1")
        try:
            requested = int(raw)
        except ValueError:
            raise ConfigurationError(f"SCRAMBLE_THREADS must be an integer, got {raw!r}") from None
    return max(1, min(int(requested), os.cpu_count() or 1))


@dataclass(frozen=True, eq=False)
class AccessibleInfoResult:
    """Optimised register–outcome mutual information and what attains it."""

    value: float
    measured: tuple[str, ...]
    measurement: ProjectiveMeasurement
    weights: tuple[float, ...]
    converged: bool
    encoding: EncodingBasis | None = None
    # data needed to re-check the value independently (see oracle.py)
    factors: np.ndarray | None = field(default=None, repr=False)
    stinespring: np.ndarray | None = field(default=None, repr=False)

    def as_dict(self) -> dict:
        doc = {
            "value": float(self.value),
            "measured": list(self.measured),
            "weights": [float(x) for x in self.weights],
            "converged": bool(self.converged),
            "measurement": self.measurement.as_dict(),
        }
        if self.encoding is not None:
            doc["encoding"] = self.encoding.as_dict()
        return doc


@dataclass(frozen=True, eq=False)
class TripartiteAccessibleResult:
    """I(R:C) + I(R:D) − I(R:CD) with each accessible summand attached."""

    value: float
    c: tuple[str, ...]
    d: tuple[str, ...]
    summands: tuple[AccessibleInfoResult, AccessibleInfoResult, AccessibleInfoResult]
    encoding: EncodingBasis | None = None
    weights: tuple[float, ...] | None = None
    refined: bool = True

    @property
    def converged(self) -> bool:
        return self.refined and all(s.converged for s in self.summands)

    def as_dict(self) -> dict:
        doc = {
            "value": float(self.value),
            "C": list(self.c),
            "D": list(self.d),
            "converged": self.converged,
            "summands": {key: s.as_dict() for key, s in zip(("R:C", "R:D", "R:CD"), self.summands)},
        }
        if self.encoding is not None:
            doc["encoding"] = self.encoding.as_dict()
            doc["weights"] = [float(x) for x in self.weights]
        return doc


def _check_measured(v: Isometry, measured) -> tuple[str, ...]:
    measured = as_labels(measured)
    if not measured:
        raise PartitionError("nothing to measure")
    v.output_layout.indices(measured)
    if len(set(measured)) != len(measured):
        raise PartitionError(f"repeated labels in {measured}")
    return measured


def _check_pair(v: Isometry, c, d) -> tuple[tuple[str, ...], tuple[str, ...]]:
    c, d = _check_measured(v, c), _check_measured(v, d)
    if set(c) & set(d):
        raise PartitionError(f"C={c} and D={d} overlap")
    return c, d


def _measurement(u: np.ndarray, v: Isometry, measured) -> ProjectiveMeasurement:
    return ProjectiveMeasurement(u, v.output_layout.restrict(measured))


def _pick_canonical(values, a, w):
    """Index of the best start, ties broken by the smallest canonical encoding angles."""
    best = values.max()
    options = []
    for i in np.flatnonzero(values >= best - _TIE):
        basis, swapped = EncodingBasis.from_input_kets(a[i])
        weights = w[i][::-1] if swapped else w[i]
        options.append(((basis.theta, basis.phi), i, basis, weights))
    _, i, basis, weights = min(options, key=lambda o: (np.round(o[0], 6).tolist(), o[1]))
    return i, basis, weights


def accessible_info_fixed_encoding(ens: ClassicalQuantumEnsemble, ch: InducedChannel, measured=None,
                                   settings: OptimizerSettings | None = None) -> AccessibleInfoResult:
    """Best projective measurement on ``measured`` for a fixed ensemble sent through ``ch``."""
    settings = settings or OptimizerSettings()
    measured = ch.kept_labels if measured is None else _check_measured(ch.generator, measured)
    if not set(measured) <= set(ch.kept_labels):
        raise PartitionError(f"measured labels {measured} are not all kept by the channel {ch.kept_labels}")
    if ens.input_layout != ch.input_layout:
        raise ConfigurationError(f"ensemble lives on {ens.input_layout}, channel expects {ch.input_layout}")
    psi = square_root_factors(ens.conditional_states, ch.generator, measured)
    w = np.asarray(ens.weights, dtype=float)
    res = sup_over_measurements(psi[None], w[None], settings)
    return AccessibleInfoResult(float(max(res.value[0], 0.0)), measured, _measurement(res.u[0], ch.generator, measured),
                                tuple(float(x) for x in w), bool(res.converged[0]), factors=psi)


def accessible_info_channel(ch: InducedChannel, measured=None, settings: OptimizerSettings | None = None,
                            optimize_weights: bool = True, weights=None) -> AccessibleInfoResult:
    """Sup over qubit encoding bases, weights (optional) and measurements on ``measured``."""
    settings = settings or OptimizerSettings()
    measured = ch.kept_labels if measured is None else _check_measured(ch.generator, measured)
    if not set(measured) <= set(ch.kept_labels):
        raise PartitionError(f"measured labels {measured} are not all kept by the channel {ch.kept_labels}")
    return _channel_sup(ch.generator, measured, settings, optimize_weights, weights)


def _channel_sup(v: Isometry, measured, settings, optimize_weights=True, weights=None) -> AccessibleInfoResult:
    stine = stinespring_tensor(v, measured)
    res = sup_over_channel(stine, settings, optimize_weights=optimize_weights, weights=weights)
    i, basis, w = _pick_canonical(res.value, res.a, res.w)
    return AccessibleInfoResult(float(max(res.value[i], 0.0)), tuple(measured), _measurement(res.u[i], v, measured),
                                tuple(float(x) for x in w), bool(res.converged[i]), basis, stinespring=stine)


def i3_acc(v: Isometry, c, d, settings: OptimizerSettings | None = None, optimize_weights: bool = True,
           cache: dict | None = None) -> TripartiteAccessibleResult:
    """I_acc(R:C) + I_acc(R:D) − I_acc(R:CD), every summand optimised on its own.

    ``cache`` (keyed by measured labels) lets several pairs of the same
    isometry and settings share their channel-level summands.
    """
    settings = settings or OptimizerSettings()
    c, d = _check_pair(v, c, d)
    _require_qubit_input(v)
    cache = {} if cache is None else cache
    parts = []
    for m in (c, d, c + d):
        key = (tuple(sorted(m)), optimize_weights)
        if key not in cache:
            cache[key] = _channel_sup(v, m, settings, optimize_weights)
        parts.append(cache[key])
    parts = tuple(parts)
    return TripartiteAccessibleResult(parts[0].value + parts[1].value - parts[2].value, c, d, parts)


def _summands_at(stines, a, w, settings):
    """Measurement sups of the three summands for a batch of encodings a (B, 2, 2)."""
    return [sup_over_measurements(np.einsum("sei,bix->bxse", t, a), w, settings) for t in stines]


def _tripartite_from(v, c, d, stines, a, w, settings, encoding=None, refined=True):
    results = _summands_at(stines, a[None], w[None], settings)
    parts = []
    for m, t, r in zip((c, d, c + d), stines, results):
        psi = np.einsum("sei,ix->xse", t, a)
        parts.append(AccessibleInfoResult(float(max(r.value[0], 0.0)), m, _measurement(r.u[0], v, m),
                                          tuple(float(x) for x in w), bool(r.converged[0]), encoding, factors=psi))
    value = parts[0].value + parts[1].value - parts[2].value
    return TripartiteAccessibleResult(value, c, d, tuple(parts), encoding,
                                      tuple(float(x) for x in w) if encoding is not None else None, refined)


def j3_acc_fixed_encoding(v: Isometry, c, d, ens: ClassicalQuantumEnsemble,
                          settings: OptimizerSettings | None = None) -> TripartiteAccessibleResult:
    """The three summands at one common ensemble, each optimised over output measurements."""
    settings = settings or OptimizerSettings()
    c, d = _check_pair(v, c, d)
    if ens.input_layout != v.input_layout:
        raise ConfigurationError(f"ensemble lives on {ens.input_layout}, generator expects {v.input_layout}")
    w = np.asarray(ens.weights, dtype=float)
    parts = []
    for m in (c, d, c + d):
        psi = square_root_factors(ens.conditional_states, v, m)
        r = sup_over_measurements(psi[None], w[None], settings)
        parts.append(AccessibleInfoResult(float(max(r.value[0], 0.0)), m, _measurement(r.u[0], v, m),
                                          tuple(float(x) for x in w), bool(r.converged[0]), factors=psi))
    return TripartiteAccessibleResult(parts[0].value + parts[1].value - parts[2].value, c, d, tuple(parts))


# -- grids -------------------------------------------------------------------

def _grid_encodings(thetas, phis):
    t, p = np.meshgrid(thetas, phis, indexing="ij")
    return np.moveaxis(bloch_basis(t.ravel(), p.ravel()), -1, 0).conj()


def _grid_chunk(stines, a, w, settings, quantity):
    res = _summands_at(stines, a, w, settings)
    if quantity == "j3":
        values = res[0].value + res[1].value - res[2].value
    else:
        values = res[0].value
    flags = np.logical_and.reduce([r.converged for r in res])
    return values, flags


def _grid_values(stines, a, w, settings, quantity, workers):
    """Evaluate the grid in contiguous chunks; chunking never changes a cell's value."""
    n = a.shape[0]
    workers = worker_count(workers)
    if workers == 1 or n < 2 * workers:
        return _grid_chunk(stines, a, w, settings, quantity)
    bounds = np.linspace(0, n, workers + 1).astype(int)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(_grid_chunk, stines, a[lo:hi], w[lo:hi], settings, quantity)
                   for lo, hi in zip(bounds[:-1], bounds[1:]) if hi > lo]
        parts = [f.result() for f in futures]
    return np.concatenate([p[0] for p in parts]), np.concatenate([p[1] for p in parts])


def _stines_for(v, c, d, quantity):
    if quantity == "j3":
        return [stinespring_tensor(v, m) for m in (c, d, c + d)]
    measured = {"Iacc_RC": c, "Iacc_RD": d, "Iacc_RCD": c + d}[quantity]
    return [stinespring_tensor(v, measured)]


def _require_qubit_input(v: Isometry):
    if v.input_layout.dim != 2:
        raise ConfigurationError(f"encoding searches need a qubit input, got dimension {v.input_layout.dim}")


def pattern_search(objective, starts: np.ndarray, step: float, xatol: float, ftol: float,
                   max_polls: int = 500) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Batched compass search maximising ``objective`` from every row of ``starts``.

    Each round polls x ± h along every axis for all unfinished starts in one
    call of ``objective`` (which maps (m, n) points to (m,) values), moves to
    the best poll that improves by more than ``ftol`` and otherwise halves h.
    A start finishes when h < ``xatol``. Returns (points, values, converged).
    """
    x = np.array(starts, dtype=float)
    k, n = x.shape
    dirs = np.concatenate([np.eye(n), -np.eye(n)])
    f = objective(x)
    h = np.full(k, float(step))
    active = h >= xatol
    for _ in range(max_polls):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        polls = x[idx, None, :] + h[idx, None, None] * dirs[None]
        fp = objective(polls.reshape(-1, n)).reshape(idx.size, 2 * n)
        j = np.argmax(fp, axis=1)
        gain = fp[np.arange(idx.size), j]
        moved = gain > f[idx] + ftol
        x[idx[moved]] = polls[np.flatnonzero(moved), j[moved]]
        f[idx[moved]] = gain[moved]
        h[idx[~moved]] *= 0.5
        active[idx] = h[idx] >= xatol
    return x, f, ~active


def j3_acc_optimized(v: Isometry, c, d, settings: OptimizerSettings | None = None,
                     optimize_weights: bool = False, workers: int | None = None) -> TripartiteAccessibleResult:
    """Sup of the fixed-encoding tripartite quantity over encoding bases.

    Balanced weights unless ``optimize_weights`` (then the logit of p0 is a
    third search coordinate). The θ–φ grid is scanned first; a batched
    compass search then refines the best ``restarts`` cells.
    """
    settings = settings or OptimizerSettings()
    c, d = _check_pair(v, c, d)
    _require_qubit_input(v)
    stines = _stines_for(v, c, d, "j3")
    thetas, phis = encoding_grid(settings.grid)
    a = _grid_encodings(thetas, phis)
    half = np.full((a.shape[0], 2), 0.5)
    values, _ = _grid_values(stines, a, half, settings, "j3", workers)
    order = np.argsort(-np.round(values / _TIE), kind="stable")[: settings.restarts]
    starts = np.array([[thetas[k // len(phis)], phis[k % len(phis)]] for k in order])
    if optimize_weights:
        starts = np.hstack([starts, np.zeros((len(starts), 1))])

    def unpack(x):
        basis = np.moveaxis(bloch_basis(x[:, 0], x[:, 1]), -1, 0).conj()
        if optimize_weights:
            p0 = 1 / (1 + np.exp(-x[:, 2]))
            return basis, np.stack([p0, 1 - p0], axis=1)
        return basis, np.full((len(x), 2), 0.5)

    def objective(x):
        r = _summands_at(stines, *unpack(x), settings)
        return r[0].value + r[1].value - r[2].value

    x, f, done = pattern_search(objective, starts, 0.5 * np.pi / (settings.grid - 1),
                                settings.refine_xatol, max(settings.tol, _TIE))
    bases, ws = unpack(x)
    options = []
    for i in range(len(x)):
        enc, swapped = EncodingBasis.from_input_kets(bases[i])
        options.append((f[i], enc, ws[i][::-1] if swapped else ws[i]))
    top = max(o[0] for o in options)
    _, enc, w = min((o for o in options if o[0] >= top - _TIE), key=lambda o: (round(o[1].theta, 6), round(o[1].phi, 6)))
    return _tripartite_from(v, c, d, stines, enc.input_kets(), w, settings, enc, bool(done.all()))


@dataclass(frozen=True, eq=False)
class SweepResult:
    theta_grid: np.ndarray
    phi_grid: np.ndarray
    values: np.ndarray
    quantity_tag: str
    partition_tag: str
    flags: np.ndarray | None = None

    def __post_init__(self):
        shape = (len(self.theta_grid), len(self.phi_grid))
        if self.values.shape != shape:
            raise ValueError(f"values have shape {self.values.shape}, grids imply {shape}")
        if not np.isfinite(self.values).all():
            raise ValueError("sweep produced non-finite values")

    def argmax(self) -> tuple[float, float, float]:
        """(value, θ, φ) of the best cell; near-ties go to the smallest θ, then φ."""
        flat = self.values.ravel()
        k = int(np.flatnonzero(flat >= flat.max() - _TIE)[0])
        i, j = divmod(k, len(self.phi_grid))
        return float(flat[k]), float(self.theta_grid[i]), float(self.phi_grid[j])

    def rows(self):
        for i, t in enumerate(self.theta_grid):
            for j, p in enumerate(self.phi_grid):
                yield t, p, self.values[i, j]

    def to_csv(self, target=None) -> str:
        """Header ``theta,phi,value`` then one row per cell, 10 significant digits."""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["theta", "phi", "value"])
        for t, p, val in self.rows():
            writer.writerow([f"{t:.10g}", f"{p:.10g}", f"{val:.10g}"])
        text = buf.getvalue()
        if target is not None:
            with open(target, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        return text


def basis_sweep(v: Isometry, c, d, grid: Sequence[int] = (24, 24), quantity: str = "j3",
                settings: OptimizerSettings | None = None, workers: int | None = None) -> SweepResult:
    """Requested quantity on a θ×φ grid over [0, π]², balanced weights."""
    settings = settings or OptimizerSettings()
    if quantity not in SWEEP_QUANTITIES:
        raise ConfigurationError(f"unknown sweep quantity {quantity!r}; choose from {SWEEP_QUANTITIES}")
    n_theta, n_phi = (int(g) for g in grid)
    if n_theta < 2 or n_phi < 2:
        raise ConfigurationError(f"grid sizes must be at least 2, got {n_theta}x{n_phi}")
    c, d = _check_pair(v, c, d)
    _require_qubit_input(v)
    thetas, phis = encoding_grid(n_theta, n_phi)
    a = _grid_encodings(thetas, phis)
    values, flags = _grid_values(_stines_for(v, c, d, quantity), a, np.full((a.shape[0], 2), 0.5),
                                 settings, quantity, workers)
    tag = f"C={','.join(c)};D={','.join(d)}"
    return SweepResult(thetas, phis, values.reshape(n_theta, n_phi), quantity, tag, flags.reshape(n_theta, n_phi))
