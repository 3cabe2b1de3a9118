"""Independent one-sided check of optimised accessible informations.

Draws Haar-random projective measurements (and, for channel-level values,
random encoding bases and weights) and records the best mutual information
seen. An optimiser that reports less than a random draw achieves is
under-optimising.
"""
from __future__ import annotations

import zlib
from dataclasses import dataclass

import numpy as np

from ..measures import random_unitary
from .accessible import AccessibleInfoResult
from .optimize import mutual_information_batch

__all__ = ["OracleCheck", "ORACLE_MARGIN", "random_measurement_oracle", "random_channel_oracle", "check_result"]

ORACLE_MARGIN = 1e-4


@dataclass(frozen=True)
class OracleCheck:
    optimizer_value: float
    best_sample: float
    samples: int
    margin: float = ORACLE_MARGIN

    @property
    def passed(self) -> bool:
        return self.best_sample <= self.optimizer_value + self.margin

    @property
    def status(self) -> str:
        if self.samples == 0:
            return "skipped"
        return "pass" if self.passed else "fail"

    def as_dict(self) -> dict:
        return {"status": self.status, "samples": self.samples, "best_sample": float(self.best_sample)}


def random_measurement_oracle(psi: np.ndarray, w: np.ndarray, samples: int, rng: np.random.Generator,
                              chunk: int = 10_000) -> float:
    """Best I(X:Y) over ``samples`` Haar-random bases for fixed factors psi (X, d, r)."""
    d = psi.shape[1]
    best = 0.0
    for lo in range(0, samples, chunk):
        n = min(chunk, samples - lo)
        u = random_unitary(d, rng, size=n)
        vals = mutual_information_batch(np.broadcast_to(psi, (n,) + psi.shape), np.broadcast_to(w, (n, len(w))), u)
        best = max(best, float(vals.max()))
    return best


def random_channel_oracle(stine: np.ndarray, samples: int, rng: np.random.Generator, weights=None,
                          chunk: int = 10_000) -> float:
    """Best I(X:Y) over random encodings, weights (unless fixed) and measurements."""
    d_s, _, d_in = stine.shape
    best = 0.0
    for lo in range(0, samples, chunk):
        n = min(chunk, samples - lo)
        a = random_unitary(d_in, rng, size=n)
        if weights is None:
            p0 = rng.uniform(size=n)
            w = np.stack([p0, 1 - p0], axis=1)
        else:
            w = np.broadcast_to(np.asarray(weights, dtype=float), (n, 2))
        psi = np.einsum("sei,bix->bxse", stine, a)
        vals = mutual_information_batch(psi, w, random_unitary(d_s, rng, size=n))
        best = max(best, float(vals.max()))
    return best


def check_result(result: AccessibleInfoResult, samples: int, seed: int = 0,
                 optimize_weights: bool = True) -> OracleCheck:
    """Random-sampling check matched to how ``result`` was optimised."""
    if samples <= 0:
        return OracleCheck(result.value, 0.0, 0)
    key = zlib.crc32(",".join(result.measured).encode())
    rng = np.random.default_rng([seed, key])
    if result.stinespring is not None:
        fixed = None if optimize_weights else result.weights
        best = random_channel_oracle(result.stinespring, samples, rng, weights=fixed)
    else:
        best = random_measurement_oracle(result.factors, np.asarray(result.weights), samples, rng)
    return OracleCheck(result.value, best, samples)
