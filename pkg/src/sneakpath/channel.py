"""Crossbar array channel: selector failures, sneak paths, noisy readout.

An N x N crossbar stores one bit per cell: '1' = low-resistance state
(LRS, nominal ``r1``), '0' = high-resistance state (HRS, nominal ``r0``).
Reading an HRS cell (i, j) is corrupted when some rectangle
(i, v), (u, v), (u, j) of LRS cells exists with a failed selector at the
diagonal cell (u, v); the parasitic branch ``r_sp`` then appears in
parallel with ``r0``.  Additive Gaussian noise models everything else.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .rng import STREAM_DATA, STREAM_FAILURES, STREAM_NOISE, derive_rng


@dataclass(frozen=True)
class ChannelParams:
    """Operating point of the crossbar read channel."""

    n: int = 16
    r0: float = 1000.0
    r1: float = 100.0
    r_sp: float = 250.0
    sigma: float = 0.0
    p_f: float = 0.0

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("array side length must be >= 2")
        if not (self.r0 > self.r1 > 0.0):
            raise ValueError("need r0 > r1 > 0")
        if self.r_sp <= 0.0:
            raise ValueError("r_sp must be positive")
        if self.sigma < 0.0:
            raise ValueError("sigma must be nonnegative")
        if not 0.0 <= self.p_f <= 1.0:
            raise ValueError("p_f must lie in [0, 1]")

    @property
    def r0_sp(self) -> float:
        """HRS resistance with an active parasitic branch (r0 || r_sp)."""
        return 1.0 / (1.0 / self.r0 + 1.0 / self.r_sp)


def _check_binary(a: np.ndarray, name: str) -> np.ndarray:
    a = np.asarray(a)
    if a.ndim != 2:
        raise ValueError(f"{name} must be a 2-D matrix")
    if not np.isin(a, (0, 1)).all():
        raise ValueError(f"{name} must be binary")
    return a.astype(np.int64, copy=False)


def random_array(n: int, q: float, rng_or_seed) -> np.ndarray:
    """Sample an n x n data array with i.i.d. Bernoulli(q) entries."""
    if not 0.0 <= q <= 1.0:
        raise ValueError("q must lie in [0, 1]")
    rng = _as_rng(rng_or_seed, STREAM_DATA)
    return (rng.random((n, n)) < q).astype(np.int64)


def sample_failures(params: ChannelParams, rng_or_seed) -> np.ndarray:
    """Sample the selector failure mask, i.i.d. Bernoulli(p_f) per cell."""
    rng = _as_rng(rng_or_seed, STREAM_FAILURES)
    return (rng.random((params.n, params.n)) < params.p_f).astype(np.int64)


def _as_rng(rng_or_seed, stream: int) -> np.random.Generator:
    if isinstance(rng_or_seed, np.random.Generator):
        return rng_or_seed
    return derive_rng(int(rng_or_seed), 0, stream)


def count_active_configs(a: np.ndarray, fails: np.ndarray) -> np.ndarray:
    """Per-cell count of active sneak-path rectangles around each cell.

    Entry (i, j) counts pairs (u, v), u != i, v != j, with
    A[i, v] = A[u, v] = A[u, j] = 1 and a failed selector at (u, v).
    The count ignores the state of the target cell itself, so it is also
    the quantity behind the analytic no-sneak-path probability.
    """
    a = _check_binary(a, "cell array")
    fails = _check_binary(fails, "failure mask")
    if a.shape != fails.shape:
        raise ValueError("cell array and failure mask dimensions differ")
    g = a & fails  # failed LRS diagonal cells
    full = a @ g.T @ a
    # Remove u == i and v == j terms (double-subtracted (i,j) added back).
    rs = g.sum(axis=1)
    cs = g.sum(axis=0)
    return full - a * (rs[:, None] + cs[None, :] - g)


def compute_sneak_mask(a: np.ndarray, fails: np.ndarray) -> np.ndarray:
    """Mark the HRS cells whose readout is sneak-path-affected."""
    a = _check_binary(a, "cell array")
    cnt = count_active_configs(a, fails)
    return ((cnt > 0) & (a == 0)).astype(np.int64)


def count_possible_sneak_paths(a: np.ndarray) -> int:
    """Total number of possible sneak paths in a stored array.

    A possible path needs only the data pattern: an HRS target with three
    LRS cells at the remaining rectangle corners.  Selector state is
    ignored, so this is the quantity the constrained code minimizes.
    """
    a = _check_binary(a, "cell array")
    # For an HRS target the u == i and v == j terms vanish on their own.
    return int(((a @ a.T @ a) * (1 - a)).sum())


def read_array(a: np.ndarray, e: np.ndarray, params: ChannelParams, rng_or_seed) -> np.ndarray:
    """Measured resistances per Eq-style readout: nominal value plus noise."""
    a = _check_binary(a, "cell array")
    e = _check_binary(e, "sneak mask")
    if a.shape != e.shape:
        raise ValueError("cell array and sneak mask dimensions differ")
    nominal = np.where(a == 1, params.r1, np.where(e == 1, params.r0_sp, params.r0))
    if params.sigma == 0.0:
        return nominal.astype(np.float64)
    rng = _as_rng(rng_or_seed, STREAM_NOISE)
    return nominal + rng.normal(0.0, params.sigma, a.shape)


def transmit(a: np.ndarray, params: ChannelParams, fail_rng, noise_rng) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """One full channel use: sample failures, resolve sneak paths, read.

    Returns (failure mask, sneak mask, read array).
    """
    fails = sample_failures(params, fail_rng)
    e = compute_sneak_mask(a, fails)
    return fails, e, read_array(a, e, params, noise_rng)
