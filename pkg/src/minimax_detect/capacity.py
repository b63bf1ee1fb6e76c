"""Optimal detector weights: maximise I(Omega; Z) over the simplex.

The objective is the capacity of a K-input binary-output channel, so the
classical multiplicative fixed-point update applies::

    q    = w @ rows
    D_k  = KL(rows[k] || q)
    w_k <- w_k exp(D_k) / Z

Each step never decreases the mutual information, and at the optimum
``max_k D_k`` equals the capacity. The difference
``max_k D_k - sum_k w_k D_k`` is an upper bound on the suboptimality of
the current weights and serves as the stopping rule.

:func:`grid_oracle` enumerates a simplex lattice and is used as an
independent check of the iteration.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import (Channel, LengthMismatch, MinimaxDetectError, ValidationError,
                   WeightVector, validate_channel)
from .infotheory import kl_rows, mutual_information


class ZeroInitialWeight(MinimaxDetectError):
    pass


class TooManyDetectors(MinimaxDetectError):
    pass


@dataclass(frozen=True)
class SolverConfig:
    tolerance: float = 1e-10
    max_iterations: int = 10_000
    initial_weights: Optional[WeightVector] = None

    def __post_init__(self):
        if not self.tolerance > 0:
            raise ValidationError(f"tolerance must be positive, got {self.tolerance!r}")
        if int(self.max_iterations) < 1:
            raise ValidationError(f"max_iterations must be >= 1, got {self.max_iterations!r}")
        object.__setattr__(self, "max_iterations", int(self.max_iterations))
        if self.initial_weights is not None and not isinstance(self.initial_weights, WeightVector):
            object.__setattr__(self, "initial_weights", WeightVector(self.initial_weights))


@dataclass(frozen=True)
class SolverResult:
    """Outcome of one capacity solve.

    ``history`` holds the mutual information evaluated at every iteration
    (empty for the oracle and for batch solves).
    """

    weights: WeightVector
    capacity: float
    iterations: int
    converged: bool
    final_gap: float
    history: tuple = field(default=(), repr=False)


def _as_channel(channel) -> Channel:
    return channel if isinstance(channel, Channel) else validate_channel(channel)


def _initial(config: SolverConfig, k: int) -> np.ndarray:
    if config.initial_weights is None:
        return np.full(k, 1.0 / k)
    w = np.array(config.initial_weights.weights, dtype=np.float64)
    if w.size != k:
        raise LengthMismatch(f"{w.size} initial weights for a channel with {k} rows")
    if np.any(w <= 0.0):
        raise ZeroInitialWeight("multiplicative updates cannot move a weight away from 0")
    return w


def solve_capacity(channel, config: SolverConfig | None = None) -> SolverResult:
    """Maximise the mutual information of ``channel`` over detector weights."""
    config = config or SolverConfig()
    rows = np.asarray(_as_channel(channel), dtype=np.float64)
    w = _initial(config, rows.shape[0])

    history = []
    converged = False
    for it in range(1, config.max_iterations + 1):
        d = kl_rows(rows, w @ rows)
        mi = float(w @ d)
        gap = float(d.max() - mi)
        history.append(mi)
        if gap <= config.tolerance:
            converged = True
            break
        if it == config.max_iterations:
            break
        # shift by max before exponentiating; cancels in the normalisation
        w = w * np.exp(d - d.max())
        w /= w.sum()

    return SolverResult(
        weights=WeightVector(w),
        capacity=max(mi, 0.0),
        iterations=it,
        converged=converged,
        final_gap=max(gap, 0.0),
        history=tuple(history),
    )


def solve_capacity_batch(channels, config: SolverConfig | None = None):
    """Vectorised :func:`solve_capacity` over a stack of channels.

    Parameters
    ----------
    channels : array_like, shape (N, K, 2)
        One row-stochastic matrix per input sample.
    config : SolverConfig, optional

    Returns
    -------
    weights : ndarray, shape (N, K)
    capacity : ndarray, shape (N,)
    iterations : ndarray of int, shape (N,)
    converged : ndarray of bool, shape (N,)
    final_gap : ndarray, shape (N,)

    Every channel follows exactly the iteration of :func:`solve_capacity`
    and stops as soon as its own gap meets the tolerance, so iteration
    counts match per-sample solves and values agree up to summation-order
    rounding.
    """
    config = config or SolverConfig()
    rows = np.asarray(channels, dtype=np.float64)
    if rows.ndim != 3 or rows.shape[2] != 2:
        raise ValidationError(f"expected an (N, K, 2) stack of channels, got shape {rows.shape}")
    n, k, _ = rows.shape
    w = np.tile(_initial(config, k), (n, 1))
    capacity = np.zeros(n)
    gaps = np.zeros(n)
    iterations = np.zeros(n, dtype=np.int64)
    converged = np.zeros(n, dtype=bool)

    active = np.arange(n)
    for it in range(1, config.max_iterations + 1):
        if active.size == 0:
            break
        r = rows[active]
        wa = w[active]
        q = np.einsum("nk,nkz->nz", wa, r)
        d = kl_rows(r, q[:, None, :])
        mi = np.einsum("nk,nk->n", wa, d)
        dmax = d.max(axis=1)
        gap = dmax - mi
        capacity[active] = mi
        gaps[active] = gap
        iterations[active] = it
        done = gap <= config.tolerance
        converged[active[done]] = True
        if it == config.max_iterations:
            break
        keep = ~done
        wk = wa[keep] * np.exp(d[keep] - dmax[keep, None])
        w[active[keep]] = wk / wk.sum(axis=1, keepdims=True)
        active = active[keep]

    return w, np.maximum(capacity, 0.0), iterations, converged, np.maximum(gaps, 0.0)


def simplex_lattice(k: int, resolution: int) -> np.ndarray:
    """All weight vectors with coordinates in ``{0, 1/R, ..., 1}``, in lexicographic order."""
    pts = [c + (resolution - sum(c),)
           for c in itertools.product(range(resolution + 1), repeat=k - 1)
           if sum(c) <= resolution]
    return np.array(pts, dtype=np.float64).reshape(-1, k) / resolution


def grid_oracle(channel, resolution: int) -> SolverResult:
    """Brute-force maximiser of the mutual information on a simplex lattice.

    Only for K <= 4; ties go to the lexicographically smallest weights.
    """
    rows = np.asarray(_as_channel(channel), dtype=np.float64)
    k = rows.shape[0]
    if k > 4:
        raise TooManyDetectors(f"grid oracle supports at most 4 detectors, got {k}")
    if int(resolution) < 2:
        raise ValidationError(f"resolution must be >= 2, got {resolution!r}")
    lattice = simplex_lattice(k, int(resolution))
    q = lattice @ rows
    mi = np.einsum("mk,mk->m", lattice, kl_rows(rows[None, :, :], q[:, None, :]))
    best = int(np.argmax(mi))  # first occurrence is the lexicographic minimum
    w = lattice[best]
    d = kl_rows(rows, w @ rows)
    return SolverResult(
        weights=WeightVector(w),
        capacity=mutual_information(w, rows),
        iterations=len(lattice),
        converged=True,
        final_gap=max(float(d.max() - w @ d), 0.0),
    )
