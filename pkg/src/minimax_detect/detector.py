"""Aggregated soft-detector and its thresholded decision rule."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .capacity import SolverConfig, solve_capacity, solve_capacity_batch
from .core import Channel, MinimaxDetectError, ScoreRecord, WeightVector, validate_channel


class GammaOutOfRange(MinimaxDetectError):
    pass


@dataclass(frozen=True)
class MixtureScore:
    p_adversarial: float
    weights: WeightVector
    capacity: float
    converged: bool = True


def aggregate(channel, config: SolverConfig | None = None) -> MixtureScore:
    """Mix the detectors with capacity-achieving weights.

    The returned probability is ``sum_k w_k rows[k][1]``, the adversarial
    mass of the optimal mixture. When every detector agrees the capacity is
    zero, the solver keeps its uniform start, and the mixture equals the
    common row.
    """
    if not isinstance(channel, Channel):
        channel = validate_channel(channel)
    res = solve_capacity(channel, config)
    p = float(res.weights.weights @ channel.rows[:, 1])
    return MixtureScore(min(max(p, 0.0), 1.0), res.weights, res.capacity, res.converged)


def detect(score, gamma: float) -> bool:
    """Hard decision: adversarial iff the mixture probability is strictly above ``gamma``."""
    if not 0.0 <= gamma <= 1.0:
        raise GammaOutOfRange(f"gamma must lie in [0, 1], got {gamma!r}")
    p = score.p_adversarial if isinstance(score, MixtureScore) else float(score)
    return p > gamma


def score_record(record: ScoreRecord, config: SolverConfig | None = None) -> MixtureScore:
    return aggregate(record.channel(), config)


def score_matrix(scores, config: SolverConfig | None = None):
    """Batch version of :func:`score_record` for an (N, K) array of detector scores.

    Returns ``(p_adversarial, weights, capacity, converged)`` arrays in input order.
    """
    s = np.asarray(scores, dtype=np.float64)
    if s.ndim != 2:
        raise MinimaxDetectError(f"expected an (N, K) score matrix, got shape {s.shape}")
    channels = np.stack([1.0 - s, s], axis=-1)
    w, cap, _, conv, _ = solve_capacity_batch(channels, config)
    p = np.clip(np.einsum("nk,nk->n", w, s), 0.0, 1.0)
    return p, w, cap, conv


def score_records(records, config: SolverConfig | None = None) -> list:
    """Score many records at once, preserving order. Records may differ in K."""
    records = list(records)
    out = [None] * len(records)
    by_k = {}
    for i, r in enumerate(records):
        by_k.setdefault(r.K, []).append(i)
    for idx in by_k.values():
        p, w, cap, conv = score_matrix([records[i].scores for i in idx], config)
        for j, i in enumerate(idx):
            out[i] = MixtureScore(float(p[j]), WeightVector(w[j]), float(cap[j]), bool(conv[j]))
    return out
