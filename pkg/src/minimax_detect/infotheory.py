"""Entropy-style quantities for a K-input, binary-output channel.

All values are in nats. Denominators are clamped from below at ``EPS``
so that degenerate detector outputs (exact 0 or 1) keep every quantity
finite; this differs from the extended-real convention where
``KL(p || q) = inf`` whenever ``q`` misses mass that ``p`` has. There is no
upper clamp, so ``KL(p || p)`` is exactly 0 even for one-hot ``p``.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .core import LengthMismatch

EPS = 1e-12
NEG_TOL = 1e-12


def _clamp_nats(value):
    # tiny negatives come from cancellation, not from real negative divergences
    if -NEG_TOL <= value < 0.0:
        return 0.0
    return float(value)


def _pair(p):
    arr = np.asarray(p, dtype=np.float64)
    if arr.shape[-1] != 2:
        raise LengthMismatch(f"binary distributions need 2 entries, got shape {arr.shape}")
    return arr


def kl_rows(p, q):
    """Row-wise KL divergence ``sum_z p(z) ln(p(z)/q(z))`` over the last axis.

    Broadcasts ``p`` against ``q``. Terms with ``p(z) = 0`` contribute 0 and
    ``q`` is raised to at least ``EPS`` before division.
    """
    p = np.asarray(p, dtype=np.float64)
    q = np.maximum(np.asarray(q, dtype=np.float64), EPS)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(p > 0.0, p * (np.log(np.where(p > 0.0, p, 1.0)) - np.log(q)), 0.0)
    return terms.sum(axis=-1)


def kl_divergence(p, q) -> float:
    """KL divergence between two binary distributions, in nats.

    >>> round(kl_divergence((1.0, 0.0), (0.5, 0.5)), 6)
    0.693147
    """
    return _clamp_nats(kl_rows(_pair(p), _pair(q)))


def binary_entropy(p) -> float:
    """Entropy in nats of a Bernoulli(p) variable."""
    p = float(p)
    if p <= 0.0 or p >= 1.0:
        return 0.0
    return float(-p * np.log(p) - (1.0 - p) * np.log1p(-p))


def _weights_and_rows(weights, channel):
    w = np.asarray(weights, dtype=np.float64).ravel()
    rows = np.asarray(channel, dtype=np.float64)
    if rows.ndim != 2 or rows.shape[1] != 2:
        raise LengthMismatch(f"channel must be K x 2, got shape {rows.shape}")
    if w.size != rows.shape[0]:
        raise LengthMismatch(f"{w.size} weights for a channel with {rows.shape[0]} rows")
    return w, rows


def marginal(weights, channel) -> np.ndarray:
    """Output distribution of the mixture: ``P(z) = sum_k w_k rows[k][z]``."""
    w, rows = _weights_and_rows(weights, channel)
    return w @ rows


def mutual_information(weights, channel) -> float:
    """I(Omega; Z) for weights ``w`` on the detectors and the given channel.

    Computed as ``sum_k w_k KL(rows[k] || marginal)``; bounded by ``ln 2``.
    """
    w, rows = _weights_and_rows(weights, channel)
    return _clamp_nats(w @ kl_rows(rows, w @ rows))


class RegretDecomposition(NamedTuple):
    expected_regret: float
    mi: float
    gap: float


def regret_decomposition(weights, channel, q) -> RegretDecomposition:
    """Split the expected regret of a candidate detector ``q``.

    ``E_w[KL(rows[k] || q)] = I(Omega; Z) + KL(marginal || q)``, so the
    expected regret is minimised exactly when ``q`` is the mixture marginal.
    """
    w, rows = _weights_and_rows(weights, channel)
    q = _pair(q)
    expected = _clamp_nats(w @ kl_rows(rows, q))
    mi = mutual_information(w, rows)
    gap = kl_divergence(w @ rows, q)
    return RegretDecomposition(expected, mi, gap)
