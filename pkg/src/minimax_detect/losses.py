"""Attacker objective losses over class-probability vectors.

These are the four objectives used to diversify attack variants: adversarial
cross-entropy, KL divergence, Fisher-Rao distance and Gini impurity. They
are formula implementations only; nothing here crafts perturbations.
"""

from __future__ import annotations

import numpy as np

from .core import LengthMismatch, STOCHASTIC_TOL, ValidationError

EPS = 1e-12


def class_distribution(probs) -> np.ndarray:
    """Validate a class-probability vector (C >= 2, entries in [0, 1], sums to 1)."""
    p = np.asarray(probs, dtype=np.float64)
    if p.ndim != 1 or p.size < 2:
        raise ValidationError(f"class distribution needs at least 2 classes, got shape {p.shape}")
    if not np.all(np.isfinite(p)) or np.any(p < 0.0) or np.any(p > 1.0):
        raise ValidationError(f"class probabilities must lie in [0, 1]: {p.tolist()}")
    if abs(p.sum() - 1.0) > STOCHASTIC_TOL:
        raise ValidationError(f"class probabilities sum to {p.sum()!r}, expected 1")
    return p


def _pair(a, b):
    a, b = class_distribution(a), class_distribution(b)
    if a.size != b.size:
        raise LengthMismatch(f"distributions over {a.size} and {b.size} classes")
    return a, b


def ace_loss(truth, adv) -> float:
    """Cross-entropy of the adversarial prediction against the true label distribution.

    Pass a one-hot ``truth`` for hard labels.
    """
    t, a = _pair(truth, adv)
    return float(-(t * np.log(np.maximum(a, EPS))).sum())


def kl_loss(clean, adv) -> float:
    """KL(clean || adv) between clean and adversarial predictions."""
    c, a = _pair(clean, adv)
    a = np.maximum(a, EPS)
    nz = c > 0
    return max(float((c[nz] * (np.log(c[nz]) - np.log(a[nz]))).sum()), 0.0)


def fr_loss(clean, adv) -> float:
    """Fisher-Rao distance ``2 arccos(sum_y sqrt(clean_y adv_y))``, in [0, pi].

    Evaluated as ``4 arcsin(||sqrt(clean) - sqrt(adv)|| / 2)``, the same
    quantity for normalised inputs, because arccos loses half its digits
    next to 1 and near-identical distributions would come out around 1e-8.
    """
    c, a = _pair(clean, adv)
    half_chord = np.clip(np.linalg.norm(np.sqrt(c) - np.sqrt(a)) / 2.0, 0.0, np.sqrt(0.5))
    return float(4.0 * np.arcsin(half_chord))


def gini_loss(adv, clean=None) -> float:
    """Gini impurity score ``1 - sqrt(sum_y adv_y^2)``.

    ``clean`` is accepted for call-signature symmetry and ignored.
    """
    a = class_distribution(adv)
    return float(1.0 - np.sqrt((a * a).sum()))


LOSSES = {
    "ACE": ace_loss,
    "KL": kl_loss,
    "FR": fr_loss,
    "Gini": lambda clean, adv: gini_loss(adv),
}


def evaluate_loss(name: str, clean, adv) -> float:
    """Look up a loss by name (case-insensitive) and apply it to ``(clean, adv)``."""
    for key, fn in LOSSES.items():
        if key.lower() == name.lower():
            return fn(clean, adv)
    raise ValidationError(f"unknown loss {name!r}; expected one of {tuple(LOSSES)}")
