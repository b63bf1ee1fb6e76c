"""Multi-armed (simultaneous-attack) evaluation.

A natural sample attacked by every member of a group counts as detected
only when *all* of its fooling variants are flagged. Thresholding the
minimum member score gives exactly that rule (``min > g`` iff every score
``> g``), so each (sample, group) pair collapses to one scalar and the usual
ROC machinery applies unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np

from .capacity import SolverConfig
from .core import AttackGroup, AttackKey, MinimaxDetectError, Role, ScoreRecord, ValidationError
from .detector import MixtureScore, score_records


class EmptyClass(MinimaxDetectError):
    exit_code = 3


class UnknownAttack(MinimaxDetectError):
    exit_code = 3


class DuplicateRecord(MinimaxDetectError):
    exit_code = 3


@dataclass(frozen=True)
class GroupedScores:
    group: AttackGroup
    positives: list
    negatives: list
    #: capacities of the fooling member records that fed the positives
    capacities: list = field(default_factory=list, repr=False)


@dataclass(frozen=True)
class GroupMetrics:
    label: str
    norm: str
    epsilon: Optional[float]
    n_members: int
    auroc: float
    fpr_at_95_tpr: float
    threshold_at_95: float
    n_positives: int
    n_negatives: int
    mean_capacity: float


@dataclass
class EvaluationReport:
    """Per-group metrics for the mixture detector, plus optional baselines.

    ``baselines`` maps ``"det_k"`` to the metrics obtained by putting all
    weight on detector ``k``. ``roc`` maps detector name then group label to
    ``(thresholds, fpr, tpr)`` arrays when a ROC dump was requested.
    """

    groups: list
    mean_auroc: float
    mean_fpr_at_95_tpr: float
    n_records: int
    n_solves: int
    n_unconverged: int
    target_tpr: float = 0.95
    skipped_groups: list = field(default_factory=list)
    baselines: dict = field(default_factory=dict)
    roc: dict = field(default_factory=dict, repr=False)


def _as_float(score):
    return score.p_adversarial if isinstance(score, MixtureScore) else float(score)


def _group_index(groups: Sequence[AttackGroup]):
    index = {}
    for gi, g in enumerate(groups):
        for m in g.members:
            if m in index:
                raise ValidationError(f"attack {m} appears in more than one group")
            index[m] = gi
    return index


def build_groups(records: Sequence[ScoreRecord], groups: Sequence[AttackGroup],
                 scores: Mapping) -> list:
    """Collapse member scores into one group score per (sample, group).

    ``scores`` maps ``sample_id -> {attack_key: score}``; natural records use
    ``None`` as their key. Scores may be floats or :class:`MixtureScore`.
    Variants that did not fool the classifier are dropped; a sample with no
    fooling variant in a group contributes no positive there. Natural
    negatives are shared by every group.
    """
    index = _group_index(groups)
    seen = set()
    negatives = []
    per_group = [dict() for _ in groups]
    caps = [[] for _ in groups]
    for rec in records:
        ident = (rec.sample_id, rec.attack)
        if ident in seen:
            what = "natural" if rec.attack is None else str(rec.attack)
            raise DuplicateRecord(f"sample {rec.sample_id!r} has two records for {what}")
        seen.add(ident)
        raw = scores[rec.sample_id][rec.attack]
        s = _as_float(raw)
        if rec.role is Role.NATURAL:
            negatives.append((rec.sample_id, s))
            continue
        gi = index.get(rec.attack)
        if gi is None:
            raise UnknownAttack(f"attack {rec.attack} of sample {rec.sample_id!r} matches no group")
        if not rec.fooled:
            continue
        bucket = per_group[gi]
        bucket[rec.sample_id] = min(bucket.get(rec.sample_id, s), s)
        if isinstance(raw, MixtureScore):
            caps[gi].append(raw.capacity)
    return [GroupedScores(g, list(per_group[gi].items()), list(negatives), caps[gi])
            for gi, g in enumerate(groups)]


def _scores(values):
    arr = np.asarray([v[1] if isinstance(v, tuple) else v for v in values], dtype=np.float64)
    return arr.ravel()


def _check(pos, neg):
    if pos.size == 0:
        raise EmptyClass("no positive (adversarial) scores")
    if neg.size == 0:
        raise EmptyClass("no negative (natural) scores")


def auroc(positives, negatives) -> float:
    """Mann-Whitney AUROC: P(pos > neg) + P(pos == neg) / 2."""
    pos, neg = _scores(positives), _scores(negatives)
    _check(pos, neg)
    neg = np.sort(neg)
    below = np.searchsorted(neg, pos, side="left")
    not_above = np.searchsorted(neg, pos, side="right")
    wins = below.sum() + 0.5 * (not_above - below).sum()
    return float(wins / (pos.size * neg.size))


def roc_curve(positives, negatives):
    """Empirical ROC over every distinct observed score.

    Returns ``(thresholds, fpr, tpr)`` ordered from the strictest threshold
    (the maximum score, where nothing is flagged) down to ``-inf``. A score
    is flagged when it is strictly above the threshold.
    """
    pos, neg = _scores(positives), _scores(negatives)
    _check(pos, neg)
    thresholds = np.concatenate([np.unique(np.concatenate([pos, neg]))[::-1], [-np.inf]])
    ps, ns = np.sort(pos), np.sort(neg)
    tpr = (pos.size - np.searchsorted(ps, thresholds, side="right")) / pos.size
    fpr = (neg.size - np.searchsorted(ns, thresholds, side="right")) / neg.size
    return thresholds, fpr, tpr


def trapezoid_auc(fpr, tpr) -> float:
    fpr, tpr = np.asarray(fpr, dtype=np.float64), np.asarray(tpr, dtype=np.float64)
    return float(np.sum(np.diff(fpr) * (tpr[1:] + tpr[:-1]) / 2.0))


def fpr_at_tpr(positives, negatives, target_tpr: float = 0.95):
    """FPR at the strictest observed threshold that still detects ``target_tpr`` of positives.

    Candidate thresholds are the observed scores plus ``-inf``; no
    interpolation between achievable operating points. Returns
    ``(fpr, threshold)``.
    """
    if not 0.0 < target_tpr <= 1.0:
        raise ValidationError(f"target_tpr must lie in (0, 1], got {target_tpr!r}")
    thresholds, fpr, tpr = roc_curve(positives, negatives)
    # tpr is nondecreasing along thresholds; -inf always reaches tpr = 1
    i = int(np.argmax(tpr >= target_tpr))
    return float(fpr[i]), float(thresholds[i])


def group_metrics(gs: GroupedScores, target_tpr: float = 0.95) -> GroupMetrics:
    if not gs.positives:
        raise EmptyClass(f"group {gs.group.label} has no fooling adversarial samples")
    if not gs.negatives:
        raise EmptyClass(f"group {gs.group.label} has no natural samples")
    fpr, thr = fpr_at_tpr(gs.positives, gs.negatives, target_tpr)
    return GroupMetrics(
        label=gs.group.label,
        norm=gs.group.norm,
        epsilon=gs.group.epsilon,
        n_members=len(gs.group),
        auroc=auroc(gs.positives, gs.negatives),
        fpr_at_95_tpr=fpr,
        threshold_at_95=thr,
        n_positives=len(gs.positives),
        n_negatives=len(gs.negatives),
        mean_capacity=float(np.mean(gs.capacities)) if gs.capacities else 0.0,
    )


def _score_map(records, values):
    out = {}
    for rec, v in zip(records, values):
        out.setdefault(rec.sample_id, {})[rec.attack] = v
    return out


def _populated(records, groups):
    """Groups that at least one adversarial record points at, in config order."""
    index = _group_index(groups)
    hit = set()
    for rec in records:
        if rec.role is Role.ADVERSARIAL:
            gi = index.get(rec.attack)
            if gi is None:
                raise UnknownAttack(f"attack {rec.attack} of sample {rec.sample_id!r} matches no group")
            hit.add(gi)
    return [g for gi, g in enumerate(groups) if gi in hit], [g for gi, g in enumerate(groups) if gi not in hit]


def _metrics_for(records, groups, values, target_tpr, roc, name):
    grouped = build_groups(records, groups, _score_map(records, values))
    metrics = [group_metrics(gs, target_tpr) for gs in grouped]
    if roc is not None:
        roc[name] = {gs.group.label: roc_curve(gs.positives, gs.negatives) for gs in grouped}
    return metrics


def evaluate(records: Sequence[ScoreRecord], groups: Sequence[AttackGroup],
             solver_config: SolverConfig | None = None, *, baselines: bool = False,
             roc: bool = False, target_tpr: float = 0.95) -> EvaluationReport:
    """Score every record with the mixture detector and compute per-group metrics.

    Groups that no record refers to are listed in ``skipped_groups``; a group
    that has records but no fooling sample raises :class:`EmptyClass`.
    """
    records = list(records)
    if not records:
        raise EmptyClass("no records to evaluate")
    ks = {r.K for r in records}
    if len(ks) != 1:
        raise ValidationError(f"records disagree on the number of detectors: {sorted(ks)}")
    (k,) = ks
    used, skipped = _populated(records, groups)
    if not used:
        raise EmptyClass("no adversarial records fall in any group")

    mixture = score_records(records, solver_config)
    roc_out = {} if roc else None
    metrics = _metrics_for(records, used, mixture, target_tpr, roc_out, "mixture")
    report = EvaluationReport(
        groups=metrics,
        mean_auroc=float(np.mean([m.auroc for m in metrics])),
        mean_fpr_at_95_tpr=float(np.mean([m.fpr_at_95_tpr for m in metrics])),
        n_records=len(records),
        n_solves=len(mixture),
        n_unconverged=sum(not m.converged for m in mixture),
        target_tpr=target_tpr,
        skipped_groups=[g.label for g in skipped],
    )
    if baselines:
        for d in range(k):
            # a one-hot mixture is just detector d's own score
            single = [r.scores[d] for r in records]
            report.baselines[f"det_{d}"] = _metrics_for(records, used, single, target_tpr,
                                                       roc_out, f"det_{d}")
    if roc:
        report.roc = roc_out
    return report
