"""Domain types shared across the package.

Channels, weight vectors, score records and attack groups are immutable
once built. Validation happens at construction time so every downstream
function can assume well-formed inputs.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

STOCHASTIC_TOL = 1e-9

LOSS_NAMES = ("ACE", "KL", "FR", "Gini")
NORMS = ("L1", "L2", "Linf", "none")


class MinimaxDetectError(ValueError):
    """Base class for all errors raised by this package."""

    #: exit status used by the command line front-end
    exit_code = 2


class NonStochasticRow(MinimaxDetectError):
    pass


class OutOfRangeEntry(MinimaxDetectError):
    pass


class LengthMismatch(MinimaxDetectError):
    pass


class EmptyCell(MinimaxDetectError):
    pass


class ValidationError(MinimaxDetectError):
    pass


class ParseError(MinimaxDetectError):
    def __init__(self, reason, line=None, path=None):
        self.reason = reason
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}"
        if line is not None:
            where += f":{line}" if where else f"line {line}"
        super().__init__(f"{where}: {reason}" if where else reason)


class Role(str, enum.Enum):
    NATURAL = "natural"
    ADVERSARIAL = "adversarial"


def _frozen_array(values, dtype=np.float64):
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Channel:
    """K x 2 row-stochastic matrix of detector outputs for one input.

    Row ``k`` is ``(P(z=0), P(z=1))`` as reported by detector ``k``.
    Rows are validated on construction.
    """

    rows: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "rows", _checked_rows(self.rows))

    @property
    def K(self) -> int:
        return self.rows.shape[0]

    @property
    def p_adversarial(self) -> np.ndarray:
        return self.rows[:, 1]

    def __array__(self, dtype=None, copy=None):
        return self.rows if dtype is None else self.rows.astype(dtype)

    def __len__(self):
        return self.K

    def __eq__(self, other):
        if not isinstance(other, Channel):
            return NotImplemented
        return np.array_equal(self.rows, other.rows)

    def __hash__(self):
        return hash(self.rows.tobytes())

    def to_list(self) -> list:
        return self.rows.tolist()

    @classmethod
    def from_scores(cls, scores: Sequence[float]) -> "Channel":
        """Channel whose k-th row is ``(1 - s_k, s_k)``."""
        s = np.asarray(scores, dtype=np.float64).ravel()
        return validate_channel(np.column_stack([1.0 - s, s]))


def validate_channel(rows) -> Channel:
    """Check that ``rows`` is a nonempty K x 2 stochastic matrix."""
    return Channel(rows)


def _checked_rows(rows) -> np.ndarray:
    try:
        arr = np.array(rows, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"channel rows are not numeric: {exc}") from None
    if arr.ndim != 2 or arr.shape[0] == 0 or arr.shape[1] != 2:
        raise ValidationError(
            f"channel must be a nonempty K x 2 array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise OutOfRangeEntry("channel contains non-finite entries")
    bad = np.flatnonzero(np.any((arr < 0.0) | (arr > 1.0), axis=1))
    if bad.size:
        raise OutOfRangeEntry(f"row {bad[0]} has entries outside [0, 1]: {arr[bad[0]].tolist()}")
    sums = arr.sum(axis=1)
    bad = np.flatnonzero(np.abs(sums - 1.0) > STOCHASTIC_TOL)
    if bad.size:
        raise NonStochasticRow(f"row {bad[0]} sums to {sums[bad[0]]!r}, expected 1")
    return _frozen_array(arr)


@dataclass(frozen=True, eq=False)
class WeightVector:
    """A point on the probability simplex, one weight per detector."""

    weights: np.ndarray

    def __post_init__(self):
        w = np.array(self.weights, dtype=np.float64).ravel()
        if w.size == 0:
            raise ValidationError("weight vector is empty")
        if not np.all(np.isfinite(w)) or np.any(w < 0.0):
            raise OutOfRangeEntry(f"weights must be finite and nonnegative: {w.tolist()}")
        if abs(w.sum() - 1.0) > STOCHASTIC_TOL:
            raise NonStochasticRow(f"weights sum to {w.sum()!r}, expected 1")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @classmethod
    def uniform(cls, k: int) -> "WeightVector":
        return cls(np.full(k, 1.0 / k))

    @classmethod
    def one_hot(cls, k: int, index: int) -> "WeightVector":
        w = np.zeros(k)
        w[index] = 1.0
        return cls(w)

    def __array__(self, dtype=None, copy=None):
        return self.weights if dtype is None else self.weights.astype(dtype)

    def __len__(self):
        return self.weights.size

    def __eq__(self, other):
        if not isinstance(other, WeightVector):
            return NotImplemented
        return np.array_equal(self.weights, other.weights)

    def __hash__(self):
        return hash(self.weights.tobytes())

    def to_list(self) -> list:
        return self.weights.tolist()


@dataclass(frozen=True)
class AttackKey:
    """Identity of one attack variant.

    ``loss`` is ``None`` for loss-free attacks (SA, DF, STA, ...) and
    ``epsilon`` is ``None`` for attacks without a perturbation budget.
    """

    algorithm: str
    loss: Optional[str] = None
    norm: str = "none"
    epsilon: Optional[float] = None

    def __post_init__(self):
        if not isinstance(self.algorithm, str) or not self.algorithm.strip():
            raise ValidationError("attack algorithm tag must be a nonempty string")
        if self.loss is not None and self.loss not in LOSS_NAMES:
            raise ValidationError(f"unknown attack loss {self.loss!r}; expected one of {LOSS_NAMES}")
        if self.norm not in NORMS:
            raise ValidationError(f"unknown norm {self.norm!r}; expected one of {NORMS}")
        if self.epsilon is not None:
            eps = float(self.epsilon)
            if not math.isfinite(eps) or eps < 0:
                raise ValidationError(f"epsilon must be a nonnegative real, got {self.epsilon!r}")
            object.__setattr__(self, "epsilon", eps)

    def sort_key(self):
        # None sorts before any value
        return (self.algorithm, self.loss or "", self.norm,
                -1.0 if self.epsilon is None else self.epsilon)

    def __str__(self):
        parts = [self.algorithm]
        if self.loss:
            parts.append(self.loss)
        parts.append(self.norm)
        if self.epsilon is not None:
            parts.append(repr(self.epsilon))
        return "/".join(parts)

    # dataclass ordering chokes on None vs float; route through sort_key
    def __lt__(self, other):
        return self.sort_key() < other.sort_key()

    def __le__(self, other):
        return self.sort_key() <= other.sort_key()

    def __gt__(self, other):
        return self.sort_key() > other.sort_key()

    def __ge__(self, other):
        return self.sort_key() >= other.sort_key()


@dataclass(frozen=True)
class ScoreRecord:
    """Detector outputs for one (sample, variant) pair.

    ``scores[k]`` is detector k's probability that the input is adversarial.
    """

    sample_id: str
    role: Role
    scores: tuple
    attack: Optional[AttackKey] = None
    fooled: bool = False

    def __post_init__(self):
        if not isinstance(self.sample_id, str) or self.sample_id == "":
            raise ValidationError("sample_id must be a nonempty string")
        try:
            role = Role(self.role)
        except ValueError:
            raise ValidationError(f"role must be 'natural' or 'adversarial', got {self.role!r}") from None
        object.__setattr__(self, "role", role)
        try:
            scores = tuple(float(s) for s in self.scores)
        except (TypeError, ValueError):
            raise ValidationError(f"scores must be numeric: {self.scores!r}") from None
        if not scores:
            raise ValidationError(f"record {self.sample_id!r} has no detector scores")
        if any(not (0.0 <= s <= 1.0) for s in scores):
            raise ValidationError(f"record {self.sample_id!r} has scores outside [0, 1]: {scores}")
        object.__setattr__(self, "scores", scores)
        if role is Role.NATURAL and self.attack is not None:
            raise ValidationError(f"natural record {self.sample_id!r} must not carry an attack")
        if role is Role.ADVERSARIAL and self.attack is None:
            raise ValidationError(f"adversarial record {self.sample_id!r} is missing its attack")
        object.__setattr__(self, "fooled", bool(self.fooled))

    @property
    def K(self) -> int:
        return len(self.scores)

    def channel(self) -> Channel:
        return Channel.from_scores(self.scores)


@dataclass(frozen=True)
class AttackGroup:
    """One simultaneous-attack cell, keyed by ``(norm, epsilon)``."""

    norm: str
    epsilon: Optional[float]
    members: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        members = frozenset(self.members)
        if not members:
            raise EmptyCell(f"group ({self.norm}, {self.epsilon}) has no members")
        for m in members:
            if m.norm != self.norm or m.epsilon != self.epsilon:
                raise ValidationError(f"attack {m} does not belong to cell ({self.norm}, {self.epsilon})")
        object.__setattr__(self, "members", members)

    @property
    def key(self):
        return (self.norm, self.epsilon)

    @property
    def label(self) -> str:
        eps = "no-eps" if self.epsilon is None else f"{self.epsilon:g}"
        return f"{self.norm}/{eps}"

    def __len__(self):
        return len(self.members)

    def __contains__(self, attack):
        return attack in self.members

    def sorted_members(self):
        return sorted(self.members)


def parse_tag(tag: str):
    """Split ``"PGDi*"`` into ``("PGDi", True)``; the star may be ``*`` or ``⋆``."""
    tag = tag.strip()
    for star in ("*", "⋆", "☆"):
        if tag.endswith(star):
            return tag[: -len(star)].strip(), True
    return tag, False


def expand_group(algorithms: Iterable, norm: str, epsilon: Optional[float]) -> AttackGroup:
    """Expand a table cell into its attack variants.

    ``algorithms`` holds tags like ``"PGDi*"`` or ``("FGSM", True)``; a starred
    algorithm is run once per attacker loss and contributes four members.
    """
    members = []
    for item in algorithms:
        name, starred = parse_tag(item) if isinstance(item, str) else (item[0], bool(item[1]))
        if starred:
            members.extend(AttackKey(name, loss, norm, epsilon) for loss in LOSS_NAMES)
        else:
            members.append(AttackKey(name, None, norm, epsilon))
    if not members:
        raise EmptyCell(f"cell ({norm}, {epsilon}) lists no algorithms")
    if len(set(members)) != len(members):
        raise ValidationError(f"cell ({norm}, {epsilon}) lists the same attack twice")
    return AttackGroup(norm, None if epsilon is None else float(epsilon), frozenset(members))
