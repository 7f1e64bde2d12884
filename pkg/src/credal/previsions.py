"""Uncertainty models on a finite outcome space and the decisions they support.

A precise model is a mass function; an imprecise one is a credal set given
by an explicit finite list of mass functions. Lower and upper previsions
are envelopes (min / max of expectations) over the members, which is exact
for finitely generated sets. Strict preference between two reward gambles
holds when the lower prevision of their difference is strictly positive.

All types are immutable after construction and every operation is a pure
function, so values are safe to share between threads.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import EmptyEventError, SpaceMismatchError, UnknownLabelError, ZeroConditioningEvent
from .tolerance import MASS_TOLERANCE, non_negative, strictly_positive


@dataclass(frozen=True)
class OutcomeSpace:
    """A fixed, ordered, finite set of distinct outcome labels."""

    labels: tuple[str, ...]

    def __init__(self, labels: Iterable[str]):
        object.__setattr__(self, "labels", tuple(labels))
        if not self.labels:
            raise ValueError("outcome space must have at least one label")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError(f"outcome labels must be distinct: {self.labels}")

    def __len__(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise UnknownLabelError(f"{label!r} is not an outcome of {self.labels}") from None


def _require_same_space(a, b) -> None:
    if a.space != b.space:
        raise SpaceMismatchError(f"operands live on different spaces: {a.space.labels} vs {b.space.labels}")


@dataclass(frozen=True)
class Gamble:
    """A real-valued reward attached to each outcome."""

    space: OutcomeSpace
    values: tuple[float, ...]

    def __init__(self, space: OutcomeSpace, values: Sequence[float]):
        vals = tuple(float(v) for v in values)
        if len(vals) != len(space):
            raise ValueError(f"expected {len(space)} values, got {len(vals)}")
        if not all(math.isfinite(v) for v in vals):
            raise ValueError(f"gamble values must be finite: {vals}")
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "values", vals)

    @classmethod
    def constant(cls, space: OutcomeSpace, value: float) -> Gamble:
        return cls(space, (value,) * len(space))

    @classmethod
    def indicator(cls, event: Event) -> Gamble:
        """The 0/1 gamble paying 1 on the event's outcomes."""
        return cls(event.space, tuple(1.0 if m else 0.0 for m in event.members))

    def __call__(self, label: str) -> float:
        return self.values[self.space.index(label)]

    def __neg__(self) -> Gamble:
        return Gamble(self.space, tuple(-v for v in self.values))

    def __add__(self, other: Gamble | float) -> Gamble:
        if isinstance(other, Gamble):
            _require_same_space(self, other)
            return Gamble(self.space, tuple(a + b for a, b in zip(self.values, other.values)))
        return Gamble(self.space, tuple(v + other for v in self.values))

    def __sub__(self, other: Gamble) -> Gamble:
        _require_same_space(self, other)
        return Gamble(self.space, tuple(a - b for a, b in zip(self.values, other.values)))

    def __mul__(self, scalar: float) -> Gamble:
        return Gamble(self.space, tuple(v * scalar for v in self.values))

    __rmul__ = __mul__


@dataclass(frozen=True)
class Event:
    """A subset of the outcome space, stored as one flag per outcome."""

    space: OutcomeSpace
    members: tuple[bool, ...]

    def __init__(self, space: OutcomeSpace, members: Sequence[bool]):
        flags = tuple(bool(m) for m in members)
        if len(flags) != len(space):
            raise ValueError(f"expected {len(space)} member flags, got {len(flags)}")
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "members", flags)

    @classmethod
    def of(cls, space: OutcomeSpace, labels: Iterable[str]) -> Event:
        chosen = set(labels)
        unknown = chosen - set(space.labels)
        if unknown:
            raise UnknownLabelError(f"{sorted(unknown)} are not outcomes of {space.labels}")
        return cls(space, tuple(lbl in chosen for lbl in space.labels))

    @classmethod
    def full(cls, space: OutcomeSpace) -> Event:
        return cls(space, (True,) * len(space))

    def labels(self) -> tuple[str, ...]:
        return tuple(lbl for lbl, m in zip(self.space.labels, self.members) if m)

    def is_empty(self) -> bool:
        return not any(self.members)

    def __contains__(self, label: str) -> bool:
        return self.members[self.space.index(label)]


@dataclass(frozen=True)
class MassFunction:
    """A probability mass function: non-negative masses summing to one."""

    space: OutcomeSpace
    mass: tuple[float, ...]

    def __init__(self, space: OutcomeSpace, mass: Sequence[float]):
        masses = tuple(float(m) for m in mass)
        if len(masses) != len(space):
            raise ValueError(f"expected {len(space)} masses, got {len(masses)}")
        if any(m < 0.0 for m in masses):
            raise ValueError(f"masses must be non-negative: {masses}")
        total = sum(masses)
        if abs(total - 1.0) > MASS_TOLERANCE:
            raise ValueError(f"masses must sum to 1 within {MASS_TOLERANCE}, got {total!r}")
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "mass", masses)

    @classmethod
    def uniform(cls, space: OutcomeSpace) -> MassFunction:
        return cls(space, (1.0 / len(space),) * len(space))

    @classmethod
    def point(cls, space: OutcomeSpace, label: str) -> MassFunction:
        i = space.index(label)
        return cls(space, tuple(1.0 if j == i else 0.0 for j in range(len(space))))

    def __call__(self, label: str) -> float:
        return self.mass[self.space.index(label)]

    def probability(self, event: Event) -> float:
        _require_same_space(self, event)
        return sum(m for m, flag in zip(self.mass, event.members) if flag)


@dataclass(frozen=True)
class CredalSet:
    """A non-empty finite set of mass functions over one shared space.

    The members are interpreted as generating points: lower and upper
    previsions are the min and max of the member expectations.
    """

    members: tuple[MassFunction, ...]

    def __init__(self, members: Iterable[MassFunction]):
        mems = tuple(members)
        if not mems:
            raise ValueError("credal set needs at least one member")
        space = mems[0].space
        if any(m.space != space for m in mems):
            raise SpaceMismatchError("all credal set members must share one space")
        object.__setattr__(self, "members", mems)

    @classmethod
    def precise(cls, p: MassFunction) -> CredalSet:
        return cls((p,))

    @classmethod
    def vacuous(cls, event: Event) -> CredalSet:
        """All point masses on the event: the model for 'outcome lies in B'."""
        if event.is_empty():
            raise EmptyEventError("vacuous credal set needs a non-empty event")
        return cls(tuple(MassFunction.point(event.space, lbl) for lbl in event.labels()))

    @property
    def space(self) -> OutcomeSpace:
        return self.members[0].space

    def is_precise(self) -> bool:
        return len(self.members) == 1


def expectation(p: MassFunction, f: Gamble) -> float:
    """Expected reward of f under p."""
    _require_same_space(p, f)
    return sum(v * m for v, m in zip(f.values, p.mass))


def lower_prevision(k: CredalSet, f: Gamble) -> float:
    """Minimum expectation of f over the credal set's members."""
    _require_same_space(k, f)
    return min(expectation(p, f) for p in k.members)


def upper_prevision(k: CredalSet, f: Gamble) -> float:
    """Conjugate of the lower prevision: -lower(-f)."""
    return -lower_prevision(k, -f)


def vacuous_lower(b: Event, f: Gamble) -> float:
    """Minimum of f over a non-empty event."""
    _require_same_space(b, f)
    if b.is_empty():
        raise EmptyEventError("vacuous lower prevision needs a non-empty event")
    return min(v for v, flag in zip(f.values, b.members) if flag)


def bayes_condition(p: MassFunction, b: Event, f: Gamble) -> float:
    """Conditional expectation of f given the event b under p."""
    _require_same_space(p, b)
    _require_same_space(p, f)
    pb = p.probability(b)
    if pb <= 0.0:
        raise ZeroConditioningEvent(f"event {b.labels()} has probability zero")
    restricted = sum(v * m for v, m, flag in zip(f.values, p.mass, b.members) if flag)
    return restricted / pb


def strictly_prefers(k: CredalSet, f_a: Gamble, f_b: Gamble) -> bool:
    """True iff the lower prevision of f_a - f_b clears the tie band."""
    return strictly_positive(lower_prevision(k, f_a - f_b))


def almost_prefers(k: CredalSet, f_a: Gamble, f_b: Gamble) -> bool:
    """Weak variant: lower prevision of the difference is not below zero."""
    return non_negative(lower_prevision(k, f_a - f_b))


def maximal_set(k: CredalSet, actions: Sequence[Gamble]) -> set[int]:
    """Indices of actions not strictly dominated by any other action.

    Strict preference is irreflexive and transitive here, so the result is
    never empty for a non-empty action list.
    """
    if not actions:
        raise ValueError("need at least one action")
    for f in actions:
        _require_same_space(k, f)
    kept = set()
    for i, f_i in enumerate(actions):
        if not any(strictly_prefers(k, f_j, f_i) for j, f_j in enumerate(actions) if j != i):
            kept.add(i)
    return kept
