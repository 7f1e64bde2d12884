"""Updating on set-valued observations without assuming how sets are chosen.

A multi-valued map sends each hidden state to the non-empty set of
observations it may produce; nothing is assumed about how one of them is
picked. The posterior lower prevision after seeing an observation is the
most conservative one coherent with the prior and that map. For a precise
prior it coincides with conditioning every deterministic selection rule
("protocol") that could have produced the observation and taking the worst
case, which `protocol_oracle` computes by brute force as an independent
cross-check.

Models are immutable and all operations are pure functions.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import SpaceMismatchError, UnknownLabelError
from .previsions import CredalSet, Event, Gamble, MassFunction, OutcomeSpace
from .tolerance import non_negative, strictly_positive


@dataclass(frozen=True)
class MultiValuedMap:
    """Per state, the non-empty set of observations it can produce."""

    states: OutcomeSpace
    observations: OutcomeSpace
    images: tuple[frozenset[str], ...]

    def __init__(self, states: OutcomeSpace, observations: OutcomeSpace,
                 images: Mapping[str, Iterable[str]]):
        missing = set(states.labels) - set(images)
        if missing:
            raise ValueError(f"no observation set given for states {sorted(missing)}")
        extra = set(images) - set(states.labels)
        if extra:
            raise UnknownLabelError(f"{sorted(extra)} are not states of {states.labels}")
        resolved = []
        for state in states.labels:
            image = frozenset(images[state])
            if not image:
                raise ValueError(f"state {state!r} must map to a non-empty observation set")
            unknown = image - set(observations.labels)
            if unknown:
                raise UnknownLabelError(f"{sorted(unknown)} are not observations of {observations.labels}")
            resolved.append(image)
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "observations", observations)
        object.__setattr__(self, "images", tuple(resolved))

    def image(self, state: str) -> frozenset[str]:
        return self.images[self.states.index(state)]


def compatible_outcomes(mvm: MultiValuedMap, o: str) -> Event:
    """States that may produce the observation o."""
    mvm.observations.index(o)
    return Event(mvm.states, tuple(o in img for img in mvm.images))


def certainty_set(mvm: MultiValuedMap, o: str) -> Event:
    """States that can only produce o; a subset of compatible_outcomes."""
    mvm.observations.index(o)
    target = frozenset((o,))
    return Event(mvm.states, tuple(img == target for img in mvm.images))


def forward_vacuous(mvm: MultiValuedMap, x: str, g: Gamble) -> float:
    """Worst payoff of the observation gamble g over the image of state x."""
    if g.space != mvm.observations:
        raise SpaceMismatchError("gamble must live on the observation space")
    return min(g(o) for o in mvm.image(x))


@dataclass(frozen=True)
class IncompleteModel:
    """A prior credal set over states joined with a multi-valued map."""

    prior: CredalSet
    map: MultiValuedMap

    def __post_init__(self):
        if self.prior.space != self.map.states:
            raise SpaceMismatchError("prior space must equal the map's state space")

    @classmethod
    def precise(cls, p0: MassFunction, mvm: MultiValuedMap) -> IncompleteModel:
        return cls(CredalSet.precise(p0), mvm)


def _member_greatest_mu(p: MassFunction, f: Gamble,
                        compat: tuple[int, ...], certain: tuple[int, ...]) -> float | None:
    """Greatest mu keeping this member's one-sided balance non-negative.

    The balance h(mu) = sum over certain states of p*(f - mu) plus, for the
    other compatible states, p*min(f - mu, 0). h is continuous, piecewise
    linear and non-increasing with breakpoints only at f values on the
    compatible set, and h(min f over compat) >= 0, so the greatest root is
    found by scanning sorted breakpoints and solving one linear segment.
    Returns None when the member puts no mass on the compatible set (the
    balance is identically zero and imposes no constraint).
    """
    p_compat = sum(p.mass[i] for i in compat)
    if p_compat <= 0.0:
        return None
    certain_set = set(certain)
    loose = [i for i in compat if i not in certain_set]

    def h(mu: float) -> float:
        total = 0.0
        for i in certain:
            total += p.mass[i] * (f.values[i] - mu)
        for i in loose:
            d = f.values[i] - mu
            if d < 0.0:
                total += p.mass[i] * d
        return total

    p_certain = sum(p.mass[i] for i in certain)
    breakpoints = sorted({f.values[i] for i in compat})
    prev = breakpoints[0]
    h_prev = h(prev)
    assert h_prev >= 0.0, "balance cannot start negative at the smallest breakpoint"
    for b in breakpoints[1:]:
        h_b = h(b)
        if h_b < 0.0:
            # Active slope on (prev, b): all certain mass plus loose mass at or below prev.
            slope = -(p_certain + sum(p.mass[i] for i in loose if f.values[i] <= prev))
            assert slope < 0.0, "a sign change requires a falling segment"
            return prev - h_prev / slope
        prev, h_prev = b, h_b
    # Beyond the last breakpoint every compatible state contributes mass.
    return prev + h_prev / p_compat


def regular_extension(model: IncompleteModel, o: str, f: Gamble) -> float:
    """Posterior lower prevision of f after observing o, by regular extension.

    If every prior member gives the compatible set probability zero the
    result is vacuous: the minimum of f over all states. Otherwise it is
    the greatest mu whose one-sided balance stays non-negative for every
    member, computed exactly per member by breakpoint scanning and then
    minimised across members.
    """
    if f.space != model.map.states:
        raise SpaceMismatchError("gamble must live on the state space")
    compat_event = compatible_outcomes(model.map, o)
    compat = tuple(i for i, flag in enumerate(compat_event.members) if flag)
    if not compat or all(sum(p.mass[i] for i in compat) <= 0.0 for p in model.prior.members):
        return min(f.values)
    certain_event = certainty_set(model.map, o)
    certain = tuple(i for i, flag in enumerate(certain_event.members) if flag)
    roots = [_member_greatest_mu(p, f, compat, certain) for p in model.prior.members]
    return min(r for r in roots if r is not None)


def upper_extension(model: IncompleteModel, o: str, f: Gamble) -> float:
    """Conjugate upper posterior: -regular_extension of -f."""
    return -regular_extension(model, o, -f)


def protocol_oracle(model: IncompleteModel, o: str, f: Gamble) -> float:
    """Brute-force check of regular_extension for a precise prior.

    Enumerates every deterministic protocol (one observation chosen per
    state, within the map's image) and conditions the induced joint on o
    by Bayes' rule whenever o has positive probability; returns the
    minimum conditional expectation. When no protocol can produce o, the
    vacuous minimum over all states is returned.
    """
    if not model.prior.is_precise():
        raise ValueError("protocol oracle is defined for a precise prior only")
    if f.space != model.map.states:
        raise SpaceMismatchError("gamble must live on the state space")
    model.map.observations.index(o)
    p0 = model.prior.members[0]
    best: float | None = None
    for choice in itertools.product(*(sorted(img) for img in model.map.images)):
        selected = [i for i, picked in enumerate(choice) if picked == o]
        weight = sum(p0.mass[i] for i in selected)
        if weight <= 0.0:
            continue
        value = sum(p0.mass[i] * f.values[i] for i in selected) / weight
        if best is None or value < best:
            best = value
    if best is None:
        return min(f.values)
    return best


class Preference(enum.Enum):
    """Outcome of comparing two actions after an incomplete observation."""

    STRICT = "strict"
    ALMOST = "almost"
    NONE = "none"


def observation_prefers(model: IncompleteModel, o: str, f_a: Gamble, f_b: Gamble) -> Preference:
    """Preference of action a over action b given the observation o."""
    margin = regular_extension(model, o, f_a - f_b)
    if strictly_positive(margin):
        return Preference.STRICT
    if non_negative(margin):
        return Preference.ALMOST
    return Preference.NONE
