"""Bayesian networks: DAG plus conditional probability tables, and queries.

The network is a plain container validated at construction: acyclic graph,
one table per variable, each table row a distribution over the variable's
states given one parent configuration. Rows are stored row-major over
parent configurations with the last-listed parent varying fastest, and
parents are always listed in the network's variable-declaration order;
a single fixed convention keeps the file format bit-exact.

Every table entry being strictly positive is the standing assumption of
the robust classification queries; it is only reported here (as warnings
at load time and through `validate_positivity`) so that plain joint and
posterior queries still work on networks containing zeros.
"""
from __future__ import annotations

import itertools
import json
import warnings
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import (
    EvidenceError,
    NetworkSemanticError,
    NetworkSyntaxError,
    UnknownLabelError,
    ZeroConditioningEvent,
)
from .previsions import MassFunction, OutcomeSpace
from .tolerance import MASS_TOLERANCE


class PositivityWarning(UserWarning):
    """A parsed network contains zero table entries."""


@dataclass(frozen=True)
class NetworkVariable:
    """A named discrete variable with at least one state."""

    name: str
    states: tuple[str, ...]

    def __init__(self, name: str, states: Sequence[str]):
        sts = tuple(states)
        if not name:
            raise NetworkSemanticError("variable name must be non-empty")
        if not sts:
            raise NetworkSemanticError(f"variable {name!r} needs at least one state")
        if len(set(sts)) != len(sts):
            raise NetworkSemanticError(f"variable {name!r} has duplicate states: {sts}")
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "states", sts)


@dataclass(frozen=True)
class Cpt:
    """Conditional probability table: one distribution row per parent config."""

    owner: str
    parents: tuple[str, ...]
    rows: tuple[tuple[float, ...], ...]

    def __init__(self, owner: str, parents: Sequence[str], rows: Sequence[Sequence[float]]):
        object.__setattr__(self, "owner", owner)
        object.__setattr__(self, "parents", tuple(parents))
        object.__setattr__(self, "rows", tuple(tuple(float(v) for v in row) for row in rows))


@dataclass(frozen=True)
class BayesNet:
    """An immutable, validated Bayesian network."""

    variables: tuple[NetworkVariable, ...]
    arcs: tuple[tuple[str, str], ...]
    cpts: tuple[Cpt, ...]

    def __init__(self, variables: Sequence[NetworkVariable],
                 arcs: Sequence[tuple[str, str]],
                 cpts: Sequence[Cpt]):
        object.__setattr__(self, "variables", tuple(variables))
        object.__setattr__(self, "arcs", tuple((str(p), str(c)) for p, c in arcs))
        object.__setattr__(self, "cpts", tuple(cpts))
        self._validate()

    # -- construction-time validation ------------------------------------

    def _validate(self) -> None:
        names = [v.name for v in self.variables]
        if len(set(names)) != len(names):
            dupes = sorted({n for n in names if names.count(n) > 1})
            raise NetworkSemanticError(f"duplicate variable names: {dupes}")
        known = set(names)
        seen_arcs = set()
        for parent, child in self.arcs:
            if parent not in known or child not in known:
                raise NetworkSemanticError(f"arc ({parent}, {child}) references an unknown variable")
            if (parent, child) in seen_arcs:
                raise NetworkSemanticError(f"duplicate arc ({parent}, {child})")
            seen_arcs.add((parent, child))
        cycle = self._find_cycle()
        if cycle:
            raise NetworkSemanticError("graph has a cycle: " + " -> ".join(cycle))
        if len(self.cpts) != len(self.variables):
            raise NetworkSemanticError(
                f"expected one table per variable, got {len(self.cpts)} for {len(self.variables)}")
        for var, cpt in zip(self.variables, self.cpts):
            if cpt.owner != var.name:
                raise NetworkSemanticError(
                    f"table for {cpt.owner!r} listed in position of {var.name!r}")
            expected_parents = self.parents(var.name)
            if cpt.parents != expected_parents:
                raise NetworkSemanticError(
                    f"table for {var.name!r} declares parents {list(cpt.parents)}, "
                    f"graph requires {list(expected_parents)} (declaration order)")
            n_rows = 1
            for p in expected_parents:
                n_rows *= len(self.variable(p).states)
            if len(cpt.rows) != n_rows:
                raise NetworkSemanticError(
                    f"table for {var.name!r} has {len(cpt.rows)} rows, expected {n_rows}")
            for r, row in enumerate(cpt.rows):
                if len(row) != len(var.states):
                    raise NetworkSemanticError(
                        f"table for {var.name!r}, row {r}: {len(row)} entries for "
                        f"{len(var.states)} states")
                if any(v < 0.0 for v in row):
                    raise NetworkSemanticError(f"table for {var.name!r}, row {r}: negative entry")
                total = sum(row)
                if abs(total - 1.0) > MASS_TOLERANCE:
                    raise NetworkSemanticError(
                        f"table for {var.name!r}, row {r}: sums to {total!r}, not 1")

    def _find_cycle(self) -> list[str] | None:
        out: dict[str, list[str]] = {v.name: [] for v in self.variables}
        for parent, child in self.arcs:
            out[parent].append(child)
        WHITE, GREY, BLACK = 0, 1, 2
        colour = {n: WHITE for n in out}
        stack: list[str] = []

        def visit(node: str) -> list[str] | None:
            colour[node] = GREY
            stack.append(node)
            for nxt in out[node]:
                if colour[nxt] == GREY:
                    return stack[stack.index(nxt):] + [nxt]
                if colour[nxt] == WHITE:
                    found = visit(nxt)
                    if found:
                        return found
            stack.pop()
            colour[node] = BLACK
            return None

        for name in out:
            if colour[name] == WHITE:
                found = visit(name)
                if found:
                    return found
        return None

    # -- lookups ----------------------------------------------------------

    @cached_property
    def _positions(self) -> dict[str, int]:
        return {v.name: i for i, v in enumerate(self.variables)}

    def position(self, name: str) -> int:
        try:
            return self._positions[name]
        except KeyError:
            raise UnknownLabelError(f"unknown variable {name!r}") from None

    def variable(self, name: str) -> NetworkVariable:
        return self.variables[self.position(name)]

    def state_index(self, name: str, state: str) -> int:
        var = self.variable(name)
        try:
            return var.states.index(state)
        except ValueError:
            raise UnknownLabelError(f"{state!r} is not a state of {name!r} {var.states}") from None

    @cached_property
    def _parent_positions(self) -> tuple[tuple[int, ...], ...]:
        parent_sets: list[set[str]] = [set() for _ in self.variables]
        for parent, child in self.arcs:
            parent_sets[self._positions[child]].add(parent)
        return tuple(
            tuple(i for i, v in enumerate(self.variables) if v.name in parent_sets[pos])
            for pos in range(len(self.variables)))

    def parents(self, name: str) -> tuple[str, ...]:
        """Parents of a variable, in declaration order."""
        return tuple(self.variables[i].name for i in self._parent_positions[self.position(name)])

    def children(self, name: str) -> tuple[str, ...]:
        """Children of a variable, in declaration order."""
        self.position(name)
        kids = {c for p, c in self.arcs if p == name}
        return tuple(v.name for v in self.variables if v.name in kids)

    def cpt(self, name: str) -> Cpt:
        return self.cpts[self.position(name)]

    def row_index(self, name: str, parent_states: Mapping[str, int]) -> int:
        """Row of the variable's table selected by parent state indices."""
        row = 0
        for ppos in self._parent_positions[self.position(name)]:
            pvar = self.variables[ppos]
            row = row * len(pvar.states) + parent_states[pvar.name]
        return row

    def topological_order(self) -> tuple[str, ...]:
        """Kahn's algorithm; among ready variables, declaration order wins."""
        indeg = [len(ps) for ps in self._parent_positions]
        out: list[list[int]] = [[] for _ in self.variables]
        for parent, child in self.arcs:
            out[self._positions[parent]].append(self._positions[child])
        order: list[str] = []
        ready = [i for i, d in enumerate(indeg) if d == 0]
        while ready:
            pos = min(ready)
            ready.remove(pos)
            order.append(self.variables[pos].name)
            for nxt in out[pos]:
                indeg[nxt] -= 1
                if indeg[nxt] == 0:
                    ready.append(nxt)
        return tuple(order)


@dataclass(frozen=True)
class FullAssignment:
    """One state per network variable, aligned with declaration order."""

    states: tuple[str, ...]

    @classmethod
    def from_mapping(cls, net: BayesNet, assignment: Mapping[str, str]) -> FullAssignment:
        extra = set(assignment) - {v.name for v in net.variables}
        if extra:
            raise UnknownLabelError(f"assignment mentions unknown variables {sorted(extra)}")
        missing = [v.name for v in net.variables if v.name not in assignment]
        if missing:
            raise ValueError(f"assignment incomplete, missing {missing}")
        for name, state in assignment.items():
            net.state_index(name, state)
        return cls(tuple(assignment[v.name] for v in net.variables))


@dataclass(frozen=True)
class Evidence:
    """A partial assignment over attribute variables; the rest are missing."""

    items: tuple[tuple[str, str], ...]

    @classmethod
    def of(cls, assignment: Mapping[str, str]) -> Evidence:
        return cls(tuple((str(k), str(v)) for k, v in assignment.items()))

    @classmethod
    def empty(cls) -> Evidence:
        return cls(())

    @classmethod
    def parse(cls, text: str) -> Evidence:
        """Parse "Name=state,Name=state"; an empty string means no evidence."""
        text = text.strip()
        if not text:
            return cls(())
        pairs = []
        for chunk in text.split(","):
            name, sep, state = chunk.partition("=")
            if not sep or not name.strip() or not state.strip():
                raise EvidenceError(f"bad evidence item {chunk!r}, expected Name=state")
            pairs.append((name.strip(), state.strip()))
        return cls(tuple(pairs))

    def as_dict(self) -> dict[str, str]:
        return dict(self.items)

    def check(self, net: BayesNet, class_var: str) -> None:
        """Validate names and states against the net; class may not appear."""
        seen = set()
        for name, state in self.items:
            if name in seen:
                raise EvidenceError(f"variable {name!r} assigned twice in evidence")
            seen.add(name)
            if name == class_var:
                raise EvidenceError(f"evidence may not mention the class variable {class_var!r}")
            net.state_index(name, state)


@dataclass(frozen=True)
class ZeroEntry:
    """Location of a zero table entry: variable name, row, column."""

    variable: str
    row: int
    column: int

    def __str__(self) -> str:
        return f"{self.variable}: row {self.row}, column {self.column} is zero"


def validate_positivity(net: BayesNet) -> list[ZeroEntry]:
    """All locations where a table entry fails to be strictly positive."""
    found = []
    for var, cpt in zip(net.variables, net.cpts):
        for r, row in enumerate(cpt.rows):
            for c, value in enumerate(row):
                if value <= 0.0:
                    found.append(ZeroEntry(var.name, r, c))
    return found


def joint_probability(net: BayesNet, assignment: FullAssignment | Mapping[str, str]) -> float:
    """Probability of one full assignment: the product of table lookups."""
    if not isinstance(assignment, FullAssignment):
        assignment = FullAssignment.from_mapping(net, assignment)
    if len(assignment.states) != len(net.variables):
        raise ValueError(f"assignment covers {len(assignment.states)} of {len(net.variables)} variables")
    idx = tuple(net.state_index(v.name, s) for v, s in zip(net.variables, assignment.states))
    return _joint_from_indices(net, idx)


def _joint_from_indices(net: BayesNet, idx: Sequence[int]) -> float:
    prob = 1.0
    for pos, cpt in enumerate(net.cpts):
        row = 0
        for ppos in net._parent_positions[pos]:
            row = row * len(net.variables[ppos].states) + idx[ppos]
        prob *= cpt.rows[row][idx[pos]]
    return prob


def markov_blanket(net: BayesNet, name: str) -> set[str]:
    """Parents, children, and the children's other parents of a variable."""
    blanket: set[str] = set(net.parents(name))
    for child in net.children(name):
        blanket.add(child)
        blanket.update(net.parents(child))
    blanket.discard(name)
    return blanket


@dataclass(frozen=True)
class PlanStep:
    """One child's slice of the staged minimisation."""

    child: str
    pi_plus: frozenset[str]
    pi_star: frozenset[str]

    @property
    def eliminate(self) -> frozenset[str]:
        return self.pi_plus - self.pi_star


@dataclass(frozen=True)
class DominancePlan:
    """Children order plus the per-step scopes of the dominance recursion."""

    class_var: str
    children: tuple[str, ...]
    steps: tuple[PlanStep, ...]
    final_scope: frozenset[str]


def dominance_plan(net: BayesNet, class_var: str,
                   children_order: Sequence[str] | None = None) -> DominancePlan:
    """Scope schedule for the staged dominance minimisation.

    Children are ordered topologically among themselves (declaration order
    breaking ties); a custom order may be supplied and is checked to extend
    the arc-induced partial order. Step i eliminates exactly the variables
    of its own parent-plus-self set not seen in any earlier set, and the
    class variable's parents are eliminated last.
    """
    children = net.children(class_var)
    if children_order is None:
        ordered = _children_topological(net, children)
    else:
        ordered = tuple(children_order)
        if sorted(ordered) != sorted(children):
            raise ValueError(f"order {list(ordered)} is not a permutation of children {list(children)}")
        for i, early in enumerate(ordered):
            for late in ordered[i + 1:]:
                if _reaches(net, late, early):
                    raise ValueError(f"order violates arc {late} -> ... -> {early}")
    seen: set[str] = set(net.parents(class_var)) | {class_var}
    steps = []
    for child in ordered:
        pi_plus = frozenset(net.parents(child)) | {child}
        steps.append(PlanStep(child, pi_plus, frozenset(seen)))
        seen |= pi_plus
    return DominancePlan(class_var, ordered, tuple(steps), frozenset(net.parents(class_var)))


def _reaches(net: BayesNet, source: str, target: str) -> bool:
    frontier = [source]
    visited = set()
    while frontier:
        node = frontier.pop()
        if node == target:
            return True
        if node in visited:
            continue
        visited.add(node)
        frontier.extend(net.children(node))
    return False


def class_space(net: BayesNet, class_var: str) -> OutcomeSpace:
    """The class variable's states as an outcome space for gambles."""
    return OutcomeSpace(net.variable(class_var).states)


def missing_variables(net: BayesNet, class_var: str, ev: Evidence) -> tuple[str, ...]:
    """Attribute variables not assigned by the evidence, declaration order."""
    assigned = set(ev.as_dict())
    return tuple(v.name for v in net.variables if v.name != class_var and v.name not in assigned)


def iter_completions(net: BayesNet, class_var: str, ev: Evidence) -> Iterator[dict[str, int]]:
    """State-index maps over all attributes, one per completion of the evidence."""
    ev.check(net, class_var)
    fixed = {name: net.state_index(name, state) for name, state in ev.items}
    free = missing_variables(net, class_var, ev)
    ranges = [range(len(net.variable(name).states)) for name in free]
    for combo in itertools.product(*ranges):
        full = dict(fixed)
        full.update(zip(free, combo))
        yield full


def precise_posterior(net: BayesNet, class_var: str, ev: Evidence) -> MassFunction:
    """Posterior over class states treating missing attributes as ignorable.

    Sums the joint over all completions of the missing attributes and
    normalises; this is the baseline the robust queries are contrasted
    against, valid only when the missingness process is ignorable.
    """
    space = class_space(net, class_var)
    cpos = net.position(class_var)
    sums = [0.0 for _ in space.labels]
    for completion in iter_completions(net, class_var, ev):
        idx = [0] * len(net.variables)
        for name, sidx in completion.items():
            idx[net.position(name)] = sidx
        for c in range(len(space.labels)):
            idx[cpos] = c
            sums[c] += _joint_from_indices(net, idx)
    total = sum(sums)
    if total <= 0.0:
        raise ZeroConditioningEvent(f"evidence {ev.as_dict()} has probability zero")
    return MassFunction(space, tuple(s / total for s in sums))


# -- file format --------------------------------------------------------------


def _require_keys(obj: Mapping, required: Iterable[str], where: str) -> None:
    required = set(required)
    keys = set(obj)
    unknown = keys - required
    if unknown:
        raise NetworkSemanticError(f"{where}: unknown fields {sorted(unknown)}")
    absent = required - keys
    if absent:
        raise NetworkSemanticError(f"{where}: missing fields {sorted(absent)}")


def parse_network(document: bytes) -> BayesNet:
    """Parse and validate a network document (strict JSON, UTF-8).

    Warns with PositivityWarning if any table entry is zero; zeros are
    legal in the format but reject the robust classification queries.
    """
    try:
        text = document.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise NetworkSyntaxError(f"document is not UTF-8: {exc}") from None
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise NetworkSyntaxError(exc.msg, exc.lineno, exc.colno) from None

    if not isinstance(raw, dict):
        raise NetworkSemanticError("top level must be an object")
    _require_keys(raw, ("variables", "arcs", "cpts"), "top level")

    if not isinstance(raw["variables"], list):
        raise NetworkSemanticError("'variables' must be a list")
    variables = []
    for entry in raw["variables"]:
        if not isinstance(entry, dict):
            raise NetworkSemanticError("each variable must be an object")
        _require_keys(entry, ("name", "states"), "variable entry")
        name, states = entry["name"], entry["states"]
        if not isinstance(name, str) or not isinstance(states, list) \
                or not all(isinstance(s, str) for s in states):
            raise NetworkSemanticError(f"variable entry {entry!r}: name must be a string, "
                                       "states a list of strings")
        variables.append(NetworkVariable(name, states))

    if not isinstance(raw["arcs"], list):
        raise NetworkSemanticError("'arcs' must be a list")
    arcs = []
    for entry in raw["arcs"]:
        if not (isinstance(entry, list) and len(entry) == 2
                and all(isinstance(e, str) for e in entry)):
            raise NetworkSemanticError(f"arc {entry!r} must be a pair of variable names")
        arcs.append((entry[0], entry[1]))

    if not isinstance(raw["cpts"], dict):
        raise NetworkSemanticError("'cpts' must be an object keyed by variable name")
    by_name = {}
    for name, entry in raw["cpts"].items():
        if not isinstance(entry, dict):
            raise NetworkSemanticError(f"cpt for {name!r} must be an object")
        _require_keys(entry, ("parents", "rows"), f"cpt for {name!r}")
        parents, rows = entry["parents"], entry["rows"]
        if not isinstance(parents, list) or not all(isinstance(p, str) for p in parents):
            raise NetworkSemanticError(f"cpt for {name!r}: parents must be a list of names")
        if not isinstance(rows, list) or not all(
                isinstance(row, list) and all(isinstance(v, (int, float)) and not isinstance(v, bool)
                                              for v in row) for row in rows):
            raise NetworkSemanticError(f"cpt for {name!r}: rows must be lists of reals")
        by_name[name] = Cpt(name, parents, rows)

    declared = {v.name for v in variables}
    stray = set(by_name) - declared
    if stray:
        raise NetworkSemanticError(f"cpts given for undeclared variables {sorted(stray)}")
    absent = declared - set(by_name)
    if absent:
        raise NetworkSemanticError(f"no cpt given for variables {sorted(absent)}")
    net = BayesNet(variables, arcs, [by_name[v.name] for v in variables])

    zeros = validate_positivity(net)
    if zeros:
        warnings.warn(f"network has {len(zeros)} zero table entries; "
                      "robust classification queries will refuse it", PositivityWarning,
                      stacklevel=2)
    return net


def serialize_network(net: BayesNet) -> bytes:
    """Write a network back to the document format; parse round-trips exactly."""
    doc = {
        "variables": [{"name": v.name, "states": list(v.states)} for v in net.variables],
        "arcs": [[p, c] for p, c in net.arcs],
        "cpts": {
            v.name: {"parents": list(cpt.parents), "rows": [list(row) for row in cpt.rows]}
            for v, cpt in zip(net.variables, net.cpts)
        },
    }
    return json.dumps(doc, indent=2).encode("utf-8")
