"""chains.py

Conditionals implied by zero entries of a correlation array, and broken arrows.

Every entry Pr(xy|st) = 0 says the conjunction A_{s_x} & B_{t_y} never
happens. When x and y differ this reads as an implication between the two
"+" propositions (A_{s+} -> B_{t+} for a zero at +-, B_{t+} -> A_{s+} for a
zero at -+); when they agree it is kept as an exclusion.

Closure runs over literals: the zero at (s, t, x, y) gives the edges
A_{s_x} -> B_{t_not y} and B_{t_y} -> A_{s_not x}. A literal reachable from
another on the opposite side is an entailed conditional, and its negation is
jointly measurable with the antecedent in a single cell. If that cell gives
the pair positive probability the arrow is broken.

Composite conditionals (P1 & P2) -> (Q1 & Q2) are formed pairwise from two
implications whose antecedents sit on opposite sides and whose consequents sit
on opposite sides.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Sequence, Set, Tuple, Union

import numpy as np

from brokenarrow.arrays.correlations import DEFAULT_TOL, CorrelationArray, marginals
from brokenarrow.errors import RelabelingError
from brokenarrow.states.basis import Setting

SIDES = ("A", "B")
_NEG = {"+": "-", "-": "+"}


# -----------------------------------------------------------------------------
# Propositions and conditionals
# -----------------------------------------------------------------------------

@dataclass(frozen=True, order=True)
class Proposition:
    """'Alice (A) or Bob (B) finds outcome + or - when peeling `setting`'."""

    side: str
    setting: str
    outcome: str

    def __post_init__(self) -> None:
        if self.side not in SIDES:
            raise ValueError(f"side must be 'A' or 'B', got {self.side!r}")
        if self.outcome not in _NEG:
            raise ValueError(f"outcome must be '+' or '-', got {self.outcome!r}")

    def negate(self) -> "Proposition":
        return Proposition(self.side, self.setting, _NEG[self.outcome])

    def __str__(self) -> str:
        return f"{self.side}_{{{self.setting}{self.outcome}}}"


Conjunction = Tuple[Proposition, ...]


def _fmt(props: Conjunction) -> str:
    if len(props) == 1:
        return str(props[0])
    return "(" + " & ".join(str(p) for p in props) + ")"


@dataclass(frozen=True)
class Conditional:
    """antecedent -> consequent; each side is one proposition or a conjunction of two."""

    antecedent: Conjunction
    consequent: Conjunction

    def __post_init__(self) -> None:
        if not self.antecedent or not self.consequent:
            raise ValueError("Conditional needs a non-empty antecedent and consequent")
        if set(self.antecedent) & set(self.consequent):
            raise ValueError(f"Trivial conditional: {self}")

    @property
    def is_composite(self) -> bool:
        return len(self.antecedent) > 1 or len(self.consequent) > 1

    def contrapositive(self) -> "Conditional":
        if self.is_composite:
            raise ValueError("Only single-proposition conditionals have a contrapositive here")
        return Conditional((self.consequent[0].negate(),), (self.antecedent[0].negate(),))

    def __str__(self) -> str:
        return f"{_fmt(self.antecedent)} -> {_fmt(self.consequent)}"


@dataclass(frozen=True)
class Exclusion:
    """not (left & right): an impossible conjunction from an equal-outcome zero."""

    left: Proposition
    right: Proposition

    def as_conditional(self) -> Conditional:
        return Conditional((self.left,), (self.right.negate(),))

    def __str__(self) -> str:
        return f"not({self.left} & {self.right})"


@dataclass(frozen=True)
class BrokenArrow:
    conditional: Conditional
    witness_cell: Tuple[str, str]
    witness_outcome: str
    witness_probability: float

    def to_dict(self) -> dict:
        return {
            "antecedent": _fmt(self.conditional.antecedent),
            "consequent": _fmt(self.conditional.consequent),
            "arrow": f"{_fmt(self.conditional.antecedent)} -/-> {_fmt(self.conditional.consequent)}",
            "witness_cell": list(self.witness_cell),
            "witness_outcome": self.witness_outcome,
            "witness_probability": self.witness_probability,
        }


@dataclass(frozen=True)
class ChainReport:
    conditionals: Tuple[Conditional, ...]
    exclusions: Tuple[Exclusion, ...]
    entailed: Tuple[Conditional, ...]
    composites: Tuple[Conditional, ...]
    broken: Tuple[BrokenArrow, ...]
    vacuous: Tuple[Conditional, ...]
    chain: Tuple[Proposition, ...]
    marginals: Dict[str, Dict[str, float]] = field(default_factory=dict)
    tol: float = DEFAULT_TOL

    def to_dict(self) -> dict:
        return {
            "conditionals": [str(c) for c in self.conditionals],
            "exclusions": [str(e) for e in self.exclusions],
            "entailed": [str(c) for c in self.entailed],
            "composites": [str(c) for c in self.composites],
            "broken": [b.to_dict() for b in self.broken],
            "vacuous": [str(c) for c in self.vacuous],
            "chain": " -> ".join(str(p) for p in self.chain),
            "marginals": self.marginals,
            "tol": self.tol,
        }


# -----------------------------------------------------------------------------
# Extraction
# -----------------------------------------------------------------------------

def _zeros(array: CorrelationArray, tol: float) -> List[Tuple[str, str, str, str]]:
    out = []
    for i, j in np.ndindex(*array.shape):
        for x, ox in enumerate("+-"):
            for y, oy in enumerate("+-"):
                if array.table[i, j, x, y] < tol:
                    out.append((array.settings_a[i].label, array.settings_b[j].label, ox, oy))
    return out


def canonical(cond: Conditional) -> Conditional:
    """Orientation with a '+' antecedent, preferring an Alice antecedent on ties."""
    if cond.is_composite:
        return cond
    options = (cond, cond.contrapositive())
    return min(options, key=lambda c: (c.antecedent[0].outcome != "+", c.antecedent[0].side != "A"))


def extract_conditionals(
    array: CorrelationArray, tol: float = DEFAULT_TOL
) -> List[Union[Conditional, Exclusion]]:
    """Implications and exclusions read off the zero entries, in array order."""
    out: List[Union[Conditional, Exclusion]] = []
    for s, t, x, y in _zeros(array, tol):
        pa, pb = Proposition("A", s, x), Proposition("B", t, y)
        if x == y:
            out.append(Exclusion(pa, pb))
        else:
            out.append(canonical(Conditional((pa,), (pb.negate(),))))
    return out


def _literal_graph(array: CorrelationArray, tol: float) -> Dict[Proposition, Set[Proposition]]:
    graph: Dict[Proposition, Set[Proposition]] = defaultdict(set)
    for s, t, x, y in _zeros(array, tol):
        pa, pb = Proposition("A", s, x), Proposition("B", t, y)
        graph[pa].add(pb.negate())
        graph[pb].add(pa.negate())
    return graph


def _reachable(graph: Mapping[Proposition, Set[Proposition]], start: Proposition) -> Set[Proposition]:
    seen: Set[Proposition] = set()
    stack = list(graph.get(start, ()))
    while stack:
        p = stack.pop()
        if p in seen:
            continue
        seen.add(p)
        stack.extend(graph.get(p, ()))
    seen.discard(start)
    return seen


# -----------------------------------------------------------------------------
# Probabilities of propositions
# -----------------------------------------------------------------------------

def _joint(array: CorrelationArray, props: Conjunction) -> Tuple[Tuple[str, str], str, float]:
    """Cell, outcome pair and probability of an Alice/Bob conjunction."""
    pa = next(p for p in props if p.side == "A")
    pb = next(p for p in props if p.side == "B")
    outcome = pa.outcome + pb.outcome
    return (pa.setting, pb.setting), outcome, array.prob(pa.setting, pb.setting, outcome)


def _single(margs: Mapping[str, Mapping[str, float]], p: Proposition) -> float:
    plus = margs[p.side][p.setting]
    return plus if p.outcome == "+" else 1.0 - plus


def _sides(props: Conjunction) -> Set[str]:
    return {p.side for p in props}


def _composites(implications: Sequence[Conditional]) -> List[Conditional]:
    out = []
    for k, c1 in enumerate(implications):
        for c2 in implications[k + 1:]:
            ante = c1.antecedent + c2.antecedent
            cons = c1.consequent + c2.consequent
            if _sides(ante) != set(SIDES) or _sides(cons) != set(SIDES):
                continue
            ante = tuple(sorted(ante))
            cons = tuple(sorted(cons))
            if set(ante) & set(cons):
                continue
            out.append(Conditional(ante, cons))
    return out


def _longest_chain(implications: Sequence[Conditional]) -> Tuple[Proposition, ...]:
    graph: Dict[Proposition, List[Proposition]] = defaultdict(list)
    for c in implications:
        graph[c.antecedent[0]].append(c.consequent[0])

    best: Tuple[Proposition, ...] = ()

    def walk(path: Tuple[Proposition, ...]) -> None:
        nonlocal best
        if len(path) > len(best):
            best = path
        for nxt in graph.get(path[-1], ()):
            if nxt not in path:
                walk(path + (nxt,))

    for c in implications:
        walk((c.antecedent[0],))
    return best


# -----------------------------------------------------------------------------
# Broken arrows
# -----------------------------------------------------------------------------

def find_broken_arrows(array: CorrelationArray, tol: float = DEFAULT_TOL) -> ChainReport:
    """Close the conditionals of `array` and report those the array violates."""
    extracted = extract_conditionals(array, tol)
    implications = [c for c in extracted if isinstance(c, Conditional)]
    exclusions = [e for e in extracted if isinstance(e, Exclusion)]
    direct = {canonical(c) for c in implications} | {canonical(e.as_conditional()) for e in exclusions}
    margs = marginals(array)

    graph = _literal_graph(array, tol)
    entailed: List[Conditional] = []
    seen: Set[Conditional] = set()
    for start in sorted(graph):
        for end in sorted(_reachable(graph, start)):
            if end.side == start.side or end == start:
                continue
            cond = canonical(Conditional((start,), (end,)))
            if cond in direct or cond in seen:
                continue
            seen.add(cond)
            entailed.append(cond)

    broken: List[BrokenArrow] = []
    vacuous: List[Conditional] = []
    for cond in sorted(direct, key=str) + entailed:
        p, q = cond.antecedent[0], cond.consequent[0]
        if _single(margs, p) < tol:
            vacuous.append(cond)
            continue
        cell, outcome, prob = _joint(array, (p, q.negate()))
        if prob > tol:
            broken.append(BrokenArrow(cond, cell, outcome, prob))

    composites = _composites(implications)
    for comp in composites:
        _, _, p_ante = _joint(array, comp.antecedent)
        _, _, p_cons = _joint(array, comp.consequent)
        if p_ante > tol and p_cons < tol:
            cell, outcome, _ = _joint(array, comp.antecedent)
            broken = [b for b in broken if (b.witness_cell, b.witness_outcome) != (cell, outcome)]
            broken.append(BrokenArrow(comp, cell, outcome, p_ante))

    return ChainReport(
        conditionals=tuple(implications),
        exclusions=tuple(exclusions),
        entailed=tuple(entailed),
        composites=tuple(composites),
        broken=tuple(broken),
        vacuous=tuple(vacuous),
        chain=_longest_chain(implications),
        marginals=margs,
        tol=tol,
    )


# -----------------------------------------------------------------------------
# Relabeling
# -----------------------------------------------------------------------------

SideMap = Mapping[str, Tuple[str, bool]]


@dataclass(frozen=True)
class RelabelMap:
    """old setting label -> (new label, flip outcomes) for each side."""

    alice: SideMap
    bob: SideMap

    def to_dict(self) -> dict:
        return {
            "alice": {k: list(v) for k, v in self.alice.items()},
            "bob": {k: list(v) for k, v in self.bob.items()},
        }


def identity_relabeling(array: CorrelationArray) -> RelabelMap:
    return RelabelMap(
        alice={s: (s, False) for s in array.labels_a},
        bob={t: (t, False) for t in array.labels_b},
    )


def hu_relabeling() -> RelabelMap:
    """Turns the Hardy-Unruh array at alpha into the Hardy array at pi/2 - alpha.

    Alice: b -> a, and a -> b with tastes flipped.
    Bob:   a -> b with tastes flipped, and b -> a.
    """
    return RelabelMap(
        alice={"a": ("b", False), "b": ("a", True)},
        bob={"a": ("b", True), "b": ("a", False)},
    )


def invert_relabeling(relabel: RelabelMap) -> RelabelMap:
    def inv(side: SideMap) -> Dict[str, Tuple[str, bool]]:
        out = {new: (old, flip) for old, (new, flip) in side.items()}
        if len(out) != len(side):
            raise RelabelingError("Relabeling is not injective")
        return out

    return RelabelMap(alice=inv(relabel.alice), bob=inv(relabel.bob))


def _check_side(side: SideMap, labels: Sequence[str], who: str) -> None:
    if set(side) != set(labels):
        raise RelabelingError(f"{who}'s map covers {sorted(side)}, settings are {sorted(labels)}")
    new = [v[0] for v in side.values()]
    if len(set(new)) != len(new):
        raise RelabelingError(f"{who}'s map sends two settings to the same label: {new}")


def relabel_array(array: CorrelationArray, relabel: RelabelMap) -> CorrelationArray:
    """Rename settings and optionally swap outcomes per side.

    Settings keep their positions; use CorrelationArray.reorder to line the
    result up with another array.
    """
    _check_side(relabel.alice, array.labels_a, "Alice")
    _check_side(relabel.bob, array.labels_b, "Bob")

    table = np.array(array.table)
    settings_a, settings_b = [], []
    for i, s in enumerate(array.settings_a):
        new, flip = relabel.alice[s.label]
        settings_a.append(Setting(new, s.half_angle, s.frame))
        if flip:
            table[i] = table[i, :, ::-1, :].copy()
    for j, t in enumerate(array.settings_b):
        new, flip = relabel.bob[t.label]
        settings_b.append(Setting(new, t.half_angle, t.frame))
        if flip:
            table[:, j] = table[:, j, :, ::-1].copy()
    return CorrelationArray(tuple(settings_a), tuple(settings_b), table)
