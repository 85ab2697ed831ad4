"""raffles.py

Raffle-ticket local hidden-variable models.

A ticket fixes an outcome (+1 or -1, i.e. taste +1/2 or -1/2) for every
setting on both halves. Drawing a ticket and tearing it along the perforation
gives each party a deterministic answer for whichever setting they pick; a
raffle is a weighted basket of tickets.

Two kinds of scenario:
- distinct: Alice and Bob have their own setting lists, every half is free,
  2^(nA + nB) tickets.
- shared: both parties choose from the same list and same settings always give
  opposite tastes. A ticket is then one sign vector s with the other half -s,
  and either half may go to Alice. Since the halves are handed out at random,
  s and -s give identical statistics; only 2^(n-1) classes are distinct.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from brokenarrow.arrays.correlations import CorrelationArray
from brokenarrow.errors import BrokenArrowError
from brokenarrow.states.basis import Setting

WEIGHT_TOL = 1e-12

Signs = Tuple[int, ...]


@dataclass(frozen=True)
class Scenario:
    """Setting lists per side; `shared` means both halves are anticorrelated copies."""

    settings_a: Tuple[Setting, ...]
    settings_b: Tuple[Setting, ...]
    shared: bool = False

    def __post_init__(self) -> None:
        sa, sb = tuple(self.settings_a), tuple(self.settings_b)
        if not sa or not sb:
            raise BrokenArrowError("A scenario needs at least one setting per side")
        if self.shared and [s.label for s in sa] != [s.label for s in sb]:
            raise BrokenArrowError("Shared-setting scenarios need the same setting list on both sides")
        object.__setattr__(self, "settings_a", sa)
        object.__setattr__(self, "settings_b", sb)

    @classmethod
    def for_array(cls, array: CorrelationArray, shared: bool = False) -> "Scenario":
        return cls(array.settings_a, array.settings_b, shared)

    @property
    def labels_a(self) -> List[str]:
        return [s.label for s in self.settings_a]

    @property
    def labels_b(self) -> List[str]:
        return [s.label for s in self.settings_b]

    @property
    def shape(self) -> Tuple[int, int]:
        return (len(self.settings_a), len(self.settings_b))


def chsh_scenario(alpha: float = math.pi / 4) -> Scenario:
    """Two distinct settings per side, a at half-angle 0 and b at alpha."""
    settings = (Setting("a", 0.0), Setting("b", alpha))
    return Scenario(settings, settings, shared=False)


def mermin_scenario() -> Scenario:
    """Three shared settings with peeling directions 120 degrees apart."""
    settings = tuple(
        Setting.from_peeling_angle(label, k * 2 * math.pi / 3) for k, label in enumerate("abc")
    )
    return Scenario(settings, settings, shared=True)


# -----------------------------------------------------------------------------
# Tickets
# -----------------------------------------------------------------------------

@dataclass(frozen=True)
class Ticket:
    """Signs (+1 / -1) for Alice's and Bob's settings, in scenario order."""

    alice: Signs
    bob: Signs

    def __post_init__(self) -> None:
        for signs in (self.alice, self.bob):
            if not signs or any(s not in (1, -1) for s in signs):
                raise BrokenArrowError(f"Ticket signs must be +1/-1 for every setting, got {signs}")

    def swapped(self) -> "Ticket":
        return Ticket(self.bob, self.alice)

    @property
    def name(self) -> str:
        def fmt(signs: Signs) -> str:
            return "".join("+" if s > 0 else "-" for s in signs)

        return f"{fmt(self.alice)}|{fmt(self.bob)}"

    def table(self) -> np.ndarray:
        """Deterministic (nA, nB, 2, 2) array of this ticket."""
        out = np.zeros((len(self.alice), len(self.bob), 2, 2))
        for i, sa in enumerate(self.alice):
            for j, sb in enumerate(self.bob):
                out[i, j, 0 if sa > 0 else 1, 0 if sb > 0 else 1] = 1.0
        return out


def enumerate_tickets(scenario: Scenario, quotient: bool = True) -> List[Ticket]:
    """All tickets of a scenario.

    Shared scenarios return one representative per flip class (first sign +),
    or all 2^n sign vectors with quotient=False.
    """
    na, nb = scenario.shape
    if not scenario.shared:
        return [
            Ticket(tuple(signs[:na]), tuple(signs[na:]))
            for signs in itertools.product((1, -1), repeat=na + nb)
        ]
    tickets = []
    for signs in itertools.product((1, -1), repeat=na):
        if quotient and signs[0] < 0:
            continue
        tickets.append(Ticket(tuple(signs), tuple(-s for s in signs)))
    return tickets


def ticket_table(ticket: Ticket, shared: bool) -> np.ndarray:
    """Array contributed by one ticket; shared tickets average both half assignments."""
    if shared:
        return 0.5 * (ticket.table() + ticket.swapped().table())
    return ticket.table()


def ticket_chis(
    ticket: Ticket, scenario: Scenario, pairs: Optional[Sequence[Tuple[str, str]]] = None
) -> List[float]:
    """+1 where the two outcomes agree, -1 where they differ, per (Alice, Bob) setting pair.

    Defaults to every pair of distinct labels (ab, ac, bc, ...) in a shared
    scenario and to every (Alice, Bob) pair otherwise.
    """
    if pairs is None:
        if scenario.shared:
            pairs = list(itertools.combinations(scenario.labels_a, 2))
        else:
            pairs = list(itertools.product(scenario.labels_a, scenario.labels_b))
    out = []
    for la, lb in pairs:
        try:
            sa = ticket.alice[scenario.labels_a.index(la)]
            sb = ticket.bob[scenario.labels_b.index(lb)]
        except ValueError:
            raise BrokenArrowError(f"Ticket does not cover settings ({la}, {lb})") from None
        out.append(float(sa * sb))
    return out


def tickets_frame(tickets: Sequence[Ticket], scenario: Scenario, weights: Optional[Sequence[float]] = None) -> pd.DataFrame:
    """One row per ticket, one column per (side, setting)."""
    rows = []
    for k, t in enumerate(tickets):
        row: Dict[str, object] = {"ticket": k, "name": t.name}
        row.update({f"A_{lab}": "+" if s > 0 else "-" for lab, s in zip(scenario.labels_a, t.alice)})
        row.update({f"B_{lab}": "+" if s > 0 else "-" for lab, s in zip(scenario.labels_b, t.bob)})
        if weights is not None:
            row["weight"] = float(weights[k])
        rows.append(row)
    return pd.DataFrame(rows)


# -----------------------------------------------------------------------------
# Raffles
# -----------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Raffle:
    scenario: Scenario
    tickets: Tuple[Ticket, ...]
    weights: np.ndarray

    def __post_init__(self) -> None:
        tickets = tuple(self.tickets)
        w = np.array(self.weights, dtype=float).reshape(-1)
        if not tickets or w.shape != (len(tickets),):
            raise BrokenArrowError(f"Need one weight per ticket, got {w.shape} for {len(tickets)} tickets")
        if np.any(w < -WEIGHT_TOL) or abs(w.sum() - 1.0) > WEIGHT_TOL:
            raise BrokenArrowError(f"Raffle weights must be nonnegative and sum to 1, sum = {w.sum()!r}")
        na, nb = self.scenario.shape
        for t in tickets:
            if (len(t.alice), len(t.bob)) != (na, nb):
                raise BrokenArrowError(f"Ticket {t.name} does not match scenario shape {(na, nb)}")
        w = np.clip(w, 0.0, None)
        w.setflags(write=False)
        object.__setattr__(self, "tickets", tickets)
        object.__setattr__(self, "weights", w)

    @classmethod
    def uniform(cls, scenario: Scenario, tickets: Optional[Sequence[Ticket]] = None) -> "Raffle":
        tickets = list(tickets) if tickets is not None else enumerate_tickets(scenario)
        return cls(scenario, tuple(tickets), np.full(len(tickets), 1.0 / len(tickets)))

    @classmethod
    def single(cls, scenario: Scenario, ticket: Ticket) -> "Raffle":
        return cls(scenario, (ticket,), np.ones(1))

    @property
    def half_assignment(self) -> str:
        return "random" if self.scenario.shared else "fixed"

    def to_dict(self) -> dict:
        return {
            "settingsA": self.scenario.labels_a,
            "settingsB": self.scenario.labels_b,
            "shared": self.scenario.shared,
            "half_assignment": self.half_assignment,
            "tickets": [t.name for t in self.tickets],
            "weights": [float(w) for w in self.weights],
        }


def raffle_array(raffle: Raffle) -> CorrelationArray:
    """Weighted mixture of the tickets' deterministic arrays."""
    shared = raffle.scenario.shared
    table = sum(w * ticket_table(t, shared) for t, w in zip(raffle.tickets, raffle.weights))
    return CorrelationArray(raffle.scenario.settings_a, raffle.scenario.settings_b, table)
