"""correlations.py

Cells and correlation arrays for two parties with two outcomes per setting.

Outcomes are tastes +1/2 and -1/2. A Cell holds the four joint probabilities
for one setting pair, always in the order (++, +-, -+, --). A CorrelationArray
is the complete grid of cells over Alice's and Bob's setting lists; its table
is an (nA, nB, 2, 2) array indexed [i, j, x, y] with x, y = 0 for + and 1 for -.

Also here:
- first moments and the product moment <AB> of a cell, and the inverse map
- Pearson correlation coefficient
- non-signaling check on marginals
- the balanced-variable construction (diagonal / skew-diagonal averaging)
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, Iterator, List, Mapping, Sequence, Tuple

import numpy as np
import pandas as pd

from brokenarrow.errors import (
    BrokenArrowError,
    InfeasibleMomentsError,
    UndefinedCoefficientError,
)
from brokenarrow.states.basis import Setting

DEFAULT_TOL = 1e-10
CELL_TOL = 1e-9

OUTCOMES = ("+", "-")
OUTCOME_PAIRS = ("++", "+-", "-+", "--")
TASTE = {"+": 0.5, "-": -0.5}

ChiValue = float


# -----------------------------------------------------------------------------
# Cells
# -----------------------------------------------------------------------------

@dataclass(frozen=True)
class Cell:
    """Joint outcome probabilities Pr(xy|st) for one setting pair."""

    p_pp: float
    p_pm: float
    p_mp: float
    p_mm: float

    def __post_init__(self) -> None:
        vals = self.as_tuple()
        if not all(math.isfinite(p) for p in vals):
            raise BrokenArrowError(f"Cell entries must be finite: {vals}")
        if min(vals) < -CELL_TOL or max(vals) > 1 + CELL_TOL:
            raise BrokenArrowError(f"Cell entries must lie in [0, 1]: {vals}")
        if abs(sum(vals) - 1.0) > CELL_TOL:
            raise BrokenArrowError(f"Cell entries must sum to 1, got {sum(vals)!r}")

    @classmethod
    def from_matrix(cls, m: np.ndarray) -> "Cell":
        m = np.asarray(m, dtype=float)
        return cls(float(m[0, 0]), float(m[0, 1]), float(m[1, 0]), float(m[1, 1]))

    def as_tuple(self) -> Tuple[float, float, float, float]:
        return (self.p_pp, self.p_pm, self.p_mp, self.p_mm)

    def matrix(self) -> np.ndarray:
        return np.array([[self.p_pp, self.p_pm], [self.p_mp, self.p_mm]], dtype=float)

    def prob(self, outcome_a: str, outcome_b: str) -> float:
        return float(self.matrix()[OUTCOMES.index(outcome_a), OUTCOMES.index(outcome_b)])


@dataclass(frozen=True)
class Moments:
    """<A>, <B> and the product moment <AB> of a cell.

    `cov` is <AB>; it is the covariance proper whenever <A> or <B> vanishes,
    as it does for balanced variables.
    """

    expA: float
    expB: float
    cov: float


def cell_moments(cell: Cell) -> Moments:
    pp, pm, mp, mm = cell.as_tuple()
    return Moments(
        expA=0.5 * (pp + pm) - 0.5 * (mp + mm),
        expB=0.5 * (pp + mp) - 0.5 * (pm + mm),
        cov=0.25 * (pp + mm) - 0.25 * (pm + mp),
    )


def moments_to_cell(m: Moments, tol: float = 1e-12) -> Cell:
    """Invert cell_moments. Raises InfeasibleMomentsError if a probability leaves [0, 1]."""
    a, b, ab = m.expA, m.expB, m.cov
    probs = [
        0.25 + 0.5 * a + 0.5 * b + ab,
        0.25 + 0.5 * a - 0.5 * b - ab,
        0.25 - 0.5 * a + 0.5 * b - ab,
        0.25 - 0.5 * a - 0.5 * b + ab,
    ]
    if min(probs) < -tol or max(probs) > 1 + tol:
        raise InfeasibleMomentsError(f"Moments {m} imply probabilities {probs}")
    return Cell(*(min(max(p, 0.0), 1.0) for p in probs))


def correlation_coefficient(cell: Cell, tol: float = DEFAULT_TOL) -> ChiValue:
    """Pearson coefficient (<AB> - <A><B>) / (sigma_A sigma_B).

    For balanced cells sigma_A = sigma_B = 1/2 and this is 4 <AB>.
    """
    m = cell_moments(cell)
    var_a = 0.25 - m.expA ** 2
    var_b = 0.25 - m.expB ** 2
    if var_a <= tol or var_b <= tol:
        raise UndefinedCoefficientError(
            f"Correlation coefficient undefined: marginal variances {var_a:.3g}, {var_b:.3g}"
        )
    rho = (m.cov - m.expA * m.expB) / math.sqrt(var_a * var_b)
    return float(np.clip(rho, -1.0, 1.0))


# -----------------------------------------------------------------------------
# Correlation arrays
# -----------------------------------------------------------------------------

def _unique_labels(settings: Sequence[Setting], side: str) -> None:
    labels = [s.label for s in settings]
    if len(set(labels)) != len(labels):
        raise BrokenArrowError(f"Duplicate setting labels for {side}: {labels}")


@dataclass(frozen=True, eq=False)
class CorrelationArray:
    """Complete grid of cells over Alice's and Bob's settings."""

    settings_a: Tuple[Setting, ...]
    settings_b: Tuple[Setting, ...]
    table: np.ndarray

    def __post_init__(self) -> None:
        sa, sb = tuple(self.settings_a), tuple(self.settings_b)
        if not sa or not sb:
            raise BrokenArrowError("A correlation array needs at least one setting per side")
        _unique_labels(sa, "Alice")
        _unique_labels(sb, "Bob")
        t = np.array(self.table, dtype=float)
        if t.shape != (len(sa), len(sb), 2, 2):
            raise BrokenArrowError(f"table shape {t.shape} does not match settings ({len(sa)}, {len(sb)}, 2, 2)")
        for i in range(len(sa)):
            for j in range(len(sb)):
                Cell.from_matrix(t[i, j])  # validates
        t.setflags(write=False)
        object.__setattr__(self, "settings_a", sa)
        object.__setattr__(self, "settings_b", sb)
        object.__setattr__(self, "table", t)

    @classmethod
    def from_cells(
        cls,
        settings_a: Sequence[Setting],
        settings_b: Sequence[Setting],
        cells: Mapping[Tuple[int, int], Cell],
    ) -> "CorrelationArray":
        table = np.empty((len(settings_a), len(settings_b), 2, 2))
        for i in range(len(settings_a)):
            for j in range(len(settings_b)):
                if (i, j) not in cells:
                    raise BrokenArrowError(f"Missing cell ({i}, {j})")
                table[i, j] = cells[(i, j)].matrix()
        return cls(tuple(settings_a), tuple(settings_b), table)

    @property
    def shape(self) -> Tuple[int, int]:
        return (len(self.settings_a), len(self.settings_b))

    @property
    def labels_a(self) -> List[str]:
        return [s.label for s in self.settings_a]

    @property
    def labels_b(self) -> List[str]:
        return [s.label for s in self.settings_b]

    def index_a(self, label: str) -> int:
        return self.labels_a.index(label)

    def index_b(self, label: str) -> int:
        return self.labels_b.index(label)

    def cell(self, i: int, j: int) -> Cell:
        return Cell.from_matrix(self.table[i, j])

    def cell_at(self, label_a: str, label_b: str) -> Cell:
        return self.cell(self.index_a(label_a), self.index_b(label_b))

    def prob(self, label_a: str, label_b: str, outcomes: str) -> float:
        """Pr(xy|st), e.g. prob('a', 'a', '+-')."""
        x, y = OUTCOMES.index(outcomes[0]), OUTCOMES.index(outcomes[1])
        return float(self.table[self.index_a(label_a), self.index_b(label_b), x, y])

    def reorder(self, labels_a: Sequence[str], labels_b: Sequence[str]) -> "CorrelationArray":
        """Same array with settings listed in the given label order."""
        if sorted(labels_a) != sorted(self.labels_a) or sorted(labels_b) != sorted(self.labels_b):
            raise BrokenArrowError(f"reorder needs a permutation of {self.labels_a} / {self.labels_b}")
        ia = [self.index_a(x) for x in labels_a]
        ib = [self.index_b(y) for y in labels_b]
        return CorrelationArray(
            tuple(self.settings_a[i] for i in ia),
            tuple(self.settings_b[j] for j in ib),
            self.table[np.ix_(ia, ib)],
        )

    def cells(self) -> Iterator[Tuple[int, int, Cell]]:
        for i in range(len(self.settings_a)):
            for j in range(len(self.settings_b)):
                yield i, j, self.cell(i, j)

    def to_dict(self) -> dict:
        return {
            "settingsA": self.labels_a,
            "settingsB": self.labels_b,
            "cells": [list(c.as_tuple()) for _, _, c in self.cells()],
        }

    def to_frame(self) -> pd.DataFrame:
        rows = []
        for i, j, c in self.cells():
            for pair, p in zip(OUTCOME_PAIRS, c.as_tuple()):
                rows.append({
                    "setting_a": self.settings_a[i].label,
                    "setting_b": self.settings_b[j].label,
                    "outcome": pair,
                    "probability": p,
                })
        return pd.DataFrame(rows, columns=["setting_a", "setting_b", "outcome", "probability"])


# -----------------------------------------------------------------------------
# Non-signaling
# -----------------------------------------------------------------------------

@dataclass(frozen=True)
class NonSignalingReport:
    passed: bool
    max_discrepancy: float
    discrepancy_a: Dict[str, float]
    discrepancy_b: Dict[str, float]
    tol: float

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "max_discrepancy": self.max_discrepancy,
            "discrepancy_a": self.discrepancy_a,
            "discrepancy_b": self.discrepancy_b,
            "tol": self.tol,
        }


def check_nonsignaling(array: CorrelationArray, tol: float = DEFAULT_TOL) -> NonSignalingReport:
    """Each party's marginal must not depend on the other party's setting."""
    t = array.table
    marg_a = t[:, :, 0, :].sum(axis=-1)  # Pr(A=+ | i, j), shape (nA, nB)
    marg_b = t[:, :, :, 0].sum(axis=-1)  # Pr(B=+ | i, j)
    disc_a = marg_a.max(axis=1) - marg_a.min(axis=1)
    disc_b = marg_b.max(axis=0) - marg_b.min(axis=0)
    worst = float(max(disc_a.max(), disc_b.max()))
    return NonSignalingReport(
        passed=worst <= tol,
        max_discrepancy=worst,
        discrepancy_a={s.label: float(d) for s, d in zip(array.settings_a, disc_a)},
        discrepancy_b={s.label: float(d) for s, d in zip(array.settings_b, disc_b)},
        tol=tol,
    )


def marginals(array: CorrelationArray) -> Dict[str, Dict[str, float]]:
    """Pr(A_{s+}) and Pr(B_{t+}), averaged over the counterpart's settings."""
    t = array.table
    pa = t[:, :, 0, :].sum(axis=-1).mean(axis=1)
    pb = t[:, :, :, 0].sum(axis=-1).mean(axis=0)
    return {
        "A": {s.label: float(p) for s, p in zip(array.settings_a, pa)},
        "B": {s.label: float(p) for s, p in zip(array.settings_b, pb)},
    }


# -----------------------------------------------------------------------------
# Balanced variables
# -----------------------------------------------------------------------------

def balance_array(array: CorrelationArray) -> CorrelationArray:
    """Average each cell with its outcome-flipped copy.

    Records the taste in even runs and minus the taste in odd runs: both
    diagonal entries become the diagonal mean, both skew-diagonal entries the
    skew-diagonal mean. Expectation values vanish, <AB> is unchanged.
    """
    t = array.table
    diag = 0.5 * (t[..., 0, 0] + t[..., 1, 1])
    skew = 0.5 * (t[..., 0, 1] + t[..., 1, 0])
    out = np.empty_like(t)
    out[..., 0, 0] = diag
    out[..., 1, 1] = diag
    out[..., 0, 1] = skew
    out[..., 1, 0] = skew
    return CorrelationArray(array.settings_a, array.settings_b, out)


def product_chis(array: CorrelationArray) -> np.ndarray:
    """4 <AB> for every cell, shape (nA, nB)."""
    t = array.table
    return (t[..., 0, 0] + t[..., 1, 1]) - (t[..., 0, 1] + t[..., 1, 0])


def chsh_chis(array: CorrelationArray) -> Tuple[float, float, float, float]:
    """(chi_a'c', chi_a'd', chi_b'c', chi_b'd') of a 2x2 array's balanced version.

    Alice's settings play a', b' and Bob's c', d', in array order.
    """
    if array.shape != (2, 2):
        raise BrokenArrowError(f"CHSH coefficients need a 2x2 array, got {array.shape}")
    chi = product_chis(balance_array(array))
    return (float(chi[0, 0]), float(chi[0, 1]), float(chi[1, 0]), float(chi[1, 1]))


def mermin_point(array: CorrelationArray) -> Tuple[float, float, float]:
    """(chi_ab, chi_ac, chi_bc) of a 3x3 shared-setting array."""
    if array.shape != (3, 3):
        raise BrokenArrowError(f"Mermin coordinates need a 3x3 array, got {array.shape}")
    chi = product_chis(balance_array(array))
    return (float(chi[0, 1]), float(chi[0, 2]), float(chi[1, 2]))
