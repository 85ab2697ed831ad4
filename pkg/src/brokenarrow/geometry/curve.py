"""curve.py

The Hardy-Unruh states traced through the symmetric CHSH slice.

After balancing, the HU array at alpha is a point
(chi_a'c', chi_a'd' = chi_b'c', chi_b'd') = 4 (<AB>_aa, <AB>_ab, <AB>_bb).
The curve runs from the local vertex (1, 1, 1) at alpha = 0 to (-1, 1, -1) at
alpha = pi/2 and, in between, breaks the third CHSH pair by exactly four
times the broken-arrow witness:

    chi_a'c' - chi_a'd' - chi_b'c' - chi_b'd' = -2 - 4 Pr(+-|aa)
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Dict, List, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.optimize import minimize_scalar

from brokenarrow.arrays.correlations import chsh_chis
from brokenarrow.errors import DomainError
from brokenarrow.geometry.facets import ChiPoint, chsh_local_test, landau_test
from brokenarrow.states.qstate import hardy_witness, hu_array, hu_witness

# (5 sqrt 5 - 11) / 2 = (2 / (1 + sqrt 5))^5
HARDY_MAX_WITNESS = 0.5 * (5.0 * math.sqrt(5.0) - 11.0)
GOLDEN_MAX_WITNESS = (2.0 / (1.0 + math.sqrt(5.0))) ** 5

GRID_POINTS = 10_000

WITNESSES: Dict[str, Callable[[float], float]] = {
    "hardy": hardy_witness,
    "hu": hu_witness,
}


def _check(alpha: float) -> float:
    if not math.isfinite(alpha) or alpha < -1e-12 or alpha > math.pi / 2 + 1e-12:
        raise DomainError(f"alpha must lie in [0, pi/2], got {alpha}")
    return min(max(float(alpha), 0.0), math.pi / 2)


def hu_curve_point(alpha: float) -> ChiPoint:
    alpha = _check(alpha)
    c2, s2 = math.cos(alpha) ** 2, math.sin(alpha) ** 2
    d = 1.0 + c2
    x = (2.0 * c2 ** 3 - s2 * d ** 2 - c2 ** 2 * s2) / d
    y = (c2 ** 2 + 1.0 - c2 * s2) / d
    z = (2.0 * c2 - s2) / d
    return ChiPoint(x, y, z)


def hu_curve(alphas: Sequence[float]) -> List[ChiPoint]:
    """Closed-form curve points for each alpha."""
    return [hu_curve_point(a) for a in alphas]


def hu_curve_from_states(alphas: Sequence[float]) -> List[Tuple[float, float, float, float]]:
    """(ac, ad, bc, bd) from the balanced Born-rule arrays of hu_state(alpha)."""
    return [chsh_chis(hu_array(_check(a))) for a in alphas]


@dataclass(frozen=True)
class ViolationIdentity:
    alpha: float
    lhs: float
    rhs: float
    witness: float

    @property
    def gap(self) -> float:
        return abs(self.lhs - self.rhs)

    def to_dict(self) -> dict:
        return {"alpha": self.alpha, "lhs": self.lhs, "rhs": self.rhs, "witness": self.witness}


def violation_identity(alpha: float, from_states: bool = False) -> ViolationIdentity:
    """Third CHSH expression on the curve versus -2 - 4 Pr(+-|aa)."""
    alpha = _check(alpha)
    if from_states:
        ac, ad, bc, bd = hu_curve_from_states([alpha])[0]
    else:
        ac, ad, bc, bd = hu_curve_point(alpha).chsh_chis()
    w = hu_witness(alpha)
    return ViolationIdentity(alpha=alpha, lhs=ac - ad - bc - bd, rhs=-2.0 - 4.0 * w, witness=w)


def curve_frame(alphas: Sequence[float]) -> pd.DataFrame:
    """One row per alpha: the curve point, the identity and membership flags."""
    rows = []
    for a in alphas:
        p = hu_curve_point(a)
        ident = violation_identity(a)
        chis = p.chsh_chis()
        rows.append({
            "alpha": ident.alpha,
            "chi1": p.x,
            "chi2": p.y,
            "chi3": p.z,
            "lhs": ident.lhs,
            "witness": ident.witness,
            "in_L": chsh_local_test(chis).inside,
            "in_Q": landau_test(chis).inside,
        })
    return pd.DataFrame(rows, columns=["alpha", "chi1", "chi2", "chi3", "lhs", "witness", "in_L", "in_Q"])


def alpha_grid(points: int) -> np.ndarray:
    """Inclusive grid on [0, pi/2]."""
    if points < 2:
        raise DomainError(f"need at least 2 grid points, got {points}")
    return np.linspace(0.0, math.pi / 2, points)


@dataclass(frozen=True)
class WitnessMaximum:
    family: str
    alpha: float
    value: float

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "alpha": self.alpha,
            "cos_alpha": math.cos(self.alpha),
            "value": self.value,
            "closed_form": HARDY_MAX_WITNESS,
        }


def max_witness(family: str = "hardy", grid_points: int = GRID_POINTS) -> WitnessMaximum:
    """Maximize the broken-arrow witness over alpha.

    A grid locates the peak; golden-section search refines it within the
    neighbouring grid interval.
    """
    if family not in WITNESSES:
        raise DomainError(f"Unknown family {family!r}; expected one of {sorted(WITNESSES)}")
    f = WITNESSES[family]
    grid = alpha_grid(grid_points)
    values = np.array([f(a) for a in grid])
    k = int(np.clip(np.argmax(values), 1, len(grid) - 2))
    res = minimize_scalar(
        lambda a: -f(_check(a)),
        bracket=(grid[k - 1], grid[k], grid[k + 1]),
        method="golden",
        options={"xtol": 1e-12},
    )
    return WitnessMaximum(family=family, alpha=float(res.x), value=float(-res.fun))
