"""feasibility.py

Decide whether a correlation array can be produced by a raffle.

The unknowns are one weight per ticket plus a pair of slacks (s+, s-) per
cell entry:

    sum_k w_k T_k[i, j, x, y] + s+ - s- = p[i, j, x, y]
    sum_k w_k = 1,   w, s+, s- >= 0

and the objective is the total slack. The array lies in the local polytope
exactly when the optimum is zero; numerically we call it feasible below tol.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
from scipy.optimize import linprog

from brokenarrow.arrays.correlations import CorrelationArray, check_nonsignaling
from brokenarrow.errors import SignalingError
from brokenarrow.lhv.raffles import Raffle, Scenario, Ticket, enumerate_tickets, ticket_table

FEASIBILITY_TOL = 1e-9
SIGNALING_TOL = 1e-10
LP_METHOD = "highs-ds"


@dataclass(frozen=True, eq=False)
class FeasibilityResult:
    feasible: bool
    objective: float
    max_residual: float
    scenario: Scenario
    tickets: Tuple[Ticket, ...]
    weights: Optional[np.ndarray] = None
    tol: float = FEASIBILITY_TOL
    status: str = ""

    def raffle(self) -> Optional[Raffle]:
        """The witness raffle, restricted to tickets with positive weight."""
        if self.weights is None:
            return None
        keep = [k for k, w in enumerate(self.weights) if w > 0]
        w = self.weights[keep]
        return Raffle(self.scenario, tuple(self.tickets[k] for k in keep), w / w.sum())

    def support(self, min_weight: float = 1e-12) -> List[Tuple[str, float]]:
        if self.weights is None:
            return []
        return [(t.name, float(w)) for t, w in zip(self.tickets, self.weights) if w > min_weight]

    def to_dict(self) -> dict:
        return {
            "feasible": self.feasible,
            "objective": self.objective if math.isfinite(self.objective) else None,
            "max_residual": self.max_residual if math.isfinite(self.max_residual) else None,
            "tol": self.tol,
            "shared": self.scenario.shared,
            "n_tickets": len(self.tickets),
            "weights": None if self.weights is None else [float(w) for w in self.weights],
            "support": [{"ticket": name, "weight": w} for name, w in self.support()],
            "status": self.status,
        }


def lhv_feasibility(
    array: CorrelationArray,
    tol: float = FEASIBILITY_TOL,
    shared: bool = False,
    signaling_tol: float = SIGNALING_TOL,
) -> FeasibilityResult:
    """Solve for ticket weights reproducing `array`.

    Signaling arrays are rejected before solving. With shared=True the
    tickets are the flip classes of a shared-setting scenario.
    """
    report = check_nonsignaling(array, tol=signaling_tol)
    if not report.passed:
        raise SignalingError(
            f"Array is signaling (max marginal discrepancy {report.max_discrepancy:.3g}); "
            "no raffle can reproduce it"
        )

    scenario = Scenario.for_array(array, shared=shared)
    tickets = tuple(enumerate_tickets(scenario))
    # columns: one flattened deterministic array per ticket
    t_mat = np.stack([ticket_table(t, shared).reshape(-1) for t in tickets], axis=1)
    p = array.table.reshape(-1)
    m, k = t_mat.shape

    a_eq = np.block([
        [t_mat, np.eye(m), -np.eye(m)],
        [np.ones((1, k)), np.zeros((1, 2 * m))],
    ])
    b_eq = np.concatenate([p, [1.0]])
    c = np.concatenate([np.zeros(k), np.ones(2 * m)])

    lp = linprog(c, A_eq=a_eq, b_eq=b_eq, bounds=(0, None), method=LP_METHOD)
    if not lp.success:
        return FeasibilityResult(
            feasible=False, objective=float("inf"), max_residual=float("inf"),
            scenario=scenario, tickets=tickets, tol=tol, status=str(lp.message),
        )

    weights = np.clip(lp.x[:k], 0.0, None)
    weights = weights / weights.sum()
    residual = float(np.max(np.abs(t_mat @ weights - p)))
    feasible = bool(lp.fun < tol and residual < tol)
    return FeasibilityResult(
        feasible=feasible,
        objective=float(lp.fun),
        max_residual=residual,
        scenario=scenario,
        tickets=tickets,
        weights=weights if feasible else None,
        tol=tol,
        status=str(lp.message),
    )
