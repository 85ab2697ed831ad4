"""facets.py

Membership tests in the three-coefficient correlation cube.

Two setups share the cube [-1, 1]^3 (the non-signaling polytope P):

- mermin: (chi_ab, chi_ac, chi_bc) for three shared settings. The local
  polytope L is the tetrahedron spanned by the four raffle vertices; the
  quantum set Q is the elliptope.
- chsh: the symmetric slice (chi_a'c', chi_a'd' = chi_b'c', chi_b'd') of the
  two-setting scenario. L is cut out by the CHSH inequalities; Q by Landau's
  inequality.

Every test reports raw slacks / residuals together with a flag at `tol`.
The array helpers (`*_slacks`, `*_residual`) take (..., 3) or (..., 4)
arrays and are what the mesh emitter uses.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Tuple, Union

import numpy as np

from brokenarrow.errors import DomainError, RegionError

BOUNDARY_TOL = 1e-9
UNIT_TOL = 1e-12

SETUPS = ("mermin", "chsh")

# sign patterns s with -3 <= s . chi <= 1
MERMIN_SIGNS = np.array([
    [1, 1, 1],
    [1, -1, -1],
    [-1, 1, -1],
    [-1, -1, 1],
], dtype=float)

# rows: coefficients of (ac, ad, bc, bd) in the four CHSH expressions
CHSH_SIGNS = np.array([
    [1, 1, 1, -1],
    [-1, 1, -1, -1],
    [1, -1, -1, -1],
    [-1, -1, 1, -1],
], dtype=float)


@dataclass(frozen=True)
class ChiPoint:
    """Three correlation coefficients; see the module docstring for their meaning per setup."""

    x: float
    y: float
    z: float

    @classmethod
    def of(cls, coords: Sequence[float]) -> "ChiPoint":
        if len(coords) != 3:
            raise DomainError(f"ChiPoint takes 3 coordinates, got {len(coords)}")
        return cls(float(coords[0]), float(coords[1]), float(coords[2]))

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    def as_tuple(self) -> Tuple[float, float, float]:
        return (self.x, self.y, self.z)

    def chsh_chis(self) -> Tuple[float, float, float, float]:
        """(ac, ad, bc, bd) of a symmetric-slice point."""
        return (self.x, self.y, self.y, self.z)


@dataclass(frozen=True, eq=False)
class DirectionSet:
    """Unit vectors e_a, e_b, e_c along three peeling directions."""

    e_a: np.ndarray
    e_b: np.ndarray
    e_c: np.ndarray

    def __post_init__(self) -> None:
        for name in ("e_a", "e_b", "e_c"):
            v = np.asarray(getattr(self, name), dtype=float)
            if v.shape != (3,):
                raise DomainError(f"{name} must be a 3-vector, got shape {v.shape}")
            if abs(float(np.linalg.norm(v)) - 1.0) > UNIT_TOL:
                raise DomainError(f"{name} must be a unit vector, |{name}| = {np.linalg.norm(v)!r}")
            object.__setattr__(self, name, v)


@dataclass(frozen=True)
class FacetTest:
    inside: bool
    expressions: Tuple[float, ...]
    slacks: Tuple[float, ...]

    def to_dict(self) -> dict:
        return {"inside": self.inside, "expressions": list(self.expressions), "slacks": list(self.slacks)}


@dataclass(frozen=True)
class ResidualTest:
    inside: bool
    residual: float

    def to_dict(self) -> dict:
        return {"inside": self.inside, "residual": self.residual}


@dataclass(frozen=True)
class RegionReport:
    setup: str
    point: Tuple[float, ...]
    in_L: bool
    in_Q: bool
    in_P: bool
    local: FacetTest
    quantum: ResidualTest
    cube_slack: float
    tol: float

    @property
    def label(self) -> str:
        """Innermost region containing the point."""
        if self.in_L:
            return "L"
        if self.in_Q:
            return "Q"
        if self.in_P:
            return "P"
        return "outside"

    def to_dict(self) -> dict:
        return {
            "setup": self.setup,
            "point": list(self.point),
            "in_L": self.in_L,
            "in_Q": self.in_Q,
            "in_P": self.in_P,
            "label": self.label,
            "local": self.local.to_dict(),
            "quantum": self.quantum.to_dict(),
            "cube_slack": self.cube_slack,
            "tol": self.tol,
        }


# -----------------------------------------------------------------------------
# Array helpers
# -----------------------------------------------------------------------------

def mermin_expressions(p: np.ndarray) -> np.ndarray:
    """s . chi for the four sign patterns, shape (..., 4)."""
    return np.asarray(p, dtype=float) @ MERMIN_SIGNS.T


def mermin_slacks(p: np.ndarray) -> np.ndarray:
    e = mermin_expressions(p)
    return np.minimum(1.0 - e, e + 3.0)


def elliptope_residual(p: np.ndarray) -> np.ndarray:
    """1 - x^2 - y^2 - z^2 - 2xyz; nonnegative on the elliptope."""
    p = np.asarray(p, dtype=float)
    x, y, z = p[..., 0], p[..., 1], p[..., 2]
    return 1.0 - x * x - y * y - z * z - 2.0 * x * y * z


def chsh_expressions(chis: np.ndarray) -> np.ndarray:
    return np.asarray(chis, dtype=float) @ CHSH_SIGNS.T


def chsh_slacks(chis: np.ndarray) -> np.ndarray:
    return 2.0 - np.abs(chsh_expressions(chis))


def landau_residual(chis: np.ndarray) -> np.ndarray:
    """rhs - lhs of Landau's inequality; nonnegative on the quantum set."""
    c = np.asarray(chis, dtype=float)
    ac, ad, bc, bd = c[..., 0], c[..., 1], c[..., 2], c[..., 3]

    def root(t: np.ndarray) -> np.ndarray:
        return np.sqrt(np.clip(1.0 - t * t, 0.0, None))

    lhs = np.abs(ac * bc - ad * bd)
    rhs = root(ac) * root(bc) + root(ad) * root(bd)
    return rhs - lhs


def symmetric_chis(p: np.ndarray) -> np.ndarray:
    """(x, y, z) -> (x, y, y, z) along the last axis."""
    p = np.asarray(p, dtype=float)
    return np.stack([p[..., 0], p[..., 1], p[..., 1], p[..., 2]], axis=-1)


def cube_slack(p: np.ndarray) -> np.ndarray:
    return 1.0 - np.max(np.abs(np.asarray(p, dtype=float)), axis=-1)


def membership(p: np.ndarray, setup: str, tol: float = BOUNDARY_TOL) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized (in_L, in_Q, in_P) for points of shape (..., 3)."""
    p = np.asarray(p, dtype=float)
    in_p = cube_slack(p) >= -tol
    if setup == "mermin":
        in_l = np.all(mermin_slacks(p) >= -tol, axis=-1)
        in_q = elliptope_residual(p) >= -tol
    elif setup == "chsh":
        chis = symmetric_chis(p)
        in_l = np.all(chsh_slacks(chis) >= -tol, axis=-1)
        in_q = landau_residual(chis) >= -tol
    else:
        raise RegionError(f"Unknown setup {setup!r}; expected one of {SETUPS}")
    return in_l & in_p, in_q & in_p, in_p


# -----------------------------------------------------------------------------
# Point tests
# -----------------------------------------------------------------------------

def mermin_local_test(p: ChiPoint, tol: float = BOUNDARY_TOL) -> FacetTest:
    """All four facet pairs -3 <= s . chi <= 1 of the raffle tetrahedron."""
    e = mermin_expressions(p.as_array())
    slacks = np.minimum(1.0 - e, e + 3.0)
    return FacetTest(bool(np.all(slacks >= -tol)), tuple(map(float, e)), tuple(map(float, slacks)))


def elliptope_test(p: ChiPoint, tol: float = BOUNDARY_TOL) -> ResidualTest:
    r = float(elliptope_residual(p.as_array()))
    return ResidualTest(r >= -tol, r)


def gram_from_directions(d: DirectionSet) -> ChiPoint:
    """chi_xy = -e_x . e_y (singlet correlations for these peeling directions)."""
    return ChiPoint(
        -float(np.dot(d.e_a, d.e_b)),
        -float(np.dot(d.e_a, d.e_c)),
        -float(np.dot(d.e_b, d.e_c)),
    )


def _chis4(chis: Sequence[float]) -> np.ndarray:
    c = np.asarray(chis, dtype=float)
    if c.shape != (4,):
        raise DomainError(f"Expected 4 coefficients (ac, ad, bc, bd), got shape {c.shape}")
    return c


def chsh_local_test(chis: Sequence[float], tol: float = BOUNDARY_TOL) -> FacetTest:
    """The four CHSH expressions; inside when each lies in [-2, 2]."""
    c = _chis4(chis)
    e = chsh_expressions(c)
    slacks = 2.0 - np.abs(e)
    return FacetTest(bool(np.all(slacks >= -tol)), tuple(map(float, e)), tuple(map(float, slacks)))


def landau_test(chis: Sequence[float], tol: float = BOUNDARY_TOL) -> ResidualTest:
    r = float(landau_residual(_chis4(chis)))
    return ResidualTest(r >= -tol, r)


def region_report(
    point: Union[ChiPoint, Sequence[float]],
    setup: str = "mermin",
    tol: float = BOUNDARY_TOL,
) -> RegionReport:
    """L / Q / P membership of a point.

    For setup 'chsh' the point may also be the full (ac, ad, bc, bd) quadruple.
    """
    if isinstance(point, ChiPoint):
        coords = point.as_array()
    else:
        coords = np.asarray(point, dtype=float)
    if setup == "mermin":
        if coords.shape != (3,):
            raise DomainError(f"Mermin points have 3 coordinates, got {coords.shape}")
        local = mermin_local_test(ChiPoint.of(coords), tol)
        quantum = elliptope_test(ChiPoint.of(coords), tol)
    elif setup == "chsh":
        chis = coords if coords.shape == (4,) else symmetric_chis(coords)
        local = chsh_local_test(chis, tol)
        quantum = landau_test(chis, tol)
    else:
        raise RegionError(f"Unknown setup {setup!r}; expected one of {SETUPS}")
    cs = float(cube_slack(coords))
    in_p = cs >= -tol
    in_q = in_p and quantum.inside
    in_l = in_p and local.inside
    return RegionReport(
        setup=setup,
        point=tuple(map(float, coords)),
        in_L=in_l,
        in_Q=in_q,
        in_P=in_p,
        local=local,
        quantum=quantum,
        cube_slack=cs,
        tol=tol,
    )
