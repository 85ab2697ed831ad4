"""regions.py

Plot-ready samples of the regions L, Q and P.

Modes:
- grid        full 3D grid over the cube with membership flags and the
              innermost label per point
- boundary    points on the boundary surface of one region
- section     2D grid with the dropped coordinate fixed at `fix`
- projection  2D grid; a point is in a region when some value of the
              dropped coordinate (scanned on the same resolution) is
- curve       the Hardy-Unruh curve overlay (chsh setup)

Rows are ordered by grid index so output is deterministic.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np
import pandas as pd

from brokenarrow.errors import RegionError
from brokenarrow.geometry.curve import alpha_grid, hu_curve
from brokenarrow.geometry.facets import (
    BOUNDARY_TOL,
    MERMIN_SIGNS,
    SETUPS,
    elliptope_residual,
    landau_residual,
    membership,
    symmetric_chis,
)

REGIONS = ("L", "Q", "P")
MODES = ("grid", "boundary", "section", "projection", "curve")
AXES = ("x", "y", "z")

# L facets of the symmetric CHSH slice as (normal, bound): n . p <= b.
# |x + z| <= 2 only touches the cube along an edge and is left out of the boundary.
CHSH_SLICE_FACETS = [
    ((1.0, 2.0, -1.0), 2.0),
    ((-1.0, -2.0, 1.0), 2.0),
    ((1.0, -2.0, -1.0), 2.0),
    ((-1.0, 2.0, 1.0), 2.0),
]


@dataclass(frozen=True)
class RegionSpec:
    region: str = "L"
    setup: str = "mermin"
    mode: str = "grid"
    resolution: int = 50
    axis: int = 2
    fix: float = 0.0
    tol: float = BOUNDARY_TOL

    def __post_init__(self) -> None:
        if self.region not in REGIONS:
            raise RegionError(f"Unknown region {self.region!r}; expected one of {REGIONS}")
        if self.setup not in SETUPS:
            raise RegionError(f"Unknown setup {self.setup!r}; expected one of {SETUPS}")
        if self.mode not in MODES:
            raise RegionError(f"Unknown mode {self.mode!r}; expected one of {MODES}")
        if self.resolution < 1:
            raise RegionError(f"resolution must be > 0, got {self.resolution}")
        if self.axis not in (0, 1, 2):
            raise RegionError(f"axis must be 0, 1 or 2, got {self.axis}")
        if not -1.0 <= self.fix <= 1.0:
            raise RegionError(f"fix must lie in [-1, 1], got {self.fix}")


def _line(resolution: int) -> np.ndarray:
    return np.linspace(-1.0, 1.0, max(resolution, 2))


def _labels(in_l: np.ndarray, in_q: np.ndarray, in_p: np.ndarray) -> np.ndarray:
    return np.where(in_l, "L", np.where(in_q, "Q", np.where(in_p, "P", "outside")))


def _quantum_residual(points: np.ndarray, setup: str) -> np.ndarray:
    if setup == "mermin":
        return elliptope_residual(points)
    return landau_residual(symmetric_chis(points))


def _frame(points: np.ndarray, spec: RegionSpec) -> pd.DataFrame:
    in_l, in_q, in_p = membership(points, spec.setup, spec.tol)
    flags = {"L": in_l, "Q": in_q, "P": in_p}
    return pd.DataFrame({
        "x": points[:, 0],
        "y": points[:, 1],
        "z": points[:, 2],
        "label": _labels(in_l, in_q, in_p),
        "in_region": flags[spec.region],
        "in_L": in_l,
        "in_Q": in_q,
        "in_P": in_p,
        "quantum_residual": _quantum_residual(points, spec.setup),
    })


def _grid(spec: RegionSpec) -> pd.DataFrame:
    t = _line(spec.resolution)
    pts = np.array(list(itertools.product(t, t, t)))
    return _frame(pts, spec)


def _plane_axes(axis: int) -> Tuple[int, int]:
    u, v = [k for k in range(3) if k != axis]
    return u, v


def _embed(u_vals: np.ndarray, v_vals: np.ndarray, w_vals: np.ndarray, axis: int) -> np.ndarray:
    """Points with (u, v) on the kept axes and w on `axis`."""
    ku, kv = _plane_axes(axis)
    pts = np.empty((len(u_vals), 3))
    pts[:, ku] = u_vals
    pts[:, kv] = v_vals
    pts[:, axis] = w_vals
    return pts


def _section(spec: RegionSpec) -> pd.DataFrame:
    t = _line(spec.resolution)
    uv = np.array(list(itertools.product(t, t)))
    pts = _embed(uv[:, 0], uv[:, 1], np.full(len(uv), spec.fix), spec.axis)
    frame = _frame(pts, spec)
    frame.insert(0, "fixed_axis", AXES[spec.axis])
    return frame


def _projection(spec: RegionSpec) -> pd.DataFrame:
    t = _line(spec.resolution)
    uv = np.array(list(itertools.product(t, t)))
    any_l = np.zeros(len(uv), dtype=bool)
    any_q = np.zeros(len(uv), dtype=bool)
    any_p = np.zeros(len(uv), dtype=bool)
    for w in t:
        pts = _embed(uv[:, 0], uv[:, 1], np.full(len(uv), w), spec.axis)
        in_l, in_q, in_p = membership(pts, spec.setup, spec.tol)
        any_l |= in_l
        any_q |= in_q
        any_p |= in_p
    flags = {"L": any_l, "Q": any_q, "P": any_p}
    ku, kv = _plane_axes(spec.axis)
    return pd.DataFrame({
        "dropped_axis": AXES[spec.axis],
        AXES[ku]: uv[:, 0],
        AXES[kv]: uv[:, 1],
        "label": _labels(any_l, any_q, any_p),
        "in_region": flags[spec.region],
        "in_L": any_l,
        "in_Q": any_q,
        "in_P": any_p,
    })


def _facet_points(normal: Tuple[float, float, float], bound: float, solve_axis: int, t: np.ndarray) -> np.ndarray:
    """Points of the plane normal . p = bound over a grid of the other two axes."""
    n = np.asarray(normal, dtype=float)
    ku, kv = _plane_axes(solve_axis)
    uv = np.array(list(itertools.product(t, t)))
    w = (bound - n[ku] * uv[:, 0] - n[kv] * uv[:, 1]) / n[solve_axis]
    return _embed(uv[:, 0], uv[:, 1], w, solve_axis)


def _boundary_points(spec: RegionSpec) -> Tuple[np.ndarray, List[str]]:
    t = _line(spec.resolution)
    chunks: List[np.ndarray] = []
    names: List[str] = []

    def add(pts: np.ndarray, name: str) -> None:
        chunks.append(pts)
        names.extend([name] * len(pts))

    if spec.region == "P":
        for axis, sign in itertools.product(range(3), (-1.0, 1.0)):
            uv = np.array(list(itertools.product(t, t)))
            add(_embed(uv[:, 0], uv[:, 1], np.full(len(uv), sign), axis), f"{'+' if sign > 0 else '-'}{AXES[axis]}")
    elif spec.region == "L":
        if spec.setup == "mermin":
            facets = [(tuple(s), 1.0) for s in MERMIN_SIGNS]
            solve_axis = 2
        else:
            facets = CHSH_SLICE_FACETS
            solve_axis = 1
        for k, (normal, bound) in enumerate(facets):
            add(_facet_points(normal, bound, solve_axis, t), f"facet{k + 1}")
    elif spec.setup == "mermin":
        # z = -xy +/- sqrt((1 - x^2)(1 - y^2))
        xy = np.array(list(itertools.product(t, t)))
        x, y = xy[:, 0], xy[:, 1]
        root = np.sqrt(np.clip((1 - x * x) * (1 - y * y), 0.0, None))
        for sign, name in ((1.0, "upper"), (-1.0, "lower")):
            add(np.column_stack([x, y, -x * y + sign * root]), name)
    else:
        # |y| |x - z| = sqrt(1 - y^2) (sqrt(1 - x^2) + sqrt(1 - z^2))
        xz = np.array(list(itertools.product(t, t)))
        x, z = xz[:, 0], xz[:, 1]
        s = np.sqrt(np.clip(1 - x * x, 0.0, None)) + np.sqrt(np.clip(1 - z * z, 0.0, None))
        denom = np.sqrt((x - z) ** 2 + s * s)
        ok = denom > 0
        y = np.where(ok, s / np.where(ok, denom, 1.0), 1.0)
        for sign, name in ((1.0, "upper"), (-1.0, "lower")):
            add(np.column_stack([x[ok], sign * y[ok], z[ok]]), name)
    return np.vstack(chunks), names


def _boundary(spec: RegionSpec) -> pd.DataFrame:
    pts, names = _boundary_points(spec)
    frame = _frame(pts, spec)
    frame.insert(0, "piece", names)
    # keep the pieces of each surface that bound the region itself
    frame = frame[frame["in_region"]].reset_index(drop=True)
    return frame


def _curve(spec: RegionSpec) -> pd.DataFrame:
    alphas = alpha_grid(max(spec.resolution, 2))
    pts = np.array([p.as_tuple() for p in hu_curve(alphas)])
    frame = _frame(pts, RegionSpec(region=spec.region, setup="chsh", mode="curve",
                                   resolution=spec.resolution, tol=spec.tol))
    frame.insert(0, "alpha", alphas)
    return frame


def emit_regions(spec: RegionSpec) -> pd.DataFrame:
    """Sample the requested region as a flat table (one row per point)."""
    if spec.mode == "grid":
        return _grid(spec)
    if spec.mode == "section":
        return _section(spec)
    if spec.mode == "projection":
        return _projection(spec)
    if spec.mode == "boundary":
        return _boundary(spec)
    return _curve(spec)


def region_summary(frame: pd.DataFrame) -> dict:
    """Counts per label, used for the CLI's JSON output."""
    counts = frame["label"].value_counts().to_dict()
    return {"rows": int(len(frame)), "labels": {str(k): int(v) for k, v in sorted(counts.items())}}
