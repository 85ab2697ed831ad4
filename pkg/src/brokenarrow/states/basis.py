"""basis.py

One-qubit measurement settings and the basis changes between them.

A Setting is a peeling direction. On the great circle used by the Hardy and
Hardy-Unruh branches it is fully described by its half-angle theta = phi/2
relative to a side's reference basis:

    |+>_s = cos(theta) |+>_ref + sin(theta) |->_ref
    |->_s = -sin(theta) |+>_ref + cos(theta) |->_ref

Generic (complex) settings carry an explicit `frame` instead: a 2x2 matrix
whose rows are |+>_s and |->_s in reference coordinates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from brokenarrow.errors import DomainError

UNITARY_TOL = 1e-12

Frame = Tuple[Tuple[complex, complex], Tuple[complex, complex]]


@dataclass(frozen=True, eq=False)
class BasisRotation:
    """2x2 matrix taking coordinates in one basis to coordinates in another."""

    matrix: np.ndarray

    def __post_init__(self) -> None:
        m = np.array(self.matrix, dtype=complex)
        if m.shape != (2, 2) or not np.all(np.isfinite(m)):
            raise DomainError(f"BasisRotation needs a finite 2x2 matrix, got shape {m.shape}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def __matmul__(self, other: "BasisRotation") -> "BasisRotation":
        return BasisRotation(self.matrix @ other.matrix)

    def apply(self, coords: Sequence[complex]) -> np.ndarray:
        return self.matrix @ np.asarray(coords, dtype=complex)

    def inverse(self) -> "BasisRotation":
        return BasisRotation(self.matrix.conj().T)

    def unitarity_error(self) -> float:
        return float(np.max(np.abs(self.matrix.conj().T @ self.matrix - np.eye(2))))

    def is_unitary(self, tol: float = UNITARY_TOL) -> bool:
        return self.unitarity_error() <= tol


def rotate_basis(alpha: float) -> BasisRotation:
    """Basis change for two directions whose eigenvectors are alpha apart.

    Rows are (cos a, -sin a) and (sin a, cos a): the coordinates of |+>_a and
    |->_a in the b-basis, so the matrix maps b-coordinates to a-coordinates.
    rotate_basis(-alpha) is the inverse.
    """
    if not math.isfinite(alpha):
        raise DomainError(f"alpha must be finite, got {alpha}")
    c, s = math.cos(alpha), math.sin(alpha)
    return BasisRotation(np.array([[c, -s], [s, c]], dtype=complex))


def _great_circle_frame(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, s], [-s, c]], dtype=complex)


@dataclass(frozen=True)
class Setting:
    """A labeled peeling direction."""

    label: str
    half_angle: float = 0.0
    frame: Optional[Frame] = None

    def __post_init__(self) -> None:
        if not self.label:
            raise DomainError("Setting label must be non-empty")
        if not math.isfinite(self.half_angle):
            raise DomainError(f"half_angle must be finite, got {self.half_angle}")
        object.__setattr__(self, "half_angle", float(self.half_angle) % math.pi)
        if self.frame is not None:
            m = np.array(self.frame, dtype=complex)
            if m.shape != (2, 2):
                raise DomainError(f"frame must be 2x2, got shape {m.shape}")
            if not BasisRotation(m).is_unitary(1e-9):
                raise DomainError(f"frame for setting {self.label!r} is not orthonormal")
            frozen = tuple(tuple(complex(x) for x in row) for row in m)
            object.__setattr__(self, "frame", frozen)

    @classmethod
    def from_peeling_angle(cls, label: str, phi: float) -> "Setting":
        return cls(label, phi / 2.0)

    @property
    def on_great_circle(self) -> bool:
        return self.frame is None

    def basis(self) -> np.ndarray:
        """Rows |+>_s, |->_s in reference coordinates."""
        if self.frame is None:
            return _great_circle_frame(self.half_angle)
        return np.array(self.frame, dtype=complex)

    def to_dict(self) -> dict:
        out = {"label": self.label, "half_angle": self.half_angle}
        if self.frame is not None:
            out["frame"] = [[[z.real, z.imag] for z in row] for row in self.frame]
        return out


def change_of_basis(source: Setting, target: Setting) -> BasisRotation:
    """Matrix mapping source-basis coordinates to target-basis coordinates."""
    if source.on_great_circle and target.on_great_circle:
        return rotate_basis(source.half_angle - target.half_angle)
    return BasisRotation(target.basis().conj() @ source.basis().T)
