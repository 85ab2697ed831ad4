"""qstate.py

Two-qubit pure states and the singlet, Hardy and Hardy-Unruh families.

Amplitudes are always ordered (++, +-, -+, --) relative to a labeled product
basis (basis_a, basis_b). Internally the four amplitudes are viewed as the
2x2 matrix M[x, y] (row = Alice outcome, column = Bob outcome), so that
re-expressing the state in other bases is M' = U_A M U_B^T.

Setting conventions for the one-parameter families:
- `a` is the reference direction (half-angle 0) and `b` sits at half-angle
  alpha on both sides. Hardy states use a' = a and b' = b, so the array is
  labeled (a, b) x (a, b).
- `hu_state_generic` works off the great circle: b and b' are the reference
  bases and a, a' are derived from (u, v, w).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from brokenarrow.arrays.correlations import Cell, CorrelationArray
from brokenarrow.errors import DegeneracyError, DomainError, NormalizationError
from brokenarrow.states.basis import BasisRotation, Setting, change_of_basis, rotate_basis

__all__ = [
    "Amplitude",
    "BasisRotation",
    "Setting",
    "TwoQubitState",
    "GenericHU",
    "rotate_basis",
    "change_of_basis",
    "setting",
    "singlet",
    "hardy_settings",
    "hu_settings",
    "hardy_state",
    "hu_state",
    "hu_state_generic",
    "born_cell",
    "born_array",
    "singlet_array",
    "hardy_array",
    "hu_array",
    "hardy_witness",
    "hu_witness",
    "alpha_from_cos",
    "same_up_to_phase",
    "KWIAT_HARDY_COS",
]

Amplitude = complex

RENORMALIZE_TOL = 1e-9
ALPHA_SLACK = 1e-12

# cos(alpha) of the Kwiat-Hardy state, where Pr(++|bb) = 0.09
KWIAT_HARDY_COS = math.sqrt(2.0 / 5.0)

BasisPair = Tuple[Union[str, Setting], Union[str, Setting]]


@dataclass(frozen=True, eq=False)
class TwoQubitState:
    """Normalized amplitudes relative to the product basis (basis_a, basis_b)."""

    amplitudes: np.ndarray
    basis_a: Setting
    basis_b: Setting

    def __post_init__(self) -> None:
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if amps.shape != (4,) or not np.all(np.isfinite(amps)):
            raise NormalizationError(f"A two-qubit state needs 4 finite amplitudes, got {amps.shape}")
        norm2 = float(np.sum(np.abs(amps) ** 2))
        if abs(norm2 - 1.0) > RENORMALIZE_TOL:
            raise NormalizationError(f"State norm^2 is {norm2!r}, expected 1")
        amps = amps / math.sqrt(norm2)
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def normalized(cls, amplitudes: Sequence[complex], basis_a: Setting, basis_b: Setting) -> "TwoQubitState":
        """Scale arbitrary (nonzero) amplitudes to unit norm."""
        amps = np.asarray(amplitudes, dtype=complex)
        norm = float(np.linalg.norm(amps))
        if norm == 0.0:
            raise NormalizationError("Cannot normalize the zero vector")
        return cls(amps / norm, basis_a, basis_b)

    @classmethod
    def raw(cls, amplitudes: Sequence[complex], basis_a: Setting, basis_b: Setting) -> "TwoQubitState":
        """Build without the normalization check (used to exercise born_cell's guard)."""
        obj = object.__new__(cls)
        amps = np.array(amplitudes, dtype=complex).reshape(-1)
        amps.setflags(write=False)
        object.__setattr__(obj, "amplitudes", amps)
        object.__setattr__(obj, "basis_a", basis_a)
        object.__setattr__(obj, "basis_b", basis_b)
        return obj

    @property
    def matrix(self) -> np.ndarray:
        return self.amplitudes.reshape(2, 2)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def in_basis(self, setting_a: Setting, setting_b: Setting) -> "TwoQubitState":
        """Re-express the same state relative to (setting_a, setting_b)."""
        ua = change_of_basis(self.basis_a, setting_a).matrix
        ub = change_of_basis(self.basis_b, setting_b).matrix
        m = ua @ self.matrix @ ub.T
        return TwoQubitState(m.reshape(-1), setting_a, setting_b)

    def component(self, outcomes: str) -> complex:
        """Amplitude of '++', '+-', '-+' or '--'."""
        return complex(self.amplitudes[("++", "+-", "-+", "--").index(outcomes)])

    def to_dict(self) -> dict:
        return {
            "basisA": self.basis_a.to_dict(),
            "basisB": self.basis_b.to_dict(),
            "amplitudes": [[float(z.real), float(z.imag)] for z in self.amplitudes],
        }


def same_up_to_phase(s1: TwoQubitState, s2: TwoQubitState, tol: float = 1e-12) -> bool:
    """True when s2 = e^{i theta} s1 once both are written in s1's basis pair."""
    other = s2.in_basis(s1.basis_a, s1.basis_b)
    overlap = np.vdot(s1.amplitudes, other.amplitudes)
    return abs(abs(overlap) - 1.0) <= tol


# -----------------------------------------------------------------------------
# Settings
# -----------------------------------------------------------------------------

def setting(label: str, phi: float) -> Setting:
    """Setting from the full angle phi between peeling directions."""
    return Setting.from_peeling_angle(label, phi)


def _check_alpha(alpha: float) -> float:
    if not math.isfinite(alpha) or alpha < -ALPHA_SLACK or alpha > math.pi / 2 + ALPHA_SLACK:
        raise DomainError(f"alpha must lie in [0, pi/2], got {alpha}")
    return min(max(float(alpha), 0.0), math.pi / 2)


def alpha_from_cos(cos_alpha: float) -> float:
    if not 0.0 <= cos_alpha <= 1.0:
        raise DomainError(f"cos(alpha) must lie in [0, 1], got {cos_alpha}")
    return math.acos(cos_alpha)


def hardy_settings(alpha: float) -> Tuple[Setting, Setting]:
    """(a, b) with a at half-angle 0 and b at half-angle alpha."""
    alpha = _check_alpha(alpha)
    return (Setting("a", 0.0), Setting("b", alpha))


def hu_settings(alpha: float) -> Tuple[Setting, Setting]:
    alpha = _check_alpha(alpha)
    return (Setting("a", 0.0), Setting("b", alpha))


def _pick(pair: BasisPair, named: Sequence[Setting]) -> Tuple[Setting, Setting]:
    lookup = {s.label: s for s in named}
    out = []
    for item in pair:
        if isinstance(item, Setting):
            out.append(item)
        elif item in lookup:
            out.append(lookup[item])
        else:
            raise DomainError(f"Unknown basis label {item!r}; expected one of {sorted(lookup)}")
    return out[0], out[1]


# -----------------------------------------------------------------------------
# State families
# -----------------------------------------------------------------------------

def singlet(basis: Optional[Setting] = None) -> TwoQubitState:
    """(|+-> - |-+>)/sqrt(2); the same pattern in every common basis pair."""
    basis = basis or Setting("a", 0.0)
    r = 1.0 / math.sqrt(2.0)
    return TwoQubitState(np.array([0.0, r, -r, 0.0]), basis, basis)


def hardy_state(alpha: float, basis_pair: BasisPair = ("a", "a")) -> TwoQubitState:
    """Hardy state N (0, -sin a, -sin a, cos a) in the aa-basis, N = 1/sqrt(1 + sin^2 a)."""
    a, b = hardy_settings(alpha)
    s, c = math.sin(b.half_angle), math.cos(b.half_angle)
    n = 1.0 / math.sqrt(1.0 + s * s)
    state = TwoQubitState(n * np.array([0.0, -s, -s, c]), a, a)
    sa, sb = _pick(basis_pair, (a, b))
    return state.in_basis(sa, sb)


def hu_state(alpha: float, basis_pair: BasisPair = ("b", "b")) -> TwoQubitState:
    """Hardy-Unruh state N (cos a, -sin a, 0, -cos a) in the bb-basis, N = 1/sqrt(1 + cos^2 a).

    At alpha = 0 this is (|++> - |-->)/sqrt(2) in the bb-basis, not the singlet.
    """
    a, b = hu_settings(alpha)
    s, c = math.sin(b.half_angle), math.cos(b.half_angle)
    n = 1.0 / math.sqrt(1.0 + c * c)
    state = TwoQubitState(n * np.array([c, -s, 0.0, -c]), b, b)
    sa, sb = _pick(basis_pair, (a, b))
    return state.in_basis(sa, sb)


@dataclass(frozen=True, eq=False)
class GenericHU:
    """A Hardy-Unruh state for complex (u, v, w) with its four settings.

    Alice peels a or b, Bob peels a' or b'; b and b' are the reference bases.
    """

    state: TwoQubitState
    a: Setting
    b: Setting
    a_prime: Setting
    b_prime: Setting

    @property
    def settings_a(self) -> Tuple[Setting, Setting]:
        return (self.a, self.b)

    @property
    def settings_b(self) -> Tuple[Setting, Setting]:
        return (self.a_prime, self.b_prime)


def hu_state_generic(u: complex, v: complex, w: complex, rel_tol: float = 1e-12) -> GenericHU:
    """N (u|++> - v|+-> - w|-->) in the bb'-basis plus the derived settings a, a'.

    a is chosen so that the ab'-basis has no +- component, a' so that the
    ba'-basis has none.
    """
    u, v, w = complex(u), complex(v), complex(w)
    total = abs(u) ** 2 + abs(v) ** 2 + abs(w) ** 2
    if not math.isfinite(total) or total == 0.0:
        raise DegeneracyError("(u, v, w) must not all vanish")
    n_vw2 = abs(v) ** 2 + abs(w) ** 2
    n_uv2 = abs(u) ** 2 + abs(v) ** 2
    if n_vw2 <= rel_tol * total:
        raise DegeneracyError(f"|v|^2 + |w|^2 vanishes for (u, v, w) = {(u, v, w)}")
    if n_uv2 <= rel_tol * total:
        raise DegeneracyError(f"|u|^2 + |v|^2 vanishes for (u, v, w) = {(u, v, w)}")

    n_vw, n_uv = math.sqrt(n_vw2), math.sqrt(n_uv2)
    ident = ((1 + 0j, 0j), (0j, 1 + 0j))
    b = Setting("b", frame=ident)
    b_prime = Setting("b'", frame=ident)
    a = Setting("a", frame=(
        (w.conjugate() / n_vw, -v.conjugate() / n_vw),
        (v / n_vw, w / n_vw),
    ))
    a_prime = Setting("a'", frame=(
        (u / n_uv, -v / n_uv),
        (v.conjugate() / n_uv, u.conjugate() / n_uv),
    ))
    state = TwoQubitState.normalized([u, -v, 0.0, -w], b, b_prime)
    return GenericHU(state=state, a=a, b=b, a_prime=a_prime, b_prime=b_prime)


# -----------------------------------------------------------------------------
# Born rule
# -----------------------------------------------------------------------------

def born_cell(state: TwoQubitState, setting_a: Setting, setting_b: Setting) -> Cell:
    """Joint outcome probabilities when Alice peels setting_a and Bob setting_b."""
    norm2 = float(np.sum(np.abs(state.amplitudes) ** 2))
    if abs(norm2 - 1.0) > RENORMALIZE_TOL:
        raise NormalizationError(f"Born rule needs a normalized state, norm^2 = {norm2!r}")
    probs = np.abs(state.in_basis(setting_a, setting_b).matrix) ** 2
    return Cell.from_matrix(probs)


def born_array(
    state: TwoQubitState,
    settings_a: Sequence[Setting],
    settings_b: Sequence[Setting],
) -> CorrelationArray:
    cells = {
        (i, j): born_cell(state, sa, sb)
        for i, sa in enumerate(settings_a)
        for j, sb in enumerate(settings_b)
    }
    return CorrelationArray.from_cells(settings_a, settings_b, cells)


def singlet_array(settings_a: Sequence[Setting], settings_b: Optional[Sequence[Setting]] = None) -> CorrelationArray:
    settings_b = settings_a if settings_b is None else settings_b
    return born_array(singlet(), settings_a, settings_b)


def hardy_array(alpha: float) -> CorrelationArray:
    settings = hardy_settings(alpha)
    return born_array(hardy_state(alpha), settings, settings)


def hu_array(alpha: float) -> CorrelationArray:
    settings = hu_settings(alpha)
    return born_array(hu_state(alpha), settings, settings)


def hardy_witness(alpha: float) -> float:
    """Pr(++|bb) = sin^4 a cos^2 a / (1 + sin^2 a)."""
    alpha = _check_alpha(alpha)
    s, c = math.sin(alpha), math.cos(alpha)
    return s ** 4 * c ** 2 / (1.0 + s * s)


def hu_witness(alpha: float) -> float:
    """Pr(+-|aa) = cos^4 a sin^2 a / (1 + cos^2 a)."""
    alpha = _check_alpha(alpha)
    s, c = math.sin(alpha), math.cos(alpha)
    return c ** 4 * s ** 2 / (1.0 + c * c)
