#!/usr/bin/env python3

from __future__ import annotations

import math
import sys
from pathlib import Path

import numpy as np
import pytest

# Ensure we can import from src without installing the package
ROOT = Path(__file__).resolve().parents[1]
SRC = ROOT / "src"
sys.path.insert(0, str(SRC))

from brokenarrow.arrays import correlations as co
from brokenarrow.errors import BrokenArrowError, InfeasibleMomentsError, UndefinedCoefficientError
from brokenarrow.states import qstate as qs
from brokenarrow.states.basis import Setting


def _chi_cell(chi: float) -> co.Cell:
    return co.Cell((1 + chi) / 4, (1 - chi) / 4, (1 - chi) / 4, (1 + chi) / 4)


def _random_state(rng: np.random.Generator) -> qs.TwoQubitState:
    z = rng.normal(size=4) + 1j * rng.normal(size=4)
    a = Setting("a")
    return qs.TwoQubitState.normalized(z, a, a)


# --- cells and moments ---

def test_cell_rejects_bad_probabilities():
    with pytest.raises(BrokenArrowError):
        co.Cell(0.5, 0.5, 0.5, 0.0)
    with pytest.raises(BrokenArrowError):
        co.Cell(-0.1, 0.6, 0.25, 0.25)


@pytest.mark.parametrize("chi", [-1.0, -0.3, 0.0, 0.6, 1.0])
def test_chi_cell_covariance_and_coefficient(chi):
    c = _chi_cell(chi)
    m = co.cell_moments(c)
    assert m.cov == pytest.approx(chi / 4, abs=1e-15)
    assert m.expA == pytest.approx(0.0, abs=1e-15)
    assert co.correlation_coefficient(c) == pytest.approx(chi, abs=1e-14)


def test_uniform_cell_moments():
    m = co.cell_moments(co.Cell(0.25, 0.25, 0.25, 0.25))
    assert (m.expA, m.expB, m.cov) == (0.0, 0.0, 0.0)


def test_moments_to_cell_examples():
    assert co.moments_to_cell(co.Moments(0, 0, 0.25)).as_tuple() == pytest.approx((0.5, 0, 0, 0.5))
    assert co.moments_to_cell(co.Moments(0, 0, 0)).as_tuple() == pytest.approx((0.25,) * 4)


def test_moments_to_cell_infeasible():
    with pytest.raises(InfeasibleMomentsError):
        co.moments_to_cell(co.Moments(0.5, 0.5, -0.25))


def test_moments_round_trip_on_random_valid_moments():
    rng = np.random.default_rng(11)
    done = 0
    while done < 1000:
        a, b = rng.uniform(-0.5, 0.5, size=2)
        ab = rng.uniform(-0.25, 0.25)
        m = co.Moments(a, b, ab)
        try:
            cell = co.moments_to_cell(m)
        except InfeasibleMomentsError:
            continue
        back = co.cell_moments(cell)
        assert (back.expA, back.expB, back.cov) == pytest.approx((a, b, ab), abs=1e-12)
        done += 1


@pytest.mark.parametrize("phi", [0.0, 0.4, math.pi / 2, 2.0, math.pi])
def test_singlet_coefficient_is_minus_cos(phi):
    arr = qs.singlet_array([qs.setting("a", 0.0)], [qs.setting("b", phi)])
    assert co.correlation_coefficient(arr.cell(0, 0)) == pytest.approx(-math.cos(phi), abs=1e-12)


def test_coefficient_undefined_for_deterministic_marginal():
    with pytest.raises(UndefinedCoefficientError):
        co.correlation_coefficient(co.Cell(0.5, 0.5, 0.0, 0.0))


# --- arrays ---

def test_array_lookup_and_reorder():
    arr = qs.hardy_array(0.5)
    assert arr.shape == (2, 2)
    assert arr.labels_a == ["a", "b"]
    flipped = arr.reorder(["b", "a"], ["a", "b"])
    assert flipped.labels_a == ["b", "a"]
    assert flipped.prob("b", "b", "++") == arr.prob("b", "b", "++")
    with pytest.raises(BrokenArrowError):
        arr.reorder(["a"], ["a", "b"])


def test_array_rejects_duplicate_labels():
    a = Setting("a")
    table = np.full((2, 1, 2, 2), 0.25)
    with pytest.raises(BrokenArrowError):
        co.CorrelationArray((a, a), (a,), table)


def test_array_table_is_read_only():
    arr = qs.hu_array(0.3)
    with pytest.raises(ValueError):
        arr.table[0, 0, 0, 0] = 1.0


def test_to_frame_has_one_row_per_entry():
    frame = qs.hu_array(0.3).to_frame()
    assert list(frame.columns) == ["setting_a", "setting_b", "outcome", "probability"]
    assert len(frame) == 16
    assert frame.groupby(["setting_a", "setting_b"])["probability"].sum().to_numpy() == pytest.approx([1.0] * 4)


# --- non-signaling ---

@pytest.mark.parametrize("alpha", np.linspace(0.0, math.pi / 2, 7))
def test_family_arrays_are_nonsignaling(alpha):
    for arr in (qs.hardy_array(alpha), qs.hu_array(alpha)):
        report = co.check_nonsignaling(arr, tol=1e-12)
        assert report.passed
        assert report.max_discrepancy < 1e-12


def test_signaling_array_detected():
    a, b = Setting("a"), Setting("b")
    table = np.zeros((2, 1, 2, 2))
    table[0, 0] = [[1, 0], [0, 0]]
    table[1, 0] = [[0, 1], [0, 0]]
    report = co.check_nonsignaling(co.CorrelationArray((a, b), (a,), table))
    assert not report.passed
    assert report.discrepancy_b["a"] == pytest.approx(1.0)


def test_random_born_arrays_are_nonsignaling():
    rng = np.random.default_rng(2024)
    for _ in range(1000):
        state = _random_state(rng)
        na, nb = rng.integers(1, 4, size=2)
        sa = [Setting(f"s{k}", h) for k, h in enumerate(rng.uniform(0, math.pi, size=na))]
        sb = [Setting(f"t{k}", h) for k, h in enumerate(rng.uniform(0, math.pi, size=nb))]
        report = co.check_nonsignaling(qs.born_array(state, sa, sb), tol=1e-12)
        assert report.passed


def test_product_state_arrays_are_nonsignaling():
    rng = np.random.default_rng(5)
    a = Setting("a")
    for _ in range(100):
        x = rng.normal(size=2) + 1j * rng.normal(size=2)
        y = rng.normal(size=2) + 1j * rng.normal(size=2)
        state = qs.TwoQubitState.normalized(np.kron(x, y), a, a)
        settings = [Setting("a"), Setting("b", rng.uniform(0, math.pi))]
        assert co.check_nonsignaling(qs.born_array(state, settings, settings), tol=1e-12).passed


def test_marginals_of_hu_at_quarter_turn():
    margs = co.marginals(qs.hu_array(math.pi / 2))
    assert margs["A"]["a"] == pytest.approx(0.0, abs=1e-15)


# --- balanced variables ---

@pytest.mark.parametrize("alpha", [0.2, 0.7, 1.1])
def test_balanced_hu_ab_cell(alpha):
    c2, s2 = math.cos(alpha) ** 2, math.sin(alpha) ** 2
    n2 = 1.0 / (1.0 + c2)
    bal = co.balance_array(qs.hu_array(alpha))
    expected = n2 * np.array([(c2 * c2 + 1) / 2, c2 * s2 / 2, c2 * s2 / 2, (c2 * c2 + 1) / 2])
    np.testing.assert_allclose(bal.cell_at("a", "b").as_tuple(), expected, atol=1e-14)
    np.testing.assert_allclose(bal.cell_at("b", "a").as_tuple(), expected, atol=1e-14)


def test_balance_is_idempotent_and_keeps_product_moment():
    arr = qs.hardy_array(0.9)
    once = co.balance_array(arr)
    twice = co.balance_array(once)
    np.testing.assert_allclose(twice.table, once.table, atol=0)
    np.testing.assert_allclose(co.product_chis(once), co.product_chis(arr), atol=1e-15)
    m = co.cell_moments(once.cell(1, 1))
    assert m.expA == pytest.approx(0.0, abs=1e-15)
    assert m.expB == pytest.approx(0.0, abs=1e-15)


def test_balanced_hu_covariances_match_closed_form():
    for alpha in np.linspace(0.05, 1.5, 12):
        c2, s2 = math.cos(alpha) ** 2, math.sin(alpha) ** 2
        d = 1 + c2
        cov_aa = 0.25 * (2 * c2 ** 3 - s2 * d ** 2 - c2 ** 2 * s2) / d
        ac, ad, bc, bd = co.chsh_chis(qs.hu_array(alpha))
        assert ac == pytest.approx(4 * cov_aa, abs=1e-13)
        assert ad == pytest.approx(bc, abs=1e-13)


def test_chsh_chis_needs_two_by_two():
    arr = qs.singlet_array([qs.setting(x, k) for x, k in zip("abc", (0.0, 1.0, 2.0))])
    with pytest.raises(BrokenArrowError):
        co.chsh_chis(arr)
    x, y, z = co.mermin_point(arr)
    assert x == pytest.approx(-math.cos(1.0), abs=1e-14)
    assert z == pytest.approx(-math.cos(1.0), abs=1e-14)
