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

from brokenarrow.arrays import chains as ch
from brokenarrow.arrays.correlations import CorrelationArray, cell_moments, check_nonsignaling
from brokenarrow.errors import RelabelingError
from brokenarrow.states import qstate as qs
from brokenarrow.states.basis import Setting

INTERIOR = [k * math.pi / 40 for k in range(1, 20)]


def _uniform_array() -> CorrelationArray:
    s = (Setting("a"), Setting("b", 0.3))
    return CorrelationArray(s, s, np.full((2, 2, 2, 2), 0.25))


# --- propositions ---

def test_proposition_formatting_and_negation():
    p = ch.Proposition("A", "a", "+")
    assert str(p) == "A_{a+}"
    assert p.negate() == ch.Proposition("A", "a", "-")
    with pytest.raises(ValueError):
        ch.Proposition("C", "a", "+")


def test_contrapositive_and_canonical_orientation():
    c = ch.Conditional((ch.Proposition("A", "a", "-"),), (ch.Proposition("B", "b", "-"),))
    assert str(c.contrapositive()) == "B_{b+} -> A_{a+}"
    assert ch.canonical(c) == c.contrapositive()


# --- extraction ---

def test_hardy_conditionals():
    out = ch.extract_conditionals(qs.hardy_array(0.6))
    assert {str(c) for c in out} == {
        "A_{b+} -> B_{a+}",
        "B_{b+} -> A_{a+}",
        "not(A_{a+} & B_{a+})",
    }


def test_hu_conditionals():
    out = ch.extract_conditionals(qs.hu_array(0.6))
    assert {str(c) for c in out} == {
        "A_{a+} -> B_{b+}",
        "B_{b+} -> A_{b+}",
        "A_{b+} -> B_{a+}",
    }
    assert all(isinstance(c, ch.Conditional) for c in out)


def test_uniform_array_has_no_conditionals():
    assert ch.extract_conditionals(_uniform_array()) == []
    report = ch.find_broken_arrows(_uniform_array())
    assert report.broken == ()
    assert report.chain == ()


# --- broken arrows ---

def test_hu_broken_arrow_at_pi_over_4():
    report = ch.find_broken_arrows(qs.hu_array(math.pi / 4))
    assert len(report.broken) == 1
    b = report.broken[0]
    assert str(b.conditional) == "A_{a+} -> B_{a+}"
    assert b.witness_cell == ("a", "a")
    assert b.witness_outcome == "+-"
    assert b.witness_probability == pytest.approx(1 / 12, abs=1e-14)


@pytest.mark.parametrize("alpha", INTERIOR)
def test_hu_chain_over_interior_grid(alpha):
    report = ch.find_broken_arrows(qs.hu_array(alpha))
    assert [str(p) for p in report.chain] == ["A_{a+}", "B_{b+}", "A_{b+}", "B_{a+}"]
    assert len(report.broken) == 1
    assert report.broken[0].witness_probability == pytest.approx(qs.hu_witness(alpha), abs=1e-13)


def test_hu_at_quarter_turn_is_vacuous():
    report = ch.find_broken_arrows(qs.hu_array(math.pi / 2))
    assert report.broken == ()
    assert report.marginals["A"]["a"] == pytest.approx(0.0, abs=1e-15)
    assert any(str(c) == "A_{a+} -> B_{a+}" for c in report.vacuous)


def test_hardy_composite_broken_arrow_kwiat_hardy():
    alpha = qs.alpha_from_cos(qs.KWIAT_HARDY_COS)
    report = ch.find_broken_arrows(qs.hardy_array(alpha))
    assert len(report.broken) == 1
    b = report.broken[0]
    assert b.conditional.is_composite
    assert str(b.conditional) == "(A_{b+} & B_{b+}) -> (A_{a+} & B_{a+})"
    assert b.witness_cell == ("b", "b")
    assert b.witness_outcome == "++"
    assert b.witness_probability == pytest.approx(0.09, abs=1e-12)


@pytest.mark.parametrize("alpha", INTERIOR)
def test_hardy_composite_over_interior_grid(alpha):
    report = ch.find_broken_arrows(qs.hardy_array(alpha))
    composites = [b for b in report.broken if b.conditional.is_composite]
    assert len(composites) == 1
    assert composites[0].witness_probability == pytest.approx(qs.hardy_witness(alpha), abs=1e-13)
    assert [str(c) for c in report.entailed] == ["A_{b+} -> B_{b-}"]


def test_report_to_dict():
    d = ch.find_broken_arrows(qs.hu_array(0.5)).to_dict()
    assert d["chain"] == "A_{a+} -> B_{b+} -> A_{b+} -> B_{a+}"
    assert d["broken"][0]["arrow"] == "A_{a+} -/-> B_{a+}"
    assert d["broken"][0]["witness_cell"] == ["a", "a"]


# --- relabeling ---

def test_identity_relabeling_keeps_array():
    arr = qs.hu_array(0.4)
    out = ch.relabel_array(arr, ch.identity_relabeling(arr))
    np.testing.assert_array_equal(out.table, arr.table)
    assert out.labels_a == arr.labels_a


@pytest.mark.parametrize("alpha", np.linspace(0.0, math.pi / 2, 50))
def test_hu_maps_onto_hardy_at_complementary_angle(alpha):
    hu = qs.hu_array(alpha)
    mapped = ch.relabel_array(hu, ch.hu_relabeling()).reorder(["a", "b"], ["a", "b"])
    hardy = qs.hardy_array(math.pi / 2 - alpha)
    np.testing.assert_allclose(mapped.table, hardy.table, atol=1e-12)


def test_relabeling_then_inverse_is_identity():
    arr = qs.hu_array(0.9)
    m = ch.hu_relabeling()
    back = ch.relabel_array(ch.relabel_array(arr, m), ch.invert_relabeling(m))
    np.testing.assert_array_equal(back.table, arr.table)
    assert back.labels_a == ["a", "b"]
    assert back.labels_b == ["a", "b"]


def test_relabeling_must_be_a_bijection():
    arr = qs.hu_array(0.9)
    bad = ch.RelabelMap(alice={"a": ("a", False), "b": ("a", True)}, bob={"a": ("a", False), "b": ("b", False)})
    with pytest.raises(RelabelingError):
        ch.relabel_array(arr, bad)
    partial = ch.RelabelMap(alice={"a": ("a", False)}, bob={"a": ("a", False), "b": ("b", False)})
    with pytest.raises(RelabelingError):
        ch.relabel_array(arr, partial)


# --- witness shape ---

def _hu_report_witness(alpha: float) -> float:
    broken = ch.find_broken_arrows(qs.hu_array(alpha)).broken
    assert len(broken) == 1
    return broken[0].witness_probability


def _hardy_report_witness(alpha: float) -> float:
    broken = ch.find_broken_arrows(qs.hardy_array(alpha)).broken
    composites = [b for b in broken if b.conditional.is_composite]
    assert len(composites) == 1
    return composites[0].witness_probability


def test_hu_witness_falls_toward_the_quarter_turn():
    values = [_hu_report_witness(a) for a in np.linspace(1.2, math.pi / 2 - 0.05, 30)]
    assert all(later < earlier for earlier, later in zip(values, values[1:]))


def test_hardy_witness_rises_away_from_zero():
    values = [_hardy_report_witness(a) for a in np.linspace(0.05, 0.6, 30)]
    assert all(later > earlier for earlier, later in zip(values, values[1:]))


def test_witnesses_vanish_at_the_endpoints():
    assert qs.hu_witness(math.pi / 2) == pytest.approx(0.0, abs=1e-30)
    assert qs.hardy_witness(0.0) == 0.0
    assert ch.find_broken_arrows(qs.hu_array(math.pi / 2)).broken == ()
    hardy = ch.find_broken_arrows(qs.hardy_array(0.0))
    assert not [b for b in hardy.broken if b.conditional.is_composite]


# --- relabeling invariants ---

def _true_covariance(cell) -> float:
    m = cell_moments(cell)
    return m.cov - m.expA * m.expB


def _assert_covariances_flip(before: CorrelationArray, after: CorrelationArray, relabel: ch.RelabelMap) -> None:
    for i, j, cell in before.cells():
        sign = -1.0 if relabel.alice[before.labels_a[i]][1] != relabel.bob[before.labels_b[j]][1] else 1.0
        assert _true_covariance(after.cell(i, j)) == pytest.approx(sign * _true_covariance(cell), abs=1e-14)


@pytest.mark.parametrize("alpha", [0.1, 0.5, math.pi / 4, 1.1, 1.5])
def test_hu_relabeling_preserves_nonsignaling_and_covariance(alpha):
    arr = qs.hu_array(alpha)
    relabel = ch.hu_relabeling()
    out = ch.relabel_array(arr, relabel)
    assert check_nonsignaling(out).passed
    _assert_covariances_flip(arr, out, relabel)


@pytest.mark.parametrize("seed", [71, 72, 73])
def test_random_flips_on_born_arrays(seed):
    rng = np.random.default_rng(seed)
    for _ in range(50):
        amps = rng.normal(size=4) + 1j * rng.normal(size=4)
        state = qs.TwoQubitState.normalized(amps, Setting("a"), Setting("a"))
        settings = (Setting("a", float(rng.uniform(0, math.pi))), Setting("b", float(rng.uniform(0, math.pi))))
        arr = qs.born_array(state, settings, settings)
        flips = rng.integers(0, 2, size=4).astype(bool)
        relabel = ch.RelabelMap(
            alice={"a": ("a", bool(flips[0])), "b": ("b", bool(flips[1]))},
            bob={"a": ("a", bool(flips[2])), "b": ("b", bool(flips[3]))},
        )
        out = ch.relabel_array(arr, relabel)
        assert check_nonsignaling(out).passed
        _assert_covariances_flip(arr, out, relabel)
