#!/usr/bin/env python3

from __future__ import annotations

import json
import math
import sys
from pathlib import Path

import numpy as np
import pandas as pd
import pytest

# Ensure we can import from src without installing the package
ROOT = Path(__file__).resolve().parents[1]
SRC = ROOT / "src"
sys.path.insert(0, str(SRC))

from brokenarrow import __version__
from brokenarrow.export import dumps_csv, dumps_json, format_float, meta_block
from brokenarrow.states import qstate as qs


@pytest.mark.parametrize("x,text", [
    (0.1, "0.10000000000000001"),
    (1.0, "1.0"),
    (-2.0, "-2.0"),
    (1e-10, "1e-10"),
    (1 / 3, "0.33333333333333331"),
])
def test_format_float_uses_17_significant_digits(x, text):
    assert format_float(x) == text
    assert float(text) == x


def test_format_float_rejects_non_finite():
    for x in (math.nan, math.inf, -math.inf):
        with pytest.raises(ValueError):
            format_float(x)


def test_json_floats_have_17_digits_and_round_trip():
    state = qs.hardy_state(qs.alpha_from_cos(qs.KWIAT_HARDY_COS), ("b", "b"))
    text = dumps_json({"state": state.to_dict(), "n": 3, "ok": True}, meta_block("state", {}, 1, "PCG64"))
    doc = json.loads(text)
    assert doc["meta"]["version"] == __version__
    assert doc["n"] == 3 and doc["ok"] is True
    amps = np.array(doc["state"]["amplitudes"])
    np.testing.assert_array_equal(amps[:, 0], state.amplitudes.real)
    np.testing.assert_array_equal(amps[:, 1], state.amplitudes.imag)
    assert format_float(float(state.amplitudes.real[0])) in text


def test_json_rejects_nan_payload():
    with pytest.raises(ValueError):
        dumps_json({"x": float("nan")}, meta_block("x", {}, None, None))


def test_json_converts_numpy_values():
    payload = {"a": np.arange(3), "b": np.float64(0.5), "c": np.bool_(False), "z": 1 - 2j}
    doc = json.loads(dumps_json(payload, meta_block("x", {}, None, None)))
    assert doc["a"] == [0, 1, 2]
    assert doc["b"] == 0.5
    assert doc["c"] is False
    assert doc["z"] == [1.0, -2.0]


def test_csv_uses_17_significant_digits():
    text = dumps_csv(pd.DataFrame({"x": [0.1]}))
    assert text == "x\n0.10000000000000001\n"
