"""brokenarrow.export

JSON / CSV writers shared by the CLI subcommands.

JSON documents are one top-level object: a `meta` block plus the payload.
Floats are printed with 17 significant digits in both formats; CSV goes
through pandas with a header row.
"""

from __future__ import annotations

import json
import json.encoder
import math
import sys
from pathlib import Path
from typing import Any, Dict, Optional

import numpy as np
import pandas as pd

from brokenarrow import __version__

CSV_FLOAT_FORMAT = "%.17g"
JSON_FLOAT_FORMAT = ".17g"


def format_float(x: float) -> str:
    """17 significant digits, always readable back as a float."""
    if not math.isfinite(x):
        raise ValueError(f"Out of range float values are not JSON compliant: {x!r}")
    text = format(x, JSON_FLOAT_FORMAT)
    if not any(ch in text for ch in ".eE"):
        text += ".0"
    return text


class Float17Encoder(json.JSONEncoder):
    """json.JSONEncoder that writes floats through format_float."""

    def iterencode(self, o: Any, _one_shot: bool = False):
        markers: Optional[Dict[int, Any]] = {} if self.check_circular else None
        if self.ensure_ascii:
            encode_str = json.encoder.encode_basestring_ascii
        else:
            encode_str = json.encoder.encode_basestring
        iterencode = json.encoder._make_iterencode(
            markers, self.default, encode_str, self.indent, format_float,
            self.key_separator, self.item_separator, self.sort_keys,
            self.skipkeys, _one_shot,
        )
        return iterencode(o, 0)


def _jsonable(obj: Any) -> Any:
    """Convert numpy scalars/arrays and tuples into plain JSON types."""
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, Path):
        return str(obj)
    return obj


def meta_block(command: str, config: Dict[str, Any], seed: Optional[int], rng: Optional[str]) -> Dict[str, Any]:
    return {
        "version": __version__,
        "command": command,
        "config": _jsonable(config),
        "seed": seed,
        "rng": rng,
    }


def dumps_json(payload: Dict[str, Any], meta: Dict[str, Any]) -> str:
    doc = {"meta": meta}
    doc.update(_jsonable(payload))
    return json.dumps(doc, indent=2, cls=Float17Encoder) + "\n"


def dumps_csv(frame: pd.DataFrame, float_format: str = CSV_FLOAT_FORMAT) -> str:
    return frame.to_csv(index=False, float_format=float_format, lineterminator="\n")


def emit(text: str, out: Optional[Path]) -> None:
    """Write to `out` (creating parent dirs) or to stdout."""
    if out is None:
        sys.stdout.write(text)
        return
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(text, encoding="utf-8")
