"""sampling.py

Seeded Monte Carlo runs of a raffle.

Each draw picks a ticket by weight, a setting for Alice and one for Bob
(uniformly), and, in shared scenarios, which half goes to Alice. Draws are
generated in fixed-size blocks; block k has its own stream seeded with
SeedSequence(seed, spawn_key=(k,)), so counts depend only on (seed, n,
block_size) and never on how the blocks are scheduled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, List, Optional, Tuple

import numpy as np
import pandas as pd

from brokenarrow.arrays.correlations import OUTCOME_PAIRS, CorrelationArray
from brokenarrow.errors import BrokenArrowError
from brokenarrow.lhv.raffles import Raffle, Scenario

RNG_NAME = "PCG64"
DEFAULT_BLOCK_SIZE = 65536


@dataclass(frozen=True, eq=False)
class RaffleSample:
    """Counts of one run plus the empirical frequencies.

    Setting pairs that no draw landed on have NaN frequencies; `array` is then
    None, since such a table is not a correlation array.
    """

    counts: np.ndarray  # (nA, nB, 2, 2) int64
    frequencies: np.ndarray  # counts / per-pair totals, NaN for undrawn pairs
    scenario: Scenario
    draws: int
    seed: int
    block_size: int
    rng: str = RNG_NAME

    def cell_totals(self) -> np.ndarray:
        return self.counts.sum(axis=(2, 3))

    def undrawn(self) -> List[Tuple[str, str]]:
        totals = self.cell_totals()
        return [
            (self.scenario.labels_a[i], self.scenario.labels_b[j])
            for i, j in zip(*np.nonzero(totals == 0))
        ]

    @property
    def array(self) -> Optional[CorrelationArray]:
        if self.undrawn():
            return None
        return CorrelationArray(self.scenario.settings_a, self.scenario.settings_b, self.frequencies)

    def to_frame(self) -> pd.DataFrame:
        na, nb = self.scenario.shape
        rows = []
        for i in range(na):
            for j in range(nb):
                for k, pair in enumerate(OUTCOME_PAIRS):
                    x, y = divmod(k, 2)
                    rows.append({
                        "setting_a": self.scenario.labels_a[i],
                        "setting_b": self.scenario.labels_b[j],
                        "outcome": pair,
                        "count": int(self.counts[i, j, x, y]),
                        "probability": float(self.frequencies[i, j, x, y]),
                    })
        return pd.DataFrame(rows, columns=["setting_a", "setting_b", "outcome", "count", "probability"])

    def to_dict(self) -> dict:
        freqs = np.where(np.isnan(self.frequencies), None, self.frequencies)
        return {
            "draws": self.draws,
            "seed": self.seed,
            "block_size": self.block_size,
            "rng": self.rng,
            "settingsA": self.scenario.labels_a,
            "settingsB": self.scenario.labels_b,
            "counts": self.counts.tolist(),
            "frequencies": freqs.tolist(),
            "undrawn": [list(p) for p in self.undrawn()],
        }


def block_generator(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(block,))))


def _blocks(n: int, block_size: int) -> Iterator[Tuple[int, int]]:
    for k in range(math.ceil(n / block_size)):
        yield k, min(block_size, n - k * block_size)


def _sample_block(raffle: Raffle, rng: np.random.Generator, m: int, counts: np.ndarray) -> None:
    na, nb = raffle.scenario.shape
    alice = np.array([t.alice for t in raffle.tickets])  # (K, nA)
    bob = np.array([t.bob for t in raffle.tickets])      # (K, nB)

    k = rng.choice(len(raffle.tickets), size=m, p=raffle.weights)
    i = rng.integers(0, na, size=m)
    j = rng.integers(0, nb, size=m)
    sign_a = alice[k, i]
    sign_b = bob[k, j]
    if raffle.scenario.shared:
        # Alice receives the second half: both read the opposite copy
        swap = rng.integers(0, 2, size=m).astype(bool)
        sign_a, sign_b = np.where(swap, bob[k, i], sign_a), np.where(swap, alice[k, j], sign_b)
    x = (sign_a < 0).astype(np.intp)
    y = (sign_b < 0).astype(np.intp)
    np.add.at(counts, (i, j, x, y), 1)


def sample_raffle(raffle: Raffle, n: int, seed: int, block_size: int = DEFAULT_BLOCK_SIZE) -> RaffleSample:
    """Draw n tickets and tally outcomes per setting pair."""
    if n <= 0:
        raise BrokenArrowError(f"draw count must be > 0, got {n}")
    if block_size <= 0:
        raise BrokenArrowError(f"block_size must be > 0, got {block_size}")
    na, nb = raffle.scenario.shape
    counts = np.zeros((na, nb, 2, 2), dtype=np.int64)
    for k, m in _blocks(n, block_size):
        _sample_block(raffle, block_generator(seed, k), m, counts)

    totals = counts.sum(axis=(2, 3), keepdims=True)
    freqs = np.where(totals > 0, counts / np.maximum(totals, 1), np.nan)
    return RaffleSample(
        counts=counts,
        frequencies=freqs,
        scenario=raffle.scenario,
        draws=n,
        seed=seed,
        block_size=block_size,
    )
