"""k-OPT mutation of tours.

The default k-OPT applies ``k - 1`` independent uniformly random segment
inversions (so ``2-OPT`` is the classical 2-opt move). ``style="reconnect"``
instead cuts ``k`` edges and rejoins the pieces in a random order and
orientation.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .instance import Tour

STYLES = {"inversions": K.INVERSIONS, "reconnect": K.RECONNECT}


@dataclass(frozen=True)
class MutationKind:
    k: int = 2
    style: str = "inversions"

    def __post_init__(self):
        if self.k not in (2, 3, 4):
            raise ValueError(f"k must be 2, 3 or 4, got {self.k}")
        if self.style not in STYLES:
            raise ValueError(f"style must be one of {sorted(STYLES)}, got {self.style!r}")

    @property
    def inversions(self) -> int:
        return self.k - 1

    @property
    def label(self) -> str:
        return f"{self.k}opt"

    @classmethod
    def parse(cls, text: str, style: str = "inversions") -> "MutationKind":
        """Accepts ``"2opt"``, ``"2-OPT"``, ``"2"``..."""
        digits = "".join(ch for ch in str(text) if ch.isdigit())
        if not digits:
            raise ValueError(f"cannot read a mutation kind from {text!r}")
        return cls(int(digits), style)

    def __str__(self):
        return f"{self.k}-OPT({self.inversions})"


def make_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def invert_segment(tour: Tour, i: int, j: int) -> Tour:
    """Reverse ``perm[i..j]``; rejects reversals that leave the edge set unchanged."""
    n = tour.n
    if not 0 <= i < j < n:
        raise ValueError(f"need 0 <= i < j < n, got i={i}, j={j}, n={n}")
    if j - i + 1 >= n - 1:
        raise ValueError(
            f"reversing {j - i + 1} of {n} positions does not change the cycle"
        )
    perm = list(tour.perm)
    perm[i : j + 1] = perm[i : j + 1][::-1]
    return Tour(tuple(perm))


def mutate(tour: Tour, kind: MutationKind | int = 2, rng=None) -> Tour:
    if isinstance(kind, int):
        kind = MutationKind(kind)
    perm = np.array(tour.perm, dtype=np.int64)
    K.mutate(perm, kind.k, STYLES[kind.style], make_rng(rng))
    return Tour(tuple(perm.tolist()))
